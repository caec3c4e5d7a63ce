from __future__ import annotations

import os

import numpy as np
import pytest

from radmhd.cli import main, parse_dirs, parse_mags, read_snapshot, run_report, write_snapshot
from radmhd.config import default_config, parse_config
from radmhd.errors import ConfigError
from radmhd.propagator import random_field

BASE = """\
[params]
mu = 1.0
sigma = 1.0
sigma_a = 1.0
sigma_s = 1.0
a = 1.0
kappa = 1.0
nu = {nu}
[equilibrium]
rho_bar = 1.0
theta_bar = 1.0
B_bar = 1.0 0.0 0.0
[eos]
kind = ideal
R = 1.0
C_v = 1.0
[run]
n = 8
t_end = 5
n_out = 5
n_dirs = 40
mags = 1e-3:1e2:log:11
train = 24
test = 60
budget = 3000
grid_n = 128
"""


@pytest.fixture
def cfg_file(tmp_path):
    def make(nu=1.0):
        p = tmp_path / f"cfg_nu{nu}.txt"
        p.write_text(BASE.format(nu=nu))
        return str(p)
    return make


def test_parse_matches_default():
    cfg = parse_config(BASE.format(nu=1.0))
    d = default_config()
    assert cfg.params == d.params and cfg.equilibrium == d.equilibrium
    assert cfg.run.n == 8 and cfg.run.mags == "1e-3:1e2:log:11"
    assert cfg.hash == parse_config("# comment\n" + BASE.format(nu=1.0)).hash
    assert cfg.hash != parse_config(BASE.format(nu=0.5)).hash


@pytest.mark.parametrize("edit,line", [
    (("mu = 1.0", "mu 1.0"), 2),
    (("kappa = 1.0", "kapa = 1.0"), 7),
    (("nu = 1.0", "lam = 1.0"), 8),
    (("B_bar = 1.0 0.0 0.0", "B_bar = 1.0 0.0"), 12),
    (("theta_bar = 1.0", "theta_bar = hot"), 11),
    (("[eos]", "[eqs]"), 13),
    (("n = 8", "n = 8.5"), 18),
])
def test_malformed_config_names_line(edit, line):
    text = BASE.format(nu=1.0).replace(*edit)
    with pytest.raises(ConfigError, match=rf"line {line}\b"):
        parse_config(text)


def test_incompatible_and_unknown_kind():
    with pytest.raises(ConfigError, match="line 9"):
        parse_config(BASE.format(nu=1.0).replace("theta_bar = 1.0", "theta_bar = 1.0\nEr_bar = 2.0"))
    with pytest.raises(ConfigError, match="line 14"):
        parse_config(BASE.format(nu=1.0).replace("kind = ideal", "kind = tabulated"))
    cold = BASE.format(nu=1.0).replace("kind = ideal", "kind = cold_pressure\nK = 0.5\ngamma = 2.0")
    assert parse_config(cold).eos.name == "cold_pressure"


def test_argument_parsers():
    np.testing.assert_allclose(parse_mags("1e-3:1e2:log:6"), np.logspace(-3, 2, 6))
    assert parse_dirs("axes").shape == (6, 3) and parse_dirs("fib:10").shape == (10, 3)


def test_snapshot_roundtrip(tmp_path):
    f = random_field(4, 2.0, seed=1)
    path = str(tmp_path / "s.txt")
    write_snapshot(path, f, 0.25)
    g, t = read_snapshot(path)
    assert t == 0.25 and g.L == 2.0
    np.testing.assert_array_equal(g.data, f.data)
    first = open(path).readline().split()
    assert first == ["4", "2", "0.25"]
    # row-major with z fastest
    second = np.array(open(path).readlines()[2].split(), dtype=float)
    np.testing.assert_array_equal(second, f.data[:, 0, 0, 1])


def test_subcommands(cfg_file, tmp_path, capsys):
    cfg = cfg_file()
    out = str(tmp_path / "o")
    assert main(["coeffs", "--config", cfg]) == 0
    assert "gamma_pp: 1.3333333333333333" in capsys.readouterr().out
    assert main(["dump-matrices", "--config", cfg, "--out", out]) == 0
    lines = open(os.path.join(out, "matrix_Bt.csv")).read().splitlines()
    assert lines[0].startswith("# Bt config=") and len(lines) == 10
    assert all(len(r.split(",")) == 9 for r in lines[1:])
    assert main(["audit", "--config", cfg]) == 0
    assert main(["sk-check", "--config", cfg, "--xi", "0,1,0"]) == 0
    assert "SK: holds" in capsys.readouterr().out
    assert main(["sk-sweep", "--config", cfg_file(0.0), "--n", "20"]) == 0
    assert "SK: fails" in capsys.readouterr().out
    assert main(["kalman", "--config", cfg, "--xi", "1,0,0"]) == 0
    assert "rank: 9 of 9" in capsys.readouterr().out
    assert main(["decay-map", "--config", cfg, "--mags", "1e-3:1e2:log:6", "--dirs", "fib:3", "--out", out]) == 0
    assert open(os.path.join(out, "decay_map.csv")).readline().strip() == "xi1,xi2,xi3,abscissa,cond"
    assert main(["compensator", "--config", cfg, "--train", "16", "--test", "30", "--budget", "500"]) == 0
    assert main(["simulate", "--config", cfg, "--n", "4", "--t-end", "1", "--n-out", "2", "--out", out]) == 0
    assert open(os.path.join(out, "norms.csv")).readline().strip() == "t,H^d,grad_terms,relax_terms,N2"
    capsys.readouterr()
    assert main(["entropy-audit", "--config", cfg, "--snapshot", os.path.join(out, "snapshot_0002.txt")]) == 0
    report = dict(line.split(": ", 1) for line in capsys.readouterr().out.splitlines())
    assert {"heat", "radiative", "relaxation", "ohmic", "damping", "eta_integral", "C1", "C4"} <= set(report)
    assert main(["coercivity", "--config", cfg, "--grid", "64"]) == 0
    assert "sandwich violations: 0" in capsys.readouterr().out


def test_global_flags_before_or_after_subcommand(cfg_file, capsys):
    cfg0 = cfg_file(0.0)
    for argv in (["--config", cfg0, "sk-check", "--xi", "0,1,0"], ["sk-check", "--config", cfg0, "--xi", "0,1,0"]):
        assert main(argv) == 0
        assert "SK: fails" in capsys.readouterr().out


def test_bad_config_exit_code(tmp_path, capsys):
    p = tmp_path / "bad.txt"
    p.write_text("[params]\nmu = x\n")
    assert main(["coeffs", "--config", str(p)]) == 2
    assert "line 2" in capsys.readouterr().err


@pytest.mark.parametrize("nu", [1.0, 0.0])
def test_report_exit_zero(cfg_file, tmp_path, nu):
    cfg = parse_config(open(cfg_file(nu)).read())
    code, failure = run_report(cfg, str(tmp_path / "r"))
    assert code == 0, failure
    text = open(tmp_path / "r" / "report.txt").read()
    assert "SK: holds" in text
    assert "failure set equals the orthogonal set: yes" in text
