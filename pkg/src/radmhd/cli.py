"""Command-line entry point: ``radmhd <subcommand> [options]``.

Every subcommand prints a short human-readable verdict; with ``--out DIR`` it
also writes its CSV/flat-text artifacts there. ``report`` runs the whole chain
and exits non-zero naming the first failed check.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import compensator as comp_mod
from .config import RunConfig, default_config, load_config
from .entropy import (coercivity_constants, entropy_production, full_state, relative_entropy_eta,
                      sandwich_violations)
from .errors import ConfigError, RadMHDError
from .model import derive_coefficients
from .propagator import Field, random_field, simulate, single_mode_field, sobolev_norm
from .stability import AXES, decay_map, fibonacci_sphere, kalman_rank, sk_check, sk_sweep
from .symbols import SystemMatrices, build_system, consistency_audit

MATRIX_NAMES = ("A1", "A2", "A3", "D", "B", "A0", "At1", "At2", "At3", "Dt", "Bt")


def g17(x: float) -> str:
    return f"{float(x):.17g}"


def system_for(cfg: RunConfig) -> SystemMatrices:
    return build_system(derive_coefficients(cfg.params, cfg.eos, cfg.equilibrium), cfg.equilibrium, cfg.params)


def parse_vec(text: str) -> np.ndarray:
    parts = text.replace(",", " ").split()
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected three comma-separated reals, got {text!r}")
    try:
        return np.array([float(p) for p in parts])
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected three comma-separated reals, got {text!r}") from None


def parse_mags(text: str) -> np.ndarray:
    """``lo:hi:log|lin:count``."""
    try:
        lo, hi, kind, count = text.split(":")
        lo, hi, count = float(lo), float(hi), int(count)
    except ValueError:
        raise argparse.ArgumentTypeError(f"--mags expects lo:hi:log|lin:count, got {text!r}") from None
    if kind == "log":
        return np.logspace(np.log10(lo), np.log10(hi), count)
    if kind == "lin":
        return np.linspace(lo, hi, count)
    raise argparse.ArgumentTypeError(f"--mags spacing must be log or lin, got {kind!r}")


def parse_dirs(text: str) -> np.ndarray:
    if text == "axes":
        return AXES.copy()
    if text.startswith("fib:"):
        try:
            return fibonacci_sphere(int(text[4:]))
        except ValueError:
            pass
    raise argparse.ArgumentTypeError(f"--dirs expects 'axes' or 'fib:n', got {text!r}")


# ---------------------------------------------------------------- artifacts

class Sink:
    """Collects output files; ``None`` directory means files are not written."""

    def __init__(self, out: str | None):
        self.out = out
        if out is not None:
            os.makedirs(out, exist_ok=True)

    def write(self, name: str, text: str) -> None:
        if self.out is None:
            return
        with open(os.path.join(self.out, name), "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def matrix_csv(name: str, M: np.ndarray, cfg_hash: str) -> str:
    lines = [f"# {name} config={cfg_hash}"]
    lines += [",".join(g17(v) for v in row) for row in np.asarray(M)]
    return "\n".join(lines) + "\n"


def system_matrices(sys: SystemMatrices) -> dict[str, np.ndarray]:
    return {"A1": sys.A[0], "A2": sys.A[1], "A3": sys.A[2], "D": sys.D, "B": sys.Brelax, "A0": sys.A0,
            "At1": sys.At[0], "At2": sys.At[1], "At3": sys.At[2], "Dt": sys.Dt, "Bt": sys.Bt}


def write_snapshot(path: str, f: Field, t: float) -> None:
    flat = f.data.reshape(9, -1).T
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"{f.n} {g17(f.L)} {g17(t)}\n")
        np.savetxt(fh, flat, fmt="%.17g", delimiter=" ")


def read_snapshot(path: str) -> tuple[Field, float]:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 3:
            raise RadMHDError(f"{path}: header must be 'n L t'")
        n, L, t = int(header[0]), float(header[1]), float(header[2])
        flat = np.loadtxt(fh, ndmin=2)
    if flat.shape != (n**3, 9):
        raise RadMHDError(f"{path}: expected {n**3} rows of 9 values, got {flat.shape}")
    return Field(n, L, np.ascontiguousarray(flat.T.reshape(9, n, n, n))), t


# ---------------------------------------------------------------- subcommand bodies
# Each returns the lines printed to stdout and writes its artifacts to the sink.

def do_coeffs(cfg: RunConfig, sink: Sink) -> list[str]:
    c = derive_coefficients(cfg.params, cfg.eos, cfg.equilibrium)
    lines = [f"{k}: {g17(v)}" for k, v in c.as_dict().items()]
    lines.append(f"lam: {g17(cfg.params.lam)}")
    sink.write("coeffs.txt", "\n".join(lines) + "\n")
    return lines


def do_dump_matrices(cfg: RunConfig, sink: Sink) -> list[str]:
    mats = system_matrices(system_for(cfg))
    texts = [matrix_csv(name, mats[name], cfg.hash) for name in MATRIX_NAMES]
    for name, text in zip(MATRIX_NAMES, texts):
        sink.write(f"matrix_{name}.csv", text)
    return [t.rstrip("\n") for t in texts] if sink.out is None else [f"wrote {len(texts)} matrices"]


def do_audit(cfg: RunConfig, sink: Sink) -> list[str]:
    lines = consistency_audit(system_for(cfg)).lines()
    sink.write("audit.txt", "\n".join(lines) + "\n")
    return lines


def _sk_lines(sys: SystemMatrices, rep) -> list[str]:
    lines = [f"xi: {' '.join(g17(x) for x in rep.xi)}",
             f"SK: {'holds' if rep.holds else 'fails'}",
             f"min principal angle: {rep.min_angle:.6e}",
             f"kernel dim of B(xi): {rep.kernel_dim}"]
    if rep.witness is not None:
        ra, rb = rep.witness_residuals(sys)
        lines.append(f"witness eigenvalue: {rep.witness[0]:.6e}")
        lines.append(f"witness residuals: |A X - lam A0 X| = {ra:.3e}, |B X| = {rb:.3e}")
    return lines


def do_sk_check(cfg: RunConfig, sink: Sink, xi) -> list[str]:
    sys_ = system_for(cfg)
    lines = _sk_lines(sys_, sk_check(sys_, xi))
    sink.write("sk_check.txt", "\n".join(lines) + "\n")
    return lines


def sweep_csv(sweep) -> str:
    rows = ["xi1,xi2,xi3,holds,min_angle,kernel_dim"]
    for r in sweep.reports:
        rows.append(",".join([*(g17(x) for x in r.xi), str(int(r.holds)), g17(r.min_angle), str(r.kernel_dim)]))
    return "\n".join(rows) + "\n"


def do_sk_sweep(cfg: RunConfig, sink: Sink, n: int, name: str = "sk_sweep.csv"):
    sys_ = system_for(cfg)
    sweep = sk_sweep(sys_, n)
    sink.write(name, sweep_csv(sweep))
    n_fail = sum(not r.holds for r in sweep.reports)
    lines = [f"nu: {g17(sys_.nu)}",
             f"SK: {'holds' if sweep.holds_everywhere else 'fails'}",
             f"directions: {sweep.n_checks}, failures: {n_fail}",
             f"worst min principal angle: {sweep.worst_min_angle:.6e}"]
    return lines, sweep


def do_kalman(cfg: RunConfig, sink: Sink, xi) -> list[str]:
    r = kalman_rank(system_for(cfg), xi)
    lines = [f"xi: {' '.join(g17(x) for x in np.asarray(xi, float))}", f"Kalman rank: {r} of 9"]
    sink.write("kalman.txt", "\n".join(lines) + "\n")
    return lines


def do_decay_map(cfg: RunConfig, sink: Sink, mags, dirs):
    dm = decay_map(system_for(cfg), mags, dirs)
    rows = ["xi1,xi2,xi3,abscissa,cond"] + [",".join(g17(v) for v in row) for row in dm.rows()]
    sink.write("decay_map.csv", "\n".join(rows) + "\n")
    lines = [f"points: {len(dm.points)}"]
    for d, s, p in zip(dm.directions, dm.slopes, dm.plateaus):
        lines.append(f"dir ({d[0]:.4f}, {d[1]:.4f}, {d[2]:.4f}): low-frequency slope {s:.6f}, "
                     f"plateau {p:.9e}")
    return lines, dm


def do_compensator(cfg: RunConfig, sink: Sink, train: int, test: int, budget: int):
    sys_ = system_for(cfg)
    c = comp_mod.find_compensator(sys_, n_train=train, budget=budget)
    chk = comp_mod.verify_compensator(c, sys_, n_test=test)
    K_text = "".join(matrix_csv(f"K{j + 1}", c.K[j], cfg.hash) for j in range(3))
    sink.write("compensator_K.csv", K_text)
    omegas = fibonacci_sphere(test, offset=comp_mod.TEST_OFFSET)
    margins = comp_mod.pointwise_margins(c.K, sys_, omegas)
    rows = ["omega1,omega2,omega3,margin"] + [",".join(g17(v) for v in (*w, m)) for w, m in zip(omegas, margins)]
    sink.write("compensator_margins.csv", "\n".join(rows) + "\n")
    lines = [f"compensator: {'found' if c.found else 'not found (NoCompensatorFound)'}",
             f"training margin ({train} points): {c.margin:.9e}",
             f"test margin ({test} points): {chk.margin:.9e}",
             f"skewness defect: {chk.skew_defect:.3e}",
             f"oddness defect: {chk.odd_defect:.3e}"]
    return lines, c, chk


@dataclass
class SimResult:
    lines: list[str]
    traj: object
    field0: Field
    energy_drop: bool = False
    info: dict = field(default_factory=dict)


def initial_field(cfg: RunConfig, init: str, seed: int, amplitude: float) -> Field:
    n, L = cfg.run.n, cfg.run.L
    if init == "mode":
        c = np.zeros(9, dtype=complex)
        c[[1, 4, 5]] = amplitude
        c[7] = amplitude  # b2 for mode (1, 0, 0) keeps div b = 0
        return single_mode_field(n, L, (1, 0, 0), c)
    f = random_field(n, L, seed=seed)
    scale = amplitude / sobolev_norm(f, cfg.run.d)
    return Field(f.n, f.L, f.data * scale)


def do_simulate(cfg: RunConfig, sink: Sink, init: str, seed: int, amplitude: float = 1e-2,
                snapshots: str = "all") -> SimResult:
    sys_ = system_for(cfg)
    f0 = initial_field(cfg, init, seed, amplitude)
    traj = simulate(sys_, f0, cfg.run.t_end, cfg.run.n_out, d=cfg.run.d)
    rows = ["t,H^d,grad_terms,relax_terms,N2"]
    rows += [",".join(g17(v) for v in (r.t, r.Hd, r.grad_terms, r.relax_terms, r.N2)) for r in traj.norms]
    sink.write("norms.csv", "\n".join(rows) + "\n")
    if sink.out is not None and snapshots != "none":
        idx = range(len(traj.times)) if snapshots == "all" else (0, len(traj.times) - 1)
        for i in idx:
            write_snapshot(os.path.join(sink.out, f"snapshot_{i:04d}.txt"), traj.snapshots[i], traj.times[i])
    l2 = [float(np.sum(s.data[1:] ** 2)) for s in (traj.snapshots[0], traj.snapshots[-1])]
    C = traj.norms[-1].N2 / traj.norms[0].N2
    lines = [f"init: {init} (seed {seed}), n = {cfg.run.n}, L = {g17(cfg.run.L)}, d = {g17(cfg.run.d)}",
             f"H^d norm: {traj.norms[0].Hd:.9e} -> {traj.norms[-1].Hd:.9e}",
             f"N^2 ratio N(t_end)^2 / N(0)^2: {C:.9e}",
             f"max imaginary residue: {np.max(traj.imag_residue):.3e}",
             f"max divergence defect: {np.max(traj.div_defect):.3e}"]
    return SimResult(lines, traj, f0, energy_drop=l2[1] < l2[0],
                     info={"C": C, "imag": float(np.max(traj.imag_residue)),
                           "div": float(np.max(traj.div_defect))})


def entropy_lines(cfg: RunConfig, state: Field, grid_n: int) -> tuple[list[str], object, object]:
    eq, p = cfg.equilibrium, cfg.params
    prod = entropy_production(state, p)
    eta = relative_entropy_eta(state, cfg.eos, eq, p)
    eta_ext = relative_entropy_eta(state, cfg.eos, eq, p, extended=True)
    cc = coercivity_constants(cfg.eos, eq, p.a, grid_n)
    lines = [f"{k}: {g17(v)}" for k, v in prod.terms().items()]
    lines += [f"radiative_Er_form: {g17(prod.radiative_Er_form)}",
              f"eta_integral: {g17(eta)}", f"eta_integral_extended: {g17(eta_ext)}"]
    lines += [f"{k}: {g17(getattr(cc, k))}" for k in ("C1", "C2", "C3", "C4")]
    return lines, prod, cc


def do_entropy_audit(cfg: RunConfig, sink: Sink, snapshot: str) -> list[str]:
    pert, t = read_snapshot(snapshot)
    lines, _, _ = entropy_lines(cfg, full_state(pert, cfg.equilibrium), cfg.run.grid_n)
    lines.insert(0, f"t: {g17(t)}")
    sink.write("entropy_audit.txt", "\n".join(lines) + "\n")
    return lines


def do_coercivity(cfg: RunConfig, sink: Sink, grid_n: int) -> list[str]:
    eq = cfg.equilibrium
    cc = coercivity_constants(cfg.eos, eq, cfg.params.a, grid_n)
    bad = sandwich_violations(cc, cfg.eos, eq, cfg.params.a)
    lines = [f"grid_n: {grid_n}"] + [f"{k}: {g17(getattr(cc, k))}" for k in ("C1", "C2", "C3", "C4")]
    lines += [f"matter anchor limits: {g17(cc.matter_anchor_limits[0])} {g17(cc.matter_anchor_limits[1])}",
              f"radiation anchor limit: {g17(cc.radiation_anchor_limit)}",
              f"sandwich violations: {bad}"]
    sink.write("coercivity.txt", "\n".join(lines) + "\n")
    return lines


# ---------------------------------------------------------------- report

class CheckList:
    def __init__(self):
        self.items: list[tuple[str, bool]] = []

    def add(self, name: str, ok: bool) -> None:
        self.items.append((name, bool(ok)))

    @property
    def first_failure(self) -> str | None:
        return next((n for n, ok in self.items if not ok), None)

    def lines(self) -> list[str]:
        return [f"check {name}: {'PASS' if ok else 'FAIL'}" for name, ok in self.items]


def _perp(xi, B) -> bool:
    nb = float(np.linalg.norm(B))
    return abs(float(np.dot(xi, B))) <= 1e-12 * max(1.0, nb)


def run_report(cfg: RunConfig, out: str) -> tuple[int, str | None]:
    """Run every stage and write ``report.txt`` plus CSV artifacts into ``out``.

    The damped stages use the configured ``nu`` when it is positive and
    ``nu = 1`` otherwise; the undamped stage always uses ``nu = 0``.
    """
    sink = Sink(out)
    damped = cfg if cfg.params.nu > 0 else cfg.with_nu(1.0)
    undamped = cfg.with_nu(0.0)
    checks = CheckList()
    rep = [f"config hash: {cfg.hash}", f"damped runs use nu = {g17(damped.params.nu)}", ""]

    rep += ["[coefficients]", *do_coeffs(damped, sink), ""]
    do_dump_matrices(damped, sink)
    rep += ["[consistency audit]", *do_audit(damped, sink), ""]

    sys_d = system_for(damped)
    n_dirs = cfg.run.n_dirs
    lines, sweep = do_sk_sweep(damped, sink, n_dirs)
    checks.add("sk_sweep_nu_positive", sweep.holds_everywhere and sweep.worst_min_angle > 1e-8)
    rep += ["[SK, nu > 0]", *lines, ""]

    sys_0 = system_for(undamped)
    lines0, sweep0 = do_sk_sweep(undamped, sink, n_dirs, name="sk_sweep_nu0.csv")
    B = cfg.equilibrium.B
    exact = all(r.holds != _perp(r.xi, B) for r in sweep0.reports)
    resid = max((max(r.witness_residuals(sys_0)) for r in sweep0.reports if not r.holds), default=0.0)
    checks.add("sk_nu0_fails_exactly_on_perp_B", exact and resid <= 1e-10)
    n_perp = sum(_perp(r.xi, B) for r in sweep0.reports)
    rep += ["[SK, nu = 0]", *lines0, f"directions orthogonal to B_bar: {n_perp}",
            f"failure set equals the orthogonal set: {'yes' if exact else 'no'}",
            f"max witness residual: {resid:.3e}", ""]

    ranks = [kalman_rank(sys_d, a) for a in AXES]
    ranks0 = [kalman_rank(sys_0, r.xi) for r in sweep0.reports]
    agree = all((rk == 9) == r.holds for rk, r in zip(ranks0, sweep0.reports))
    checks.add("kalman_full_rank_nu_positive", all(r == 9 for r in ranks))
    checks.add("kalman_agrees_with_sk_nu0", agree)
    rep += ["[Kalman]", "nu > 0, axis directions: " + " ".join(map(str, ranks)),
            f"nu = 0: rank 9 exactly where SK holds: {'yes' if agree else 'no'}", ""]
    rep += ["[Kalman, e1]", *do_kalman(damped, sink, AXES[0]), ""]
    rep += ["[SK check, e1]", *do_sk_check(damped, sink, AXES[0]), ""]

    mags = parse_mags(cfg.run.mags)
    dirs = parse_dirs(cfg.run.dirs)
    lines, dm = do_decay_map(damped, sink, mags, dirs)
    ab = np.array([p.abscissa for p in dm.points])
    checks.add("decay_abscissa_negative", bool(np.all(ab < 0)))
    if mags.min() * 10 <= 0.1 * (1 + 1e-12):
        checks.add("decay_low_frequency_slope_2", all(abs(s - 2.0) <= 0.2 for s in dm.slopes))
    rep += ["[decay map]", *lines, ""]

    lines, comp, chk = do_compensator(damped, sink, cfg.run.train, cfg.run.test, cfg.run.budget)
    checks.add("compensator_oddness", chk.odd_defect == 0.0)
    checks.add("compensator_skewness", chk.skew_defect <= 1e-12)
    rep += ["[compensator]", *lines, ""]

    sim = do_simulate(damped, sink, "random", cfg.seed, snapshots="ends")
    checks.add("simulation_imag_residue", sim.info["imag"] <= 1e-10)
    checks.add("simulation_divergence_free", sim.info["div"] <= 1e-10)
    checks.add("simulation_decay", sim.energy_drop)
    checks.add("simulation_N_bounded", bool(np.isfinite(sim.info["C"])))
    norms = sim.traj.norms
    step = max(1, len(norms) // 10)
    table = ["t H^d N2"] + [f"{r.t:.4f} {r.Hd:.9e} {r.N2:.9e}" for r in norms[::step]]
    rep += ["[simulation]", *sim.lines, *table, ""]

    grid_n = cfg.run.grid_n
    rep += ["[coercivity]", *do_coercivity(cfg, sink, grid_n), ""]
    cc = coercivity_constants(cfg.eos, cfg.equilibrium, cfg.params.a, grid_n)
    checks.add("coercivity_sandwich", sandwich_violations(cc, cfg.eos, cfg.equilibrium, cfg.params.a) == 0)

    last = os.path.join(out, f"snapshot_{len(sim.traj.times) - 1:04d}.txt")
    elines = do_entropy_audit(damped, sink, last)
    state = full_state(read_snapshot(last)[0], cfg.equilibrium)
    prod = entropy_production(state, damped.params)
    checks.add("entropy_production_nonnegative", all(v >= 0 for v in prod.terms().values()))
    rep += ["[entropy audit, final snapshot]", *elines, ""]

    rep += ["[checks]", *checks.lines()]
    failure = checks.first_failure
    rep.append("result: " + ("all checks passed" if failure is None else f"first failure: {failure}"))
    sink.write("report.txt", "\n".join(rep) + "\n")
    return (0 if failure is None else 1), failure


# ---------------------------------------------------------------- argparse

def build_parser() -> argparse.ArgumentParser:
    def global_flags(parser, suppress):
        # subcommand copies must not overwrite values given before the subcommand
        d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
        parser.add_argument("--config", metavar="PATH", default=d(None),
                            help="configuration file (default: all-ones, B_bar = e1)")
        parser.add_argument("--out", metavar="DIR", default=d(None), help="directory for CSV/text artifacts")
        parser.add_argument("--jobs", type=int, metavar="N", default=d(1),
                            help="worker cap (work is vectorized in-process)")
        parser.add_argument("--seed", type=int, metavar="K", default=d(None), help="override the configured seed")

    common = argparse.ArgumentParser(add_help=False)
    global_flags(common, suppress=True)
    p = argparse.ArgumentParser(prog="radmhd", description="Linear stability toolkit for radiative Euler-MHD.")
    global_flags(p, suppress=False)
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("coeffs", parents=[common], help="linearization coefficients")
    sub.add_parser("dump-matrices", parents=[common], help="system matrices as CSV")
    sub.add_parser("audit", parents=[common], help="symmetry/positivity audit of the dissipation")
    s = sub.add_parser("sk-check", parents=[common], help="SK condition at one direction")
    s.add_argument("--xi", type=parse_vec, required=True)
    s = sub.add_parser("sk-sweep", parents=[common], help="SK condition over the sphere")
    s.add_argument("--n", type=int, default=None)
    s = sub.add_parser("kalman", parents=[common], help="Kalman rank at one direction")
    s.add_argument("--xi", type=parse_vec, required=True)
    s = sub.add_parser("decay-map", parents=[common], help="spectral abscissa map")
    s.add_argument("--mags", type=parse_mags, default=None)
    s.add_argument("--dirs", type=parse_dirs, default=None)
    s = sub.add_parser("compensator", parents=[common], help="search and verify a compensating matrix")
    s.add_argument("--train", type=int, default=None)
    s.add_argument("--test", type=int, default=None)
    s.add_argument("--budget", type=int, default=None)
    s = sub.add_parser("simulate", parents=[common], help="exact linear evolution on a periodic box")
    s.add_argument("--n", type=int, default=None)
    s.add_argument("--L", type=float, default=None)
    s.add_argument("--t-end", type=float, default=None)
    s.add_argument("--n-out", type=int, default=None)
    s.add_argument("--init", choices=("mode", "random"), default="random")
    s.add_argument("--amplitude", type=float, default=1e-2, help="H^d norm of the random field, or mode amplitude")
    s = sub.add_parser("entropy-audit", parents=[common], help="entropy functionals of a snapshot")
    s.add_argument("--snapshot", required=True)
    s = sub.add_parser("coercivity", parents=[common], help="coercivity constants")
    s.add_argument("--grid", type=int, default=None)
    sub.add_parser("report", parents=[common], help="run every stage and write report.txt")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.jobs < 1:
        parser.error("--jobs must be >= 1")
    try:
        cfg = load_config(args.config) if args.config else default_config()
        if args.seed is not None:
            cfg = cfg.with_run(seed=args.seed)
        cmd = args.command
        if cmd == "report":
            code, failure = run_report(cfg, args.out or "report")
            print(open(os.path.join(args.out or "report", "report.txt"), encoding="utf-8").read(), end="")
            if failure is not None:
                print(f"FAILED: {failure}", file=sys.stderr)
            return code
        sink = Sink(args.out)
        if cmd == "coeffs":
            lines = do_coeffs(cfg, sink)
        elif cmd == "dump-matrices":
            lines = do_dump_matrices(cfg, sink)
        elif cmd == "audit":
            lines = do_audit(cfg, sink)
        elif cmd == "sk-check":
            lines = do_sk_check(cfg, sink, args.xi)
        elif cmd == "sk-sweep":
            lines, _ = do_sk_sweep(cfg, sink, args.n or cfg.run.n_dirs)
        elif cmd == "kalman":
            lines = do_kalman(cfg, sink, args.xi)
        elif cmd == "decay-map":
            mags = args.mags if args.mags is not None else parse_mags(cfg.run.mags)
            dirs = args.dirs if args.dirs is not None else parse_dirs(cfg.run.dirs)
            lines, _ = do_decay_map(cfg, sink, mags, dirs)
        elif cmd == "compensator":
            lines, _, _ = do_compensator(cfg, sink, args.train or cfg.run.train, args.test or cfg.run.test,
                                         args.budget or cfg.run.budget)
        elif cmd == "simulate":
            changes = {k: v for k, v in (("n", args.n), ("L", args.L), ("t_end", args.t_end),
                                         ("n_out", args.n_out)) if v is not None}
            cfg = cfg.with_run(**changes)
            lines = do_simulate(cfg, sink, args.init, cfg.seed, args.amplitude).lines
        elif cmd == "entropy-audit":
            lines = do_entropy_audit(cfg, sink, args.snapshot)
        else:
            lines = do_coercivity(cfg, sink, args.grid or cfg.run.grid_n)
    except (ConfigError, RadMHDError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print("\n".join(lines))
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
