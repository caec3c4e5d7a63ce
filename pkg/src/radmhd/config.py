"""Flat ``key = value`` configuration files.

Sections ``[params]``, ``[equilibrium]`` and ``[eos]`` describe the physics;
an optional ``[run]`` section holds grid and sweep settings. ``#`` starts a
comment. Every error names the offending line.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field, fields, replace

from .errors import ConfigError, RadMHDError
from .model import EOS, Equilibrium, PhysParams, make_cold_pressure_eos, make_ideal_gas_eos, validate_equilibrium

PARAM_KEYS = ("mu", "sigma", "sigma_a", "sigma_s", "a", "kappa", "nu")
EQ_KEYS = ("rho_bar", "theta_bar", "Er_bar", "B_bar")
EOS_KEYS = {"ideal": ("kind", "R", "C_v"), "cold_pressure": ("kind", "R", "C_v", "K", "gamma")}


@dataclass(frozen=True)
class RunSettings:
    n: int = 16
    L: float = 2 * math.pi
    d: float = 4.0
    t_end: float = 10.0
    n_out: int = 50
    n_dirs: int = 200
    mags: str = "1e-3:1e3:log:31"
    dirs: str = "axes"
    train: int = 64
    test: int = 500
    budget: int = 20000
    grid_n: int = 1024
    seed: int = 7


_INT_RUN = {"n", "n_out", "n_dirs", "train", "test", "budget", "grid_n", "seed"}
_STR_RUN = {"mags", "dirs"}
_ALLOWED = {"params": set(PARAM_KEYS), "equilibrium": set(EQ_KEYS),
            "eos": {"kind", "R", "C_v", "K", "gamma"}, "run": {f.name for f in fields(RunSettings)}}


@dataclass(frozen=True)
class RunConfig:
    params: PhysParams
    equilibrium: Equilibrium
    eos: EOS
    eos_spec: tuple[tuple[str, str], ...]
    run: RunSettings = field(default_factory=RunSettings)
    source: str = "<config>"

    @property
    def seed(self) -> int:
        return self.run.seed

    def canonical_text(self) -> str:
        p = self.params
        eq = self.equilibrium
        lines = ["[params]"]
        lines += [f"{k} = {getattr(p, k)!r}" for k in PARAM_KEYS]
        lines += ["[equilibrium]", f"rho_bar = {eq.rho_bar!r}", f"theta_bar = {eq.theta_bar!r}",
                  f"Er_bar = {eq.Er_bar!r}", "B_bar = " + " ".join(repr(b) for b in eq.B_bar), "[eos]"]
        lines += [f"{k} = {v}" for k, v in self.eos_spec]
        lines.append("[run]")
        lines += [f"{f.name} = {getattr(self.run, f.name)!r}" for f in fields(RunSettings)]
        return "\n".join(lines) + "\n"

    @property
    def hash(self) -> str:
        return hashlib.sha256(self.canonical_text().encode()).hexdigest()[:16]

    def with_nu(self, nu: float) -> "RunConfig":
        return replace(self, params=self.params.replace(nu=nu))

    def with_run(self, **changes) -> "RunConfig":
        return replace(self, run=replace(self.run, **changes))


def _float(value: str, lineno: int, key: str) -> float:
    try:
        x = float(value)
    except ValueError:
        raise ConfigError(f"line {lineno}: {key} expects a real number, got {value!r}") from None
    if not math.isfinite(x):
        raise ConfigError(f"line {lineno}: {key} must be finite")
    return x


def parse_config(text: str, source: str = "<config>") -> RunConfig:
    sections: dict[str, dict[str, tuple[str, int]]] = {}
    headers: dict[str, int] = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ConfigError(f"line {lineno}: unterminated section header {raw.strip()!r}")
            current = line[1:-1].strip()
            if current not in ("params", "equilibrium", "eos", "run"):
                raise ConfigError(f"line {lineno}: unknown section [{current}]")
            if current in sections:
                raise ConfigError(f"line {lineno}: duplicate section [{current}]")
            sections[current] = {}
            headers[current] = lineno
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        if current is None:
            raise ConfigError(f"line {lineno}: key outside of any section")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key or not value:
            raise ConfigError(f"line {lineno}: empty key or value")
        if key in sections[current]:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        if current == "params" and key in ("lam", "lambda"):
            raise ConfigError(f"line {lineno}: {key} is derived as 1/(mu*sigma) and cannot be set")
        if key not in _ALLOWED[current]:
            raise ConfigError(f"line {lineno}: unknown key {key!r} in [{current}]")
        sections[current][key] = (value, lineno)

    last = len(text.splitlines())
    for name in ("params", "equilibrium"):
        if name not in sections:
            raise ConfigError(f"line {last}: {source} ends without section [{name}]")

    pvals = {}
    for key, (value, lineno) in sections["params"].items():
        pvals[key] = _float(value, lineno, key)
    try:
        params = PhysParams(**pvals)
    except RadMHDError as exc:
        raise ConfigError(f"line {headers['params']}: [params]: {exc}") from exc

    evals: dict = {}
    eq_line = headers["equilibrium"]
    for key, (value, lineno) in sections["equilibrium"].items():
        if key == "B_bar":
            parts = value.split()
            if len(parts) != 3:
                raise ConfigError(f"line {lineno}: B_bar expects three whitespace-separated reals")
            evals[key] = tuple(_float(v, lineno, key) for v in parts)
        else:
            evals[key] = _float(value, lineno, key)
    for key in ("rho_bar", "theta_bar"):
        if key not in evals:
            raise ConfigError(f"line {eq_line}: [equilibrium] is missing {key}")
    if "Er_bar" not in evals:
        evals["Er_bar"] = params.a * evals["theta_bar"] ** 4
    try:
        eq = validate_equilibrium(params, Equilibrium(evals["rho_bar"], evals["theta_bar"], evals["Er_bar"],
                                                      evals.get("B_bar", (0.0, 0.0, 0.0))))
    except RadMHDError as exc:
        raise ConfigError(f"line {eq_line}: [equilibrium]: {exc}") from exc

    eos_sec = sections.get("eos", {})
    kind = eos_sec.get("kind", ("ideal", 0))[0]
    if kind not in EOS_KEYS:
        raise ConfigError(f"line {eos_sec['kind'][1]}: unknown eos kind {kind!r}")
    consts = {}
    for key, (value, lineno) in eos_sec.items():
        if key not in EOS_KEYS[kind]:
            raise ConfigError(f"line {lineno}: unknown key {key!r} in [eos] for kind {kind}")
        if key != "kind":
            consts[key] = _float(value, lineno, key)
    try:
        eos = make_ideal_gas_eos(**consts) if kind == "ideal" else make_cold_pressure_eos(**consts)
    except RadMHDError as exc:
        raise ConfigError(f"line {headers.get('eos', 0)}: [eos]: {exc}") from exc
    spec = (("kind", kind),) + tuple((k, repr(v)) for k, v in sorted(consts.items()))

    rvals = {}
    for key, (value, lineno) in sections.get("run", {}).items():
        if key in _STR_RUN:
            rvals[key] = value
        elif key in _INT_RUN:
            try:
                rvals[key] = int(value)
            except ValueError:
                raise ConfigError(f"line {lineno}: {key} expects an integer, got {value!r}") from None
        else:
            rvals[key] = _float(value, lineno, key)
    return RunConfig(params, eq, eos, spec, RunSettings(**rvals), source)


def load_config(path) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read(), source=str(path))


def default_config() -> RunConfig:
    """All-ones configuration with ``B_bar = (1, 0, 0)``."""
    params = PhysParams()
    eq = Equilibrium.compatible(params, 1.0, 1.0, (1.0, 0.0, 0.0))
    return RunConfig(params, eq, make_ideal_gas_eos(1.0, 1.0), (("kind", "ideal"), ("C_v", "1.0"), ("R", "1.0")))
