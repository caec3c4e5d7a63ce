from __future__ import annotations

import numpy as np
import pytest

from radmhd.model import Equilibrium, PhysParams, derive_coefficients, make_ideal_gas_eos
from radmhd.symbols import build_system

ACCEPTANCE_LINES: list[str] = []


def record(criterion: int, ok: bool, detail: str) -> None:
    line = f"criterion {criterion:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


def random_setup(rng: np.random.Generator, nu: float | None = None, B_bar=None):
    """Admissible ideal-gas configuration with every scalar in [0.5, 2]."""
    u = lambda: float(np.exp(rng.uniform(np.log(0.5), np.log(2.0))))  # noqa: E731
    params = PhysParams(mu=u(), sigma=u(), sigma_a=u(), sigma_s=u(), a=u(), kappa=u(),
                        nu=u() if nu is None else nu)
    eos = make_ideal_gas_eos(R=u(), C_v=u())
    B = rng.normal(size=3) if B_bar is None else np.asarray(B_bar, dtype=float)
    eq = Equilibrium.compatible(params, u(), u(), tuple(B))
    return params, eos, eq


def system_of(params, eos, eq):
    return build_system(derive_coefficients(params, eos, eq), eq, params)


@pytest.fixture(scope="session")
def ones_setup():
    params = PhysParams()
    return params, make_ideal_gas_eos(1.0, 1.0), Equilibrium.compatible(params, 1.0, 1.0, (1.0, 0.0, 0.0))


@pytest.fixture(scope="session")
def ones(ones_setup):
    return system_of(*ones_setup)


@pytest.fixture(scope="session")
def ones_nu0(ones_setup):
    params, eos, eq = ones_setup
    return system_of(params.replace(nu=0.0), eos, eq)
