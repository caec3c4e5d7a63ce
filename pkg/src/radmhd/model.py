"""Physical parameters, equation of state, background state and the
linearization coefficients of the radiative Euler-MHD system.

Every object here is an immutable value; all functions are pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import CompatibilityViolation, InvalidParameter, NonPositiveState

Scalar = Callable[..., np.ndarray]


@dataclass(frozen=True)
class PhysParams:
    """Constant transport and material coefficients.

    ``lam`` is the magnetic diffusivity ``1 / (mu * sigma)``; it is derived,
    never supplied.
    """

    mu: float = 1.0
    sigma: float = 1.0
    sigma_a: float = 1.0
    sigma_s: float = 1.0
    a: float = 1.0
    kappa: float = 1.0
    nu: float = 1.0
    lam: float = field(init=False)

    def __post_init__(self) -> None:
        for name in ("mu", "sigma", "sigma_a", "sigma_s", "a", "kappa"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise InvalidParameter(f"{name} must be a positive finite number, got {value!r}")
        if not (np.isfinite(self.nu) and self.nu >= 0):
            raise InvalidParameter(f"nu must be >= 0, got {self.nu!r}")
        object.__setattr__(self, "lam", 1.0 / (self.mu * self.sigma))

    def replace(self, **changes: float) -> "PhysParams":
        values = {k: getattr(self, k) for k in ("mu", "sigma", "sigma_a", "sigma_s", "a", "kappa", "nu")}
        values.update(changes)
        return PhysParams(**values)


@dataclass(frozen=True)
class EOS:
    """Pressure/energy closure with exact partial derivatives.

    All callables take ``(rho, theta)`` and broadcast over numpy arrays.
    ``s`` is the specific entropy, assumed Gibbs-consistent with ``p`` and ``e``.
    """

    name: str
    p: Scalar
    e: Scalar
    s: Scalar
    p_rho: Scalar
    p_theta: Scalar
    e_theta: Scalar
    e_rho: Scalar
    constants: tuple[tuple[str, float], ...] = ()

    def C_v(self, rho, theta):
        return self.e_theta(rho, theta)

    def check_monotone(self, rho_bar: float, theta_bar: float, n: int = 32) -> bool:
        """Sample ``p_rho > 0`` and ``e_theta > 0`` on [rho/2, 2rho] x [theta/2, 2theta]."""
        rho, theta = _rectangle(rho_bar, theta_bar, n)
        return bool(np.all(self.p_rho(rho, theta) > 0) and np.all(self.e_theta(rho, theta) > 0))

    def derivative_defects(self, rho_bar: float, theta_bar: float, n: int = 8) -> dict[str, float]:
        """Largest relative mismatch between supplied derivatives and central differences."""
        rho, theta = _rectangle(rho_bar, theta_bar, n)
        hr = 1e-5 * rho
        ht = 1e-5 * theta
        fd = {
            "p_rho": (self.p(rho + hr, theta) - self.p(rho - hr, theta)) / (2 * hr),
            "p_theta": (self.p(rho, theta + ht) - self.p(rho, theta - ht)) / (2 * ht),
            "e_theta": (self.e(rho, theta + ht) - self.e(rho, theta - ht)) / (2 * ht),
            "e_rho": (self.e(rho + hr, theta) - self.e(rho - hr, theta)) / (2 * hr),
        }
        out = {}
        for key, approx in fd.items():
            exact = getattr(self, key)(rho, theta) * np.ones_like(rho)
            scale = np.maximum(np.abs(exact), np.max(np.abs(exact)) * 1e-3 + 1e-300)
            out[key] = float(np.max(np.abs(approx - exact) / scale))
        return out


def _rectangle(rho_bar: float, theta_bar: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    r = np.linspace(rho_bar / 2, 2 * rho_bar, n)
    t = np.linspace(theta_bar / 2, 2 * theta_bar, n)
    return np.meshgrid(r, t, indexing="ij")


def make_ideal_gas_eos(R: float = 1.0, C_v: float = 1.0) -> EOS:
    """Ideal gas ``p = R rho theta``, ``e = C_v theta``, ``s = C_v ln theta - R ln rho``."""
    if not (R > 0 and C_v > 0):
        raise InvalidParameter(f"ideal gas needs R > 0 and C_v > 0, got R={R!r}, C_v={C_v!r}")
    R = float(R)
    C_v = float(C_v)
    return EOS(
        name="ideal",
        p=lambda rho, theta: R * rho * theta,
        e=lambda rho, theta: C_v * theta + 0.0 * rho,
        s=lambda rho, theta: C_v * np.log(theta) - R * np.log(rho),
        p_rho=lambda rho, theta: R * theta + 0.0 * rho,
        p_theta=lambda rho, theta: R * rho + 0.0 * theta,
        e_theta=lambda rho, theta: C_v + 0.0 * (rho * theta),
        e_rho=lambda rho, theta: 0.0 * (rho * theta),
        constants=(("R", R), ("C_v", C_v)),
    )


def make_cold_pressure_eos(R: float = 1.0, C_v: float = 1.0, K: float = 1.0, gamma: float = 2.0) -> EOS:
    """Ideal gas plus a barotropic cold part: ``p = R rho theta + K rho**gamma``.

    The matching energy ``e = C_v theta + K rho**(gamma-1) / (gamma-1)`` keeps the
    ideal-gas entropy, so the Gibbs relation still holds.
    """
    if not (R > 0 and C_v > 0 and K >= 0 and gamma > 1):
        raise InvalidParameter("cold-pressure EOS needs R, C_v > 0, K >= 0, gamma > 1")
    R, C_v, K, g = float(R), float(C_v), float(K), float(gamma)
    return EOS(
        name="cold_pressure",
        p=lambda rho, theta: R * rho * theta + K * rho**g,
        e=lambda rho, theta: C_v * theta + K * rho ** (g - 1) / (g - 1),
        s=lambda rho, theta: C_v * np.log(theta) - R * np.log(rho),
        p_rho=lambda rho, theta: R * theta + K * g * rho ** (g - 1),
        p_theta=lambda rho, theta: R * rho + 0.0 * theta,
        e_theta=lambda rho, theta: C_v + 0.0 * (rho * theta),
        e_rho=lambda rho, theta: K * rho ** (g - 2) + 0.0 * theta,
        constants=(("R", R), ("C_v", C_v), ("K", K), ("gamma", g)),
    )


@dataclass(frozen=True)
class Equilibrium:
    """Constant background state ``(rho_bar, 0, theta_bar, Er_bar, B_bar)``."""

    rho_bar: float
    theta_bar: float
    Er_bar: float
    B_bar: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self) -> None:
        B = tuple(float(b) for b in self.B_bar)
        if len(B) != 3:
            raise InvalidParameter("B_bar must have three components")
        object.__setattr__(self, "B_bar", B)

    @classmethod
    def compatible(cls, params: PhysParams, rho_bar: float, theta_bar: float,
                   B_bar=(0.0, 0.0, 0.0)) -> "Equilibrium":
        """Background state with ``Er_bar = a theta_bar**4``."""
        return cls(float(rho_bar), float(theta_bar), params.a * float(theta_bar) ** 4, tuple(B_bar))

    @property
    def B(self) -> np.ndarray:
        return np.array(self.B_bar, dtype=float)


def validate_equilibrium(params: PhysParams, eq: Equilibrium) -> Equilibrium:
    if not (eq.rho_bar > 0 and eq.theta_bar > 0):
        raise NonPositiveState(f"rho_bar={eq.rho_bar!r}, theta_bar={eq.theta_bar!r} must be positive")
    target = params.a * eq.theta_bar**4
    if abs(eq.Er_bar - target) > 1e-12 * target:
        raise CompatibilityViolation(f"Er_bar={eq.Er_bar!r} differs from a*theta_bar^4={target!r}")
    return eq


@dataclass(frozen=True)
class LinCoeffs:
    alpha_p: float
    beta_p: float
    beta_pp: float
    gamma_p: float
    gamma_pp: float
    delta_p: float
    delta_pp: float
    zeta: float
    eta: float
    pi: float

    def as_dict(self) -> dict[str, float]:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}

    def all_positive(self) -> bool:
        return all(v > 0 for v in self.as_dict().values())


def derive_coefficients(params: PhysParams, eos: EOS, eq: Equilibrium) -> LinCoeffs:
    """Coefficients of the system linearized about ``eq``.

    The EOS derivatives are evaluated at ``(rho_bar, theta_bar)``.
    """
    validate_equilibrium(params, eq)
    rho, th = eq.rho_bar, eq.theta_bar
    p_rho = float(eos.p_rho(rho, th))
    p_th = float(eos.p_theta(rho, th))
    C_v = float(eos.e_theta(rho, th))
    if not all(math.isfinite(v) for v in (p_rho, p_th, C_v)):
        raise InvalidParameter(f"EOS evaluation at ({rho}, {th}) is not finite")
    four_a_sa_th3 = 4.0 * params.a * params.sigma_a * th**3
    return LinCoeffs(
        alpha_p=p_rho / rho,
        beta_p=p_th / rho,
        beta_pp=1.0 / (3.0 * rho),
        gamma_p=p_th / C_v,
        gamma_pp=4.0 / 3.0 * eq.Er_bar,
        delta_p=params.kappa / (rho * C_v),
        delta_pp=1.0 / (3.0 * params.sigma_s),
        zeta=four_a_sa_th3 / (rho * C_v),
        eta=params.sigma_a / (rho * C_v),
        pi=four_a_sa_th3,
    )
