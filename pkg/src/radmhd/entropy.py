"""Helmholtz functionals, their coercivity constants and the entropy production terms.

Snapshots handed to the functionals here carry the *full* state
``V = (rho, u1, u2, u3, theta, E_r, B1, B2, B3)`` on the periodic grid (use
:func:`full_state` to lift a perturbation field). The radiative temperature is
always recovered as ``T_r = (E_r / a)^{1/4}``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameter, NonCoercive, NonPositiveState
from .model import EOS, Equilibrium, PhysParams
from .propagator import Field, wavenumbers

SAFETY = 1e-12  # relative widening applied to grid extrema so the sandwich holds after rounding


def _positive(name: str, *arrays) -> None:
    for arr in arrays:
        if np.any(~(np.asarray(arr) > 0)):
            raise NonPositiveState(f"{name} must be positive everywhere")


def helmholtz_matter(rho, theta, eos: EOS, theta_bar: float):
    """``rho (e - theta_bar s)``."""
    return rho * (eos.e(rho, theta) - theta_bar * eos.s(rho, theta))


def dH_drho_anchor(eos: EOS, eq: Equilibrium) -> float:
    """``d/drho [rho (e - theta_bar s)]`` at ``(rho_bar, theta_bar)``."""
    rho, th = eq.rho_bar, eq.theta_bar
    if eos.name == "ideal":
        consts = dict(eos.constants)
        R, C_v = consts["R"], consts["C_v"]
        return C_v * th - th * (C_v * np.log(th) - R * np.log(rho)) + th * R
    h = 1e-6 * rho
    return float((helmholtz_matter(rho + h, th, eos, th) - helmholtz_matter(rho - h, th, eos, th)) / (2 * h))


def relative_helmholtz_matter(rho, theta, eos: EOS, eq: Equilibrium):
    """Matter Helmholtz function minus its tangent in ``rho`` at the background state."""
    rho = np.asarray(rho, dtype=float)
    theta = np.asarray(theta, dtype=float)
    _positive("rho and theta", rho, theta)
    th = eq.theta_bar
    H0 = helmholtz_matter(eq.rho_bar, th, eos, th)
    return helmholtz_matter(rho, theta, eos, th) - (rho - eq.rho_bar) * dH_drho_anchor(eos, eq) - H0


def radiation_helmholtz(T_r, a: float, theta_bar: float):
    """``E_r - theta_bar S_r`` with ``E_r = a T^4`` and ``S_r = 4/3 a T^3``."""
    T_r = np.asarray(T_r, dtype=float)
    return a * T_r**4 - theta_bar * (4.0 / 3.0) * a * T_r**3


def relative_helmholtz_radiation(T_r, a: float, theta_bar: float):
    T_r = np.asarray(T_r, dtype=float)
    _positive("T_r", T_r)
    return a * T_r**4 - theta_bar * (4.0 / 3.0) * a * T_r**3 + (a / 3.0) * theta_bar**4


@dataclass(frozen=True)
class HelmholtzPair:
    eos: EOS
    eq: Equilibrium
    a: float

    @property
    def anchors(self) -> tuple[float, float, float]:
        return (self.eq.rho_bar, self.eq.theta_bar, self.eq.theta_bar)

    def matter(self, rho, theta):
        return helmholtz_matter(rho, theta, self.eos, self.eq.theta_bar)

    def radiation(self, T_r):
        return radiation_helmholtz(T_r, self.a, self.eq.theta_bar)

    def relative_matter(self, rho, theta):
        return relative_helmholtz_matter(rho, theta, self.eos, self.eq)

    def relative_radiation(self, T_r):
        return relative_helmholtz_radiation(T_r, self.a, self.eq.theta_bar)


@dataclass(frozen=True)
class CoercivityConstants:
    C1: float
    C2: float
    C3: float
    C4: float
    O1: tuple[tuple[float, float], tuple[float, float]]
    O2: tuple[float, float]
    grid_n: int
    matter_anchor_limits: tuple[float, float]
    radiation_anchor_limit: float


def inset_grid(lo: float, hi: float, n: int) -> np.ndarray:
    """``n`` cell midpoints of ``(lo, hi)``: the open interval inset by half a cell."""
    return lo + (hi - lo) * (np.arange(n) + 0.5) / n


def matter_anchor_limits(eos: EOS, eq: Equilibrium) -> tuple[float, float]:
    """Range of the ratio functional/distance^2 as ``(rho, theta) -> anchor``.

    For a Gibbs-consistent EOS the Hessian at the anchor is
    ``diag(p_rho / rho, rho e_theta / theta)``; the limit ratio lies between half
    its eigenvalues.
    """
    h = np.array([eos.p_rho(eq.rho_bar, eq.theta_bar) / eq.rho_bar,
                  eq.rho_bar * eos.e_theta(eq.rho_bar, eq.theta_bar) / eq.theta_bar], dtype=float)
    return float(h.min() / 2), float(h.max() / 2)


def radiation_anchor_limit(a: float, theta_bar: float) -> float:
    # second derivative of the quartic at theta_bar is 12 a th^2 - 8 a th^2
    return 2.0 * a * theta_bar**2


def matter_ratio_grid(eos: EOS, eq: Equilibrium, grid_n: int):
    rho = inset_grid(eq.rho_bar / 2, 2 * eq.rho_bar, grid_n)
    theta = inset_grid(eq.theta_bar / 2, 2 * eq.theta_bar, grid_n)
    R, Th = np.meshgrid(rho, theta, indexing="ij")
    dist2 = (R - eq.rho_bar) ** 2 + (Th - eq.theta_bar) ** 2
    return R, Th, relative_helmholtz_matter(R, Th, eos, eq), dist2


def radiation_ratio_grid(a: float, theta_bar: float, grid_n: int):
    T = inset_grid(theta_bar / 2, 2 * theta_bar, grid_n)
    return T, relative_helmholtz_radiation(T, a, theta_bar), (T - theta_bar) ** 2


def coercivity_constants(eos: EOS, eq: Equilibrium, a: float, grid_n: int = 1024) -> CoercivityConstants:
    """Grid certificates for the quadratic sandwich of both relative functionals.

    Lower constants are the grid infimum of functional/distance^2 (together with
    the anchor limit), upper constants the supremum; both are widened by a
    relative 1e-12 so that the sandwich holds at every grid point after rounding.
    """
    if grid_n < 16:
        raise InvalidParameter("grid_n must be >= 16")
    _, _, Hm, dm = matter_ratio_grid(eos, eq, grid_n)
    ratio_m = Hm / dm
    lim_m = matter_anchor_limits(eos, eq)
    C1 = min(float(ratio_m.min()), lim_m[0])
    C2 = max(float(ratio_m.max()), lim_m[1])
    _, Hr, dr = radiation_ratio_grid(a, eq.theta_bar, grid_n)
    ratio_r = Hr / dr
    lim_r = radiation_anchor_limit(a, eq.theta_bar)
    C3 = min(float(ratio_r.min()), lim_r)
    C4 = max(float(ratio_r.max()), lim_r)
    if C1 <= 0 or C3 <= 0:
        raise NonCoercive(f"non-positive coercivity infimum: C1={C1!r}, C3={C3!r}")
    return CoercivityConstants(
        C1=C1 * (1 - SAFETY), C2=C2 * (1 + SAFETY), C3=C3 * (1 - SAFETY), C4=C4 * (1 + SAFETY),
        O1=((eq.rho_bar / 2, 2 * eq.rho_bar), (eq.theta_bar / 2, 2 * eq.theta_bar)),
        O2=(eq.theta_bar / 2, 2 * eq.theta_bar),
        grid_n=grid_n, matter_anchor_limits=lim_m, radiation_anchor_limit=lim_r,
    )


def sandwich_violations(cc: CoercivityConstants, eos: EOS, eq: Equilibrium, a: float,
                        grid_n: int | None = None) -> int:
    """Number of grid points of O1 and O2 where the quadratic sandwich fails."""
    n = cc.grid_n if grid_n is None else grid_n
    _, _, Hm, dm = matter_ratio_grid(eos, eq, n)
    _, Hr, dr = radiation_ratio_grid(a, eq.theta_bar, n)
    bad = np.sum(cc.C1 * dm > Hm) + np.sum(Hm > cc.C2 * dm)
    bad += np.sum(cc.C3 * dr > Hr) + np.sum(Hr > cc.C4 * dr)
    return int(bad)


def full_state(perturbation: Field, eq: Equilibrium) -> Field:
    """Add the background state to a perturbation field ``(r, u, T, e_r, b)``."""
    data = perturbation.data.copy()
    data[0] += eq.rho_bar
    data[4] += eq.theta_bar
    data[5] += eq.Er_bar
    data[6:9] += eq.B[:, None, None, None]
    return Field(perturbation.n, perturbation.L, data)


def uniform_state(n: int, L: float, rho, u, theta, Er, B) -> Field:
    data = np.empty((9, n, n, n))
    values = [rho, *np.reshape(u, 3), theta, Er, *np.reshape(B, 3)]
    for i, v in enumerate(values):
        data[i] = v
    return Field(n, float(L), data)


def radiative_temperature(Er, a: float):
    Er = np.asarray(Er, dtype=float)
    _positive("E_r", Er)
    return (Er / a) ** 0.25


def relative_entropy_eta(state: Field, eos: EOS, eq: Equilibrium, params: PhysParams,
                         extended: bool = False) -> float:
    """Box integral of the relative entropy density (midpoint rule on the grid).

    With ``extended`` the kinetic ``rho |u|^2 / 2`` and magnetic ``|B|^2 / (2 mu)``
    energies are added to the integrand.
    """
    V = state.data
    rho, theta = V[0], V[4]
    _positive("rho and theta", rho, theta)
    T_r = radiative_temperature(V[5], params.a)
    dens = relative_helmholtz_matter(rho, theta, eos, eq)
    dens = dens + relative_helmholtz_radiation(T_r, params.a, eq.theta_bar)
    if extended:
        dens = dens + 0.5 * rho * np.sum(V[1:4] ** 2, axis=0) + np.sum(V[6:9] ** 2, axis=0) / (2 * params.mu)
    return float(np.sum(dens) * state.cell_volume)


def spectral_gradient(f: np.ndarray, L: float) -> np.ndarray:
    """``(3, n, n, n)`` spectral gradient of a periodic scalar sample."""
    n = f.shape[0]
    k = wavenumbers(n, L)
    fh = np.fft.fftn(f)
    return np.fft.ifftn(1j * k * fh[None], axes=(1, 2, 3)).real


def spectral_curl(B: np.ndarray, L: float) -> np.ndarray:
    n = B.shape[1]
    k = wavenumbers(n, L)
    Bh = np.fft.fftn(B, axes=(1, 2, 3))
    curl = 1j * np.stack([k[1] * Bh[2] - k[2] * Bh[1], k[2] * Bh[0] - k[0] * Bh[2], k[0] * Bh[1] - k[1] * Bh[0]])
    return np.fft.ifftn(curl, axes=(1, 2, 3)).real


@dataclass(frozen=True)
class EntropyProduction:
    heat: float
    radiative: float
    relaxation: float
    ohmic: float
    damping: float
    radiative_Er_form: float

    def terms(self) -> dict[str, float]:
        return {"heat": self.heat, "radiative": self.radiative, "relaxation": self.relaxation,
                "ohmic": self.ohmic, "damping": self.damping}

    @property
    def total(self) -> float:
        return sum(self.terms().values())


def production_densities(state: Field, params: PhysParams, gradients: dict | None = None) -> dict[str, np.ndarray]:
    """Pointwise entropy production densities.

    ``gradients`` may supply ``grad_theta``, ``grad_Tr``, ``grad_Er`` (each
    ``(3, n, n, n)``) and ``curl_B``; missing entries are computed spectrally.
    """
    V = state.data
    theta = V[4]
    _positive("theta", theta)
    T_r = radiative_temperature(V[5], params.a)
    g = dict(gradients or {})
    if "grad_theta" not in g:
        g["grad_theta"] = spectral_gradient(theta, state.L)
    if "grad_Tr" not in g:
        g["grad_Tr"] = spectral_gradient(T_r, state.L)
    if "grad_Er" not in g:
        g["grad_Er"] = spectral_gradient(V[5], state.L)
    if "curl_B" not in g:
        g["curl_B"] = spectral_curl(V[6:9], state.L)
    sq = lambda v: np.sum(np.asarray(v) ** 2, axis=0)  # noqa: E731
    a, p = params.a, params
    return {
        "heat": p.kappa * sq(g["grad_theta"]) / theta**2,
        "radiative": 4 * a / (3 * p.sigma_s) * T_r * sq(g["grad_Tr"]),
        "radiative_Er_form": 4 * a / (3 * p.sigma_s) * T_r * sq(g["grad_Er"]),
        "relaxation": a * p.sigma_a * (theta - T_r) ** 2 * (theta + T_r) * (theta**2 + T_r**2) / (theta * T_r),
        "ohmic": sq(g["curl_B"]) / (p.sigma * p.mu**2 * theta),
        "damping": p.nu * sq(V[1:4]) / theta,
    }


def entropy_production(state: Field, params: PhysParams, gradients: dict | None = None) -> EntropyProduction:
    """Box integrals of the five sign-definite production terms (midpoint rule).

    The radiative diffusion term uses ``|grad T_r|^2``; the variant written with
    ``|grad E_r|^2`` is reported alongside as ``radiative_Er_form``.
    """
    dens = production_densities(state, params, gradients)
    dv = state.cell_volume
    return EntropyProduction(**{k: float(np.sum(v) * dv) for k, v in dens.items()})
