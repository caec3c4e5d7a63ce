"""Matrices of the linearized system, its symmetrization and Fourier symbols.

State ordering is fixed throughout the package::

    0: r   1-3: u   4: T   5: e_r   6-8: b

The linearized system reads ``U_t + sum_j A_j U_j = D lap U - B U``; left
multiplication by the diagonal symmetrizer ``A0`` gives symmetric
``At_j = A0 A_j`` together with ``Dt = A0 D`` and ``Bt = A0 B``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonPositiveState
from .model import EOS, Equilibrium, LinCoeffs, PhysParams

N_STATE = 9
R, U, T, ER, B = 0, slice(1, 4), 4, 5, slice(6, 9)
LABELS = ("r", "u1", "u2", "u3", "T", "e_r", "b1", "b2", "b3")


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def flux_matrix(j: int, coeffs: LinCoeffs, B_bar, mu: float, rho_bar: float) -> np.ndarray:
    """Un-symmetrized flux matrix ``A_{j+1}`` for axis ``j`` in {0, 1, 2}."""
    Bb = np.asarray(B_bar, dtype=float)
    A = np.zeros((N_STATE, N_STATE))
    uj = 1 + j
    A[0, uj] = rho_bar
    A[uj, 0] = coeffs.alpha_p
    A[uj, T] = coeffs.beta_p
    A[uj, ER] = coeffs.beta_pp
    A[T, uj] = coeffs.gamma_p
    A[ER, uj] = coeffs.gamma_pp
    for i in range(3):
        if i == j:
            continue
        # momentum: B_bar x curl b / mu
        A[uj, 6 + i] = Bb[i] / mu
        A[1 + i, 6 + i] = -Bb[j] / mu
        # induction: B_bar div u - (B_bar . grad) u
        A[6 + i, uj] = Bb[i]
        A[6 + i, 1 + i] = -Bb[j]
    return A


@dataclass(frozen=True)
class SystemMatrices:
    A: np.ndarray       # (3, 9, 9)
    D: np.ndarray
    Brelax: np.ndarray
    A0: np.ndarray
    At: np.ndarray      # (3, 9, 9)
    Dt: np.ndarray
    Bt: np.ndarray
    params: PhysParams
    eq: Equilibrium
    coeffs: LinCoeffs

    @property
    def nu(self) -> float:
        return self.params.nu

    @property
    def a0_diag(self) -> np.ndarray:
        return np.diag(self.A0).copy()


def build_system(coeffs: LinCoeffs, eq: Equilibrium, params: PhysParams) -> SystemMatrices:
    c = coeffs
    mu = params.mu
    A = np.stack([flux_matrix(j, c, eq.B_bar, mu, eq.rho_bar) for j in range(3)])
    D = np.diag([0, 0, 0, 0, c.delta_p, c.delta_pp, params.lam, params.lam, params.lam])
    Bm = np.zeros((N_STATE, N_STATE))
    Bm[1, 1] = Bm[2, 2] = Bm[3, 3] = params.nu
    Bm[T, T] = c.zeta
    Bm[T, ER] = -c.eta
    Bm[ER, T] = -c.pi
    Bm[ER, ER] = params.sigma_a
    A0 = np.diag([mu * c.alpha_p / eq.rho_bar, mu, mu, mu,
                  mu * c.beta_p / c.gamma_p, mu * c.beta_pp / c.gamma_pp, 1.0, 1.0, 1.0])
    return SystemMatrices(
        A=_frozen(A), D=_frozen(D), Brelax=_frozen(Bm), A0=_frozen(A0),
        At=_frozen(A0 @ A), Dt=_frozen(A0 @ D), Bt=_frozen(A0 @ Bm),
        params=params, eq=eq, coeffs=coeffs,
    )


@dataclass(frozen=True)
class FourierSymbol:
    xi: np.ndarray
    Axi: np.ndarray
    Bxi: np.ndarray
    Exi: np.ndarray


def fourier_symbol(sys: SystemMatrices, xi) -> FourierSymbol:
    xi = np.asarray(xi, dtype=float).reshape(3)
    Axi = np.einsum("j,jab->ab", xi, sys.At)
    Bxi = sys.Bt + float(xi @ xi) * sys.Dt
    return FourierSymbol(xi=_frozen(xi), Axi=_frozen(Axi), Bxi=_frozen(Bxi), Exi=-Bxi - 1j * Axi)


def symbol_stack(sys: SystemMatrices, xis) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized ``(A(xi), B(xi))`` for an ``(N, 3)`` array of frequencies."""
    xis = np.asarray(xis, dtype=float).reshape(-1, 3)
    Axi = np.einsum("nj,jab->nab", xis, sys.At)
    Bxi = sys.Bt[None] + np.einsum("n,ab->nab", np.einsum("nj,nj->n", xis, xis), sys.Dt)
    return Axi, Bxi


def generator_stack(sys: SystemMatrices, xis) -> np.ndarray:
    """``A0^{-1} E(xi)`` for each row of ``xis``; shape ``(N, 9, 9)`` complex."""
    Axi, Bxi = symbol_stack(sys, xis)
    inv = 1.0 / np.diag(sys.A0)
    return inv[None, :, None] * (-Bxi - 1j * Axi)


@dataclass(frozen=True)
class AuditReport:
    bt_asymmetry: float            # each mirrored pair counted once
    bt_asymmetry_frobenius: float  # plain ||Bt - Bt^T||_F
    bt_sym_min_eig: float
    xi_magnitudes: tuple[float, ...]
    bxi_asymmetry: tuple[float, ...]
    bxi_sym_min_eig: tuple[float, ...]
    at_asymmetry: tuple[float, float, float]
    claims: dict

    def lines(self) -> list[str]:
        out = [
            f"Bt asymmetry defect: {self.bt_asymmetry:.17g}",
            f"Bt asymmetry (Frobenius): {self.bt_asymmetry_frobenius:.17g}",
            f"Bt symmetric-part min eigenvalue: {self.bt_sym_min_eig:.17g}",
        ]
        for m, d, e in zip(self.xi_magnitudes, self.bxi_asymmetry, self.bxi_sym_min_eig):
            out.append(f"B(xi) |xi|={m:g}: asymmetry {d:.17g}, symmetric-part min eigenvalue {e:.17g}")
        for j, d in enumerate(self.at_asymmetry, start=1):
            out.append(f"At_{j} relative asymmetry: {d:.3e}")
        for k, v in self.claims.items():
            out.append(f"claim {k}: {'holds' if v else 'FAILS'}")
        return out


def _sym_min_eig(M: np.ndarray) -> float:
    return float(np.linalg.eigvalsh(0.5 * (M + M.T))[0])


def consistency_audit(sys: SystemMatrices, magnitudes=(0.0, 1.0, 10.0)) -> AuditReport:
    """Measure symmetry and positivity of the dissipation matrices.

    Reports, never raises: the symmetric form of the relaxation block is an
    assertion about the model that is checked here, not assumed.
    """
    def defect(M):
        return float(np.linalg.norm(M - M.T) / np.sqrt(2.0))

    Bt = np.asarray(sys.Bt)
    scale = max(float(np.linalg.norm(Bt)), 1e-300)
    bxi_def, bxi_eig = [], []
    for m in magnitudes:
        Bxi = fourier_symbol(sys, (m, 0.0, 0.0)).Bxi
        bxi_def.append(defect(Bxi))
        bxi_eig.append(_sym_min_eig(Bxi))
    at_def = tuple(
        float(np.linalg.norm(At - At.T) / max(np.linalg.norm(At), 1e-300)) for At in sys.At
    )
    bt_def = defect(Bt)
    bt_eig = _sym_min_eig(Bt)
    claims = {
        "At_symmetric": all(d <= 1e-13 for d in at_def),
        "Bt_symmetric": bt_def <= 1e-12 * scale,
        "Bt_psd": bt_eig >= -1e-12 * scale,
        "Bxi_psd": all(e >= -1e-12 * max(scale, 1.0) for e in bxi_eig),
    }
    return AuditReport(
        bt_asymmetry=bt_def,
        bt_asymmetry_frobenius=float(np.linalg.norm(Bt - Bt.T)),
        bt_sym_min_eig=bt_eig,
        xi_magnitudes=tuple(float(m) for m in magnitudes),
        bxi_asymmetry=tuple(bxi_def),
        bxi_sym_min_eig=tuple(bxi_eig),
        at_asymmetry=at_def,
        claims=claims,
    )


@dataclass(frozen=True)
class NonlinearCoefficients:
    Ahat: np.ndarray   # (3, 9, 9)
    Dhat: np.ndarray
    Bhat: np.ndarray   # (9,)


def nonlinear_coefficients(V, params: PhysParams, eos: EOS, curl_B=(0.0, 0.0, 0.0)) -> NonlinearCoefficients:
    """Pointwise coefficient matrices of the quasilinear system for the full state.

    ``V = (rho, u1, u2, u3, theta, E_r, B1, B2, B3)``. The curl of ``B`` is not
    recoverable from a point value, so the caller supplies it.
    """
    V = np.asarray(V, dtype=float).reshape(N_STATE)
    rho, theta, Er = V[0], V[4], V[5]
    u = V[1:4]
    Bv = V[6:9]
    if rho <= 0 or theta <= 0:
        raise NonPositiveState(f"rho={rho!r}, theta={theta!r} must be positive")
    mu = params.mu
    p_rho = float(eos.p_rho(rho, theta))
    p_th = float(eos.p_theta(rho, theta))
    C_v = float(eos.e_theta(rho, theta))
    alpha = p_rho / rho
    beta = p_th / rho
    beta2 = 1.0 / (3.0 * rho)
    gamma = 3.0 * rho * p_th / (3.0 * rho * C_v)
    gamma2 = 4.0 / 3.0 * Er
    Ahat = np.zeros((3, N_STATE, N_STATE))
    for j in range(3):
        A = Ahat[j]
        uj = 1 + j
        A[0, uj] = rho
        A[uj, 0] = alpha
        A[uj, T] = beta
        A[uj, ER] = beta2
        A[T, uj] = gamma
        A[ER, uj] = gamma2
        A[ER, ER] = u[j]
        for i in range(3):
            A[6 + i, 6 + i] = u[j]
            if i == j:
                continue
            A[uj, 6 + i] = Bv[i] / (rho * mu)
            A[1 + i, 6 + i] = -Bv[j] / (rho * mu)
            A[6 + i, uj] = Bv[i]
            A[6 + i, 1 + i] = -Bv[j]
    Dhat = np.diag([0, 0, 0, 0, params.kappa / (rho * C_v), 1.0 / (3.0 * params.sigma_s),
                    params.lam, params.lam, params.lam])
    relax = params.a * theta**4 - Er
    curl = np.asarray(curl_B, dtype=float).reshape(3)
    Bhat = np.zeros(N_STATE)
    Bhat[1:4] = -params.nu * u / rho
    Bhat[T] = (-params.sigma_a / (rho * C_v) * relax
               + params.lam / mu * float(curl @ curl) / (rho * C_v)
               + params.nu * float(u @ u) / (rho * C_v))
    Bhat[ER] = params.sigma_a * relax
    return NonlinearCoefficients(Ahat=Ahat, Dhat=Dhat, Bhat=Bhat)
