"""Numerical compensating matrices ``K(omega) = sum_j omega_j K_j``.

Each ``K_j`` is stored through ``S_j = K_j A0``, a skew-symmetric matrix
parametrized by its 36 strictly-lower entries, so ``K(omega) A0`` is skew and
``K(-omega) = -K(omega)`` for every coefficient vector. The search maximizes

    min_omega  lambda_min( sym(K(omega) A(omega)) + sym(B(omega)) )

over a training lattice with a derivative-free coordinate search followed, each
sweep, by a golden-section search on an overall multiplier (the margin is a
concave function of that multiplier).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameter, NoCompensatorFound
from .stability import fibonacci_sphere
from .symbols import N_STATE, SystemMatrices, symbol_stack

log = logging.getLogger(__name__)

_LOWER = np.tril_indices(N_STATE, -1)
N_PARAMS = 3 * len(_LOWER[0])  # 108
TEST_OFFSET = 0.5 * (np.sqrt(5.0) - 1.0)  # rotation keeping test points off the training lattice


@dataclass(frozen=True)
class Compensator:
    K: np.ndarray          # (3, 9, 9)
    margin: float          # training margin
    A0: np.ndarray
    found: bool = True
    evaluations: int = 0

    @property
    def K1(self) -> np.ndarray:
        return self.K[0]

    @property
    def K2(self) -> np.ndarray:
        return self.K[1]

    @property
    def K3(self) -> np.ndarray:
        return self.K[2]

    def at(self, omega) -> np.ndarray:
        """``K(omega)``; accepts a single 3-vector or an ``(N, 3)`` stack."""
        omega = np.asarray(omega, dtype=float)
        return np.einsum("...j,jab->...ab", omega, self.K)


def skew_from_params(theta: np.ndarray) -> np.ndarray:
    S = np.zeros((3, N_STATE, N_STATE))
    theta = np.asarray(theta, dtype=float).reshape(3, -1)
    for j in range(3):
        S[j][_LOWER] = theta[j]
        S[j] = S[j] - S[j].T
    return S


def compensator_from_params(theta: np.ndarray, A0: np.ndarray) -> np.ndarray:
    return skew_from_params(theta) / np.diag(A0)[None, None, :]


def pointwise_margins(K: np.ndarray, sys: SystemMatrices, omegas: np.ndarray) -> np.ndarray:
    """``lambda_min(sym(K(w)A(w)) + sym(B(w)))`` for each row ``w``."""
    A, Bm = symbol_stack(sys, omegas)
    KA = np.einsum("nj,jab->nab", omegas, K) @ A
    H = 0.5 * (KA + KA.transpose(0, 2, 1)) + 0.5 * (Bm + Bm.transpose(0, 2, 1))
    return np.linalg.eigvalsh(H)[:, 0]


def _softmin(m: np.ndarray, tau: float) -> float:
    lo = float(m.min())
    return lo - tau * float(np.log(np.mean(np.exp(-(m - lo) / tau))))


class _Objective:
    """Margins as an affine function of the 108 parameters, precomputed per omega."""

    def __init__(self, sys: SystemMatrices, omegas: np.ndarray):
        A, Bm = symbol_stack(sys, omegas)
        self.base = 0.5 * (Bm + Bm.transpose(0, 2, 1))
        basis = np.zeros((N_PARAMS, 3, N_STATE, N_STATE))
        inv = 1.0 / np.diag(sys.A0)
        npj = len(_LOWER[0])
        for j in range(3):
            for q, (i, k) in enumerate(zip(*_LOWER)):
                basis[j * npj + q, j, i, k] = inv[k]
                basis[j * npj + q, j, k, i] = -inv[i]
        G = np.einsum("nj,pjab,nbc->pnac", omegas, basis, A)
        self.dirs = 0.5 * (G + G.transpose(0, 1, 3, 2))
        self.evaluations = 0

    def margins(self, H: np.ndarray) -> np.ndarray:
        self.evaluations += 1
        return np.linalg.eigvalsh(H)[:, 0]


def find_compensator(sys: SystemMatrices, n_train: int = 64, budget: int = 20000,
                     step0: float = 0.5, min_step: float = 1e-4,
                     raise_on_failure: bool = False) -> Compensator:
    """Search the linear-in-omega ansatz for a positive margin on ``n_train`` directions.

    ``budget`` caps the number of batched margin evaluations. A non-positive
    final margin is reported through ``found=False`` (or raised as
    :class:`NoCompensatorFound` when ``raise_on_failure`` is set).
    """
    if n_train < 12:
        raise InvalidParameter("n_train must be >= 12")
    omegas = fibonacci_sphere(n_train)
    obj = _Objective(sys, omegas)
    theta = np.zeros(N_PARAMS)
    H = obj.base.copy()
    m = obj.margins(H)
    best_theta, best_margin = theta.copy(), float(m.min())
    scale = max(float(np.max(np.abs(np.linalg.eigvalsh(obj.base)))), 1e-12)
    step = step0
    gr = 0.5 * (np.sqrt(5.0) - 1.0)

    def margin_at(c: float) -> float:
        return float(obj.margins(obj.base + c * (H - obj.base)).min())

    while step >= min_step and obj.evaluations < budget:
        tau = 0.1 * max(float(m.min()), 1e-3 * scale)
        f = _softmin(m, tau)
        improved = False
        for p in range(N_PARAMS):
            for sign in (1.0, -1.0):
                Hn = H + sign * step * obj.dirs[p]
                mn = obj.margins(Hn)
                fn = _softmin(mn, tau)
                if fn > f + 1e-15:
                    H, m, f = Hn, mn, fn
                    theta[p] += sign * step
                    improved = True
                    break
            if obj.evaluations >= budget:
                break
        # concave in the multiplier: golden section on [0, 4]
        lo, hi = 0.0, 4.0
        x1, x2 = hi - gr * (hi - lo), lo + gr * (hi - lo)
        f1, f2 = margin_at(x1), margin_at(x2)
        for _ in range(30):
            if f1 < f2:
                lo, x1, f1 = x1, x2, f2
                x2 = lo + gr * (hi - lo)
                f2 = margin_at(x2)
            else:
                hi, x2, f2 = x2, x1, f1
                x1 = hi - gr * (hi - lo)
                f1 = margin_at(x1)
        c = 0.5 * (lo + hi)
        if margin_at(c) > float(m.min()):
            H = obj.base + c * (H - obj.base)
            theta = c * theta
            m = obj.margins(H)
        if float(m.min()) > best_margin:
            best_theta, best_margin = theta.copy(), float(m.min())
        if not improved:
            step *= 0.5
        log.debug("step %.3g margin %.6g evals %d", step, m.min(), obj.evaluations)

    K = compensator_from_params(best_theta, sys.A0)
    margin = float(pointwise_margins(K, sys, omegas).min())
    found = margin > 0
    if not found and raise_on_failure:
        raise NoCompensatorFound(f"margin {margin:.3e} after {obj.evaluations} evaluations")
    return Compensator(K=K, margin=margin, A0=np.array(sys.A0), found=found, evaluations=obj.evaluations)


@dataclass(frozen=True)
class CompensatorCheck:
    margin: float
    skew_defect: float
    odd_defect: float
    n_test: int


def verify_compensator(comp: Compensator, sys: SystemMatrices, n_test: int = 500,
                       offset: float = TEST_OFFSET) -> CompensatorCheck:
    """Margin on a fresh rotated lattice, plus skewness and oddness defects."""
    omegas = fibonacci_sphere(n_test, offset=offset)
    margin = float(pointwise_margins(comp.K, sys, omegas).min())
    Kw = comp.at(omegas)
    KA0 = Kw @ np.asarray(sys.A0)
    skew = float(np.max(np.linalg.norm(KA0 + KA0.transpose(0, 2, 1), axis=(1, 2))))
    odd = float(np.max(np.abs(comp.at(-omegas) + Kw)))
    return CompensatorCheck(margin=margin, skew_defect=skew, odd_defect=odd, n_test=n_test)
