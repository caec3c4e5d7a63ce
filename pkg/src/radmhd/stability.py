"""Shizuta-Kawashima and Kalman checks, decay-rate mapping.

The hyperbolic symbol is handled through the symmetric-definite pencil
``A(xi) X = lam A0 X``; since ``A0`` is diagonal and positive, the substitution
``Y = A0^{1/2} X`` turns it into an ordinary symmetric eigenproblem.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DampingPresent, EigenFailure, InvalidParameter
from .symbols import SystemMatrices, fourier_symbol, generator_stack

ANGLE_TOL = 1e-8
CLUSTER_RTOL = 1e-8
KERNEL_RTOL = 1e-10
GOLDEN_ANGLE = np.pi * (3.0 - np.sqrt(5.0))
AXES = np.array([[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0], [0, 0, 1], [0, 0, -1]], dtype=float)


def fibonacci_sphere(n: int, offset: float = 0.0) -> np.ndarray:
    """Deterministic, nearly uniform ``(n, 3)`` unit vectors.

    ``offset`` rotates the lattice about the z axis, giving a disjoint sample
    of the same quality.
    """
    if n < 1:
        return np.zeros((0, 3))
    k = np.arange(n)
    z = 1.0 - (2.0 * k + 1.0) / n
    r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    phi = GOLDEN_ANGLE * k + offset
    return np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=1)


def _unit(xi) -> np.ndarray:
    xi = np.asarray(xi, dtype=float).reshape(3)
    if abs(np.linalg.norm(xi) - 1.0) > 1e-12:
        raise InvalidParameter(f"xi must be a unit vector, |xi| = {np.linalg.norm(xi)!r}")
    return xi


def _null_space(M: np.ndarray, rtol: float) -> np.ndarray:
    _, sv, vh = np.linalg.svd(M)
    smax = sv[0] if sv.size else 0.0
    rank = int(np.sum(sv > rtol * smax)) if smax > 0 else 0
    return vh[rank:].conj().T


def _clusters(w: np.ndarray, tol: float) -> list[np.ndarray]:
    groups, start = [], 0
    for k in range(1, len(w) + 1):
        if k == len(w) or w[k] - w[k - 1] > tol:
            groups.append(np.arange(start, k))
            start = k
    return groups


def min_principal_angle(Q1: np.ndarray, Q2: np.ndarray) -> float:
    """Smallest principal angle between the spans of orthonormal ``Q1`` and ``Q2``.

    Computed from sines (the residual of projecting the smaller basis onto the
    larger span), which stays accurate for angles far below sqrt(eps).
    """
    if Q1.shape[1] < Q2.shape[1]:
        Q1, Q2 = Q2, Q1
    resid = Q2 - Q1 @ (Q1.conj().T @ Q2)
    sines = np.linalg.svd(resid, compute_uv=False)
    cosines = np.linalg.svd(Q1.conj().T @ Q2, compute_uv=False)
    s_min = float(np.clip(sines[-1], 0.0, 1.0))
    if s_min < 0.5:
        return float(np.arcsin(s_min))
    return float(np.arccos(np.clip(cosines[0], -1.0, 1.0)))


def hyperbolic_eigh(sys: SystemMatrices, xi) -> tuple[np.ndarray, np.ndarray]:
    """Eigenpairs of ``A0^{-1} A(xi)``; eigenvectors are A0-orthonormal columns."""
    sym = fourier_symbol(sys, xi)
    s = 1.0 / np.sqrt(np.diag(sys.A0))
    try:
        w, Y = np.linalg.eigh(s[:, None] * sym.Axi * s[None, :])
    except np.linalg.LinAlgError as exc:
        raise EigenFailure(str(exc)) from exc
    return w, s[:, None] * Y


@dataclass(frozen=True)
class SKReport:
    xi: np.ndarray
    holds: bool
    min_angle: float
    witness: tuple[float, np.ndarray] | None = None
    kernel_dim: int = 0

    def witness_residuals(self, sys: SystemMatrices) -> tuple[float, float]:
        if self.witness is None:
            return (0.0, 0.0)
        lam, X = self.witness
        sym = fourier_symbol(sys, self.xi)
        return (float(np.linalg.norm(sym.Axi @ X - lam * sys.A0 @ X)),
                float(np.linalg.norm(sym.Bxi @ X)))


def sk_check(sys: SystemMatrices, xi, angle_tol: float = ANGLE_TOL) -> SKReport:
    """Test whether some eigenvector of ``A0^{-1}A(xi)`` lies in ``ker B(xi)``.

    The intersection is measured by the smallest principal angle between each
    eigenspace (eigenvalues grouped within ``1e-8 * spectral radius``) and the
    numerical kernel of ``B(xi)``.
    """
    xi = _unit(xi)
    w, X = hyperbolic_eigh(sys, xi)
    kernel = _null_space(fourier_symbol(sys, xi).Bxi, KERNEL_RTOL)
    if kernel.shape[1] == 0:
        return SKReport(xi=xi, holds=True, min_angle=float(np.pi / 2), kernel_dim=0)
    tol = CLUSTER_RTOL * max(float(np.max(np.abs(w))), 1e-300)
    best_angle, best = np.inf, None
    for idx in _clusters(w, tol):
        Q, _ = np.linalg.qr(X[:, idx])
        angle = min_principal_angle(Q, kernel)
        if angle < best_angle:
            best_angle, best = angle, (idx, Q)
    holds = best_angle > angle_tol
    witness = None
    if not holds:
        idx, Q = best
        u, _, _ = np.linalg.svd(Q.T @ kernel)
        vec = Q @ u[:, 0]
        vec /= np.linalg.norm(vec)
        witness = (float(np.mean(w[idx])), vec)
    return SKReport(xi=xi, holds=holds, min_angle=best_angle, witness=witness, kernel_dim=kernel.shape[1])


def adversarial_directions(B_bar, count: int = 4) -> np.ndarray:
    """Unit vectors on the great circle orthogonal to ``B_bar``."""
    Bb = np.asarray(B_bar, dtype=float)
    nb = np.linalg.norm(Bb)
    if nb == 0:
        return np.zeros((0, 3))
    n = Bb / nb
    e1 = _orthogonal_basis(n)[0]
    e2 = np.cross(n, e1)
    t = np.pi * np.arange(count) / count
    dirs = np.cos(t)[:, None] * e1 + np.sin(t)[:, None] * e2
    return dirs / np.linalg.norm(dirs, axis=1, keepdims=True)


def _orthogonal_basis(xi: np.ndarray) -> list[np.ndarray]:
    # project the two axes least aligned with xi; keeps axis-aligned inputs axis-aligned
    n = xi / np.linalg.norm(xi)
    order = np.argsort(np.abs(n), kind="stable")
    out = []
    for i in order[:2]:
        v = np.eye(3)[i] - n[i] * n
        for b in out:
            v = v - (b @ v) * b
        out.append(v / np.linalg.norm(v))
    return out


@dataclass(frozen=True)
class SKSweep:
    holds_everywhere: bool
    worst_min_angle: float
    directions: np.ndarray
    reports: tuple[SKReport, ...] = field(repr=False)

    @property
    def n_checks(self) -> int:
        return len(self.reports)


def sweep_directions(sys: SystemMatrices, n_dirs: int) -> np.ndarray:
    parts = [fibonacci_sphere(n_dirs), AXES]
    if sys.nu == 0:
        parts.append(adversarial_directions(sys.eq.B_bar))
    return np.concatenate(parts)


def sk_sweep(sys: SystemMatrices, n_dirs: int = 200) -> SKSweep:
    """Run ``sk_check`` over a Fibonacci lattice, the six axis directions and,
    for ``nu == 0``, directions orthogonal to the background field."""
    if n_dirs < 1:
        raise InvalidParameter("n_dirs must be >= 1")
    dirs = sweep_directions(sys, n_dirs)
    reports = tuple(sk_check(sys, d) for d in dirs)
    worst = min(r.min_angle for r in reports)
    return SKSweep(all(r.holds for r in reports), worst, dirs, reports)


def kernel_eigenpairs_nu0(sys: SystemMatrices, xi, B_bar=None) -> list[tuple[float, np.ndarray]]:
    """Explicit zero-eigenvalue eigenvectors of ``A(xi)`` inside ``ker B(xi)`` for ``nu = 0``.

    They exist exactly when ``xi . B_bar = 0``: any velocity perturbation
    orthogonal to ``xi`` is then invisible to both symbols.
    """
    if sys.nu > 0:
        raise DampingPresent(f"nu = {sys.nu!r} > 0; the velocity block is damped")
    xi = np.asarray(xi, dtype=float).reshape(3)
    Bb = sys.eq.B if B_bar is None else np.asarray(B_bar, dtype=float)
    if abs(xi @ Bb) > 1e-12 * max(1.0, float(np.linalg.norm(Bb)) * float(np.linalg.norm(xi))):
        return []
    pairs = []
    for v in _orthogonal_basis(xi):
        X = np.zeros(9)
        X[1:4] = v
        pairs.append((0.0, X))
    return pairs


def kalman_rank(sys: SystemMatrices, xi, rtol: float = 1e-10) -> int:
    """Numerical rank of ``[B; B M; ...; B M^8]`` with ``M = A0^{-1} A(xi)``.

    ``M`` and ``B`` are normalized to unit spectral norm first; the rank is
    unchanged in exact arithmetic and the powers stay O(1).
    """
    xi = _unit(xi)
    sym = fourier_symbol(sys, xi)
    M = sym.Axi / np.diag(sys.A0)[:, None]
    Bm = np.array(sym.Bxi)
    nb = np.linalg.norm(Bm, 2)
    if nb == 0:
        return 0
    nm = np.linalg.norm(M, 2)
    if nm > 0:
        M = M / nm
    Bm = Bm / nb
    blocks, cur = [], Bm
    for _ in range(9):
        blocks.append(cur)
        cur = cur @ M
    sv = np.linalg.svd(np.vstack(blocks), compute_uv=False)
    return int(np.sum(sv > rtol * sv[0]))


@dataclass(frozen=True)
class DecayPoint:
    xi: np.ndarray
    abscissa: float
    cond: float


def decay_points(sys: SystemMatrices, xis: np.ndarray) -> list[DecayPoint]:
    G = generator_stack(sys, xis)
    try:
        w, V = np.linalg.eig(G)
    except np.linalg.LinAlgError as exc:
        raise EigenFailure(str(exc)) from exc
    sv = np.linalg.svd(V, compute_uv=False)
    out = []
    for xi, lam, s in zip(xis, w, sv):
        cond = np.inf if s[-1] < 1e-8 * s[0] else float(s[0] / s[-1])
        out.append(DecayPoint(xi=np.array(xi, dtype=float), abscissa=float(np.max(lam.real)), cond=cond))
    return out


def spectral_abscissa(sys: SystemMatrices, xi) -> DecayPoint:
    """Largest real part of the spectrum of ``A0^{-1} E(xi)``, with eigenvector conditioning."""
    return decay_points(sys, np.asarray(xi, dtype=float).reshape(1, 3))[0]


def loglog_slope(magnitudes, abscissas) -> float:
    """Least-squares slope of ``log|abscissa|`` against ``log|xi|``."""
    x = np.log(np.asarray(magnitudes, dtype=float))
    y = np.log(np.abs(np.asarray(abscissas, dtype=float)))
    return float(np.polyfit(x, y, 1)[0])


@dataclass(frozen=True)
class DecayMap:
    points: tuple[DecayPoint, ...]
    magnitudes: np.ndarray
    directions: np.ndarray
    slopes: tuple[float, ...]      # per direction, lowest decade
    plateaus: tuple[float, ...]    # per direction, abscissa at the largest magnitude

    def rows(self):
        for p in self.points:
            yield (*p.xi, p.abscissa, p.cond)


def decay_map(sys: SystemMatrices, magnitudes, directions) -> DecayMap:
    """Abscissa over a Cartesian grid of magnitudes x unit directions.

    Points are ordered by direction index, then magnitude.
    """
    mags = np.sort(np.asarray(magnitudes, dtype=float).ravel())
    dirs = np.asarray(directions, dtype=float).reshape(-1, 3)
    if np.any(mags <= 0):
        raise InvalidParameter("magnitudes must be positive")
    if mags.size == 0 or dirs.size == 0:
        return DecayMap((), mags, dirs, (), ())
    dirs = dirs / np.linalg.norm(dirs, axis=1, keepdims=True)
    xis = (dirs[:, None, :] * mags[None, :, None]).reshape(-1, 3)
    points = decay_points(sys, xis)
    slopes, plateaus = [], []
    low = mags <= mags[0] * 10.0 * (1 + 1e-12)
    for d in range(len(dirs)):
        ab = np.array([p.abscissa for p in points[d * mags.size:(d + 1) * mags.size]])
        slopes.append(loglog_slope(mags[low], ab[low]) if low.sum() >= 2 else float("nan"))
        plateaus.append(float(ab[-1]))
    return DecayMap(tuple(points), mags, dirs, tuple(slopes), tuple(plateaus))
