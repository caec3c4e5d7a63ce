"""Exact-in-time linear evolution on a periodic box.

Every Fourier mode ``k`` evolves by ``exp(t A0^{-1} E(k))``; outputs are always
advanced from ``t = 0`` so nothing accumulates between snapshots. Grid data is
stored as ``(9, n, n, n)`` arrays indexed ``[component, x, y, z]`` and the
numpy FFT convention is used (a derivative is multiplication by ``i k``).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import GridTooSmall, InvalidParameter
from .expm import expm
from .symbols import N_STATE, SystemMatrices, generator_stack

CHUNK = 8192


@dataclass(frozen=True)
class Field:
    n: int
    L: float
    data: np.ndarray  # (9, n, n, n), real

    def __post_init__(self) -> None:
        if self.n < 4:
            raise GridTooSmall(f"n = {self.n} < 4")
        if self.n & (self.n - 1):
            raise InvalidParameter(f"n = {self.n} must be a power of two")
        if self.data.shape != (N_STATE, self.n, self.n, self.n):
            raise InvalidParameter(f"data shape {self.data.shape} does not match n = {self.n}")

    @property
    def cell_volume(self) -> float:
        return (self.L / self.n) ** 3

    @classmethod
    def zeros(cls, n: int, L: float = 2 * np.pi) -> "Field":
        return cls(n, float(L), np.zeros((N_STATE, n, n, n)))


def wavenumbers(n: int, L: float) -> np.ndarray:
    """``(3, n, n, n)`` array of angular wavenumbers."""
    k1 = 2.0 * np.pi / L * np.fft.fftfreq(n, 1.0 / n)
    return np.stack(np.meshgrid(k1, k1, k1, indexing="ij"))


def grid_coordinates(n: int, L: float) -> np.ndarray:
    x1 = L * np.arange(n) / n
    return np.stack(np.meshgrid(x1, x1, x1, indexing="ij"))


def _nyquist_mask(n: int) -> np.ndarray:
    m = np.fft.fftfreq(n, 1.0 / n)
    ny = m == -n // 2
    return ny[:, None, None] | ny[None, :, None] | ny[None, None, :]


def _project_hat(bhat: np.ndarray, k: np.ndarray) -> np.ndarray:
    k2 = np.sum(k * k, axis=0)
    kdotb = np.sum(k * bhat, axis=0)
    safe = np.where(k2 > 0, k2, 1.0)
    return bhat - k * np.where(k2 > 0, kdotb / safe, 0.0)


def project_divfree(field: Field) -> Field:
    """Leray-project the magnetic block; the mean (k = 0) is left untouched.

    Nyquist modes of ``b`` are removed: their wavenumber sign is ambiguous for
    real data, so no projection can make them divergence-free.
    """
    k = wavenumbers(field.n, field.L)
    bhat = np.fft.fftn(field.data[6:9], axes=(1, 2, 3))
    bhat[:, _nyquist_mask(field.n)] = 0.0
    b = np.fft.ifftn(_project_hat(bhat, k), axes=(1, 2, 3)).real
    data = field.data.copy()
    data[6:9] = b
    return Field(field.n, field.L, data)


def divergence_defect(field: Field) -> float:
    """``max_k |k . b(k)| / max_k |b(k)|`` over the discrete spectrum."""
    return _div_defect_hat(np.fft.fftn(field.data[6:9], axes=(1, 2, 3)), wavenumbers(field.n, field.L))


def _div_defect_hat(bhat: np.ndarray, k: np.ndarray) -> float:
    kn = np.sqrt(np.sum(k * k, axis=0))
    kdotb = np.abs(np.sum(k * bhat, axis=0)) / np.where(kn > 0, kn, 1.0)
    scale = float(np.max(np.sqrt(np.sum(np.abs(bhat) ** 2, axis=0))))
    return float(np.max(kdotb)) / scale if scale > 0 else 0.0


def propagate_modes(sys: SystemMatrices, U0hat: np.ndarray, xis: np.ndarray, t: float) -> np.ndarray:
    """``exp(t A0^{-1} E(xi)) U0hat`` for a stack: ``U0hat (N, 9)``, ``xis (N, 3)``."""
    if t < 0:
        raise InvalidParameter("t must be >= 0")
    U0hat = np.asarray(U0hat, dtype=complex).reshape(-1, N_STATE)
    xis = np.asarray(xis, dtype=float).reshape(-1, 3)
    out = np.empty_like(U0hat)
    for start in range(0, len(xis), CHUNK):
        sl = slice(start, start + CHUNK)
        P = expm(t * generator_stack(sys, xis[sl]))
        out[sl] = np.einsum("nab,nb->na", P, U0hat[sl])
    return out


def propagate_mode(sys: SystemMatrices, U0hat, xi, t: float) -> np.ndarray:
    """Solution of ``A0 dU/dt = E(xi) U`` at time ``t`` for a single mode."""
    return propagate_modes(sys, np.asarray(U0hat).reshape(1, N_STATE), np.reshape(xi, (1, 3)), t)[0]


def sobolev_weights(n: int, L: float, s: float) -> np.ndarray:
    k = wavenumbers(n, L)
    return (1.0 + np.sum(k * k, axis=0)) ** s


def _hat_norm2(uhat: np.ndarray, weights: np.ndarray, n: int, L: float) -> float:
    # Parseval for the unnormalized forward FFT, scaled to the continuous L2 norm on the box
    return float(np.sum(weights * np.abs(uhat) ** 2)) * L**3 / n**6


def sobolev_norm(field: Field, s: float) -> float:
    """Periodic ``H^s`` norm of all nine components, weight ``(1 + |k|^2)^s``."""
    if s < 0:
        raise InvalidParameter("s must be >= 0")
    uhat = np.fft.fftn(field.data, axes=(1, 2, 3))
    return float(np.sqrt(_hat_norm2(uhat, sobolev_weights(field.n, field.L, s)[None], field.n, field.L)))


@dataclass(frozen=True)
class NormRow:
    t: float
    Hd: float            # ||U(t)||_{H^d}
    grad_terms: float    # time integral up to t
    relax_terms: float   # time integral up to t
    N2: float


@dataclass
class Trajectory:
    times: np.ndarray
    snapshots: list[Field]
    sys: SystemMatrices
    d: float = 4.0
    norms: list[NormRow] = field(default_factory=list)
    imag_residue: np.ndarray | None = None
    div_defect: np.ndarray | None = None

    def __post_init__(self) -> None:
        t = np.asarray(self.times, dtype=float)
        if t.size == 0 or t[0] != 0.0 or np.any(np.diff(t) <= 0):
            raise InvalidParameter("times must start at 0 and increase strictly")


def _integrands(uhat: np.ndarray, k: np.ndarray, sys: SystemMatrices, d: float, n: int, L: float):
    """Return ``(||U||^2_{H^d}, gradient integrand, relaxation integrand)`` for one spectrum."""
    k2 = np.sum(k * k, axis=0)
    w_d = (1.0 + k2) ** d
    w_dm1 = (1.0 + k2) ** (d - 1)
    hd2 = _hat_norm2(uhat, w_d[None], n, L)
    grad = _hat_norm2(uhat, (w_dm1 * k2)[None], n, L)
    grad += _hat_norm2(uhat[[4, 5, 6, 7, 8]], (w_d * k2)[None], n, L)
    # linearized T_r perturbation: e_r / (4 a theta_bar^3)
    tr = uhat[5] / (4.0 * sys.params.a * sys.eq.theta_bar**3)
    relax = _hat_norm2(uhat[4] - tr, w_dm1, n, L) + _hat_norm2(uhat[1:4], w_dm1[None], n, L)
    return hd2, grad, relax


def norms_table(times, spectra, k, sys: SystemMatrices, d: float, n: int, L: float) -> list[NormRow]:
    rows = []
    sup = 0.0
    g_int = r_int = 0.0
    prev = None
    for t, uhat in zip(times, spectra):
        hd2, g, r = _integrands(uhat, k, sys, d, n, L)
        if prev is not None:
            dt = t - prev[0]
            g_int += 0.5 * dt * (g + prev[1])
            r_int += 0.5 * dt * (r + prev[2])
        sup = max(sup, hd2)
        rows.append(NormRow(float(t), float(np.sqrt(hd2)), float(g_int), float(r_int), float(sup + g_int + r_int)))
        prev = (t, g, r)
    return rows


def simulate(sys: SystemMatrices, field0: Field, t_end: float, n_out: int, d: float = 4.0,
             keep_snapshots: bool = True) -> Trajectory:
    """Evolve ``field0`` to ``n_out`` uniformly spaced times in ``(0, t_end]``.

    Only modes present in the initial spectrum are propagated (the rest stay
    zero by linearity). Nyquist modes are dropped because a real field cannot
    carry them consistently under a complex symbol.
    """
    if field0.n < 4:
        raise GridTooSmall(f"n = {field0.n} < 4")
    if not t_end > 0 or n_out < 1:
        raise InvalidParameter("need t_end > 0 and n_out >= 1")
    n, L = field0.n, field0.L
    times = np.linspace(0.0, t_end, n_out + 1)
    k = wavenumbers(n, L)
    U0 = np.fft.fftn(field0.data, axes=(1, 2, 3))
    U0[:, _nyquist_mask(n)] = 0.0
    flat0 = U0.reshape(N_STATE, -1).T
    active = np.nonzero(np.any(np.abs(flat0) > 0, axis=1))[0]
    xis = k.reshape(3, -1).T[active]
    spectra, snaps, imag, div = [], [], [], []
    for t in times:
        flat = np.zeros_like(flat0)
        if active.size:
            flat[active] = propagate_modes(sys, flat0[active], xis, float(t))
        uhat = flat.T.reshape(N_STATE, n, n, n)
        spectra.append(uhat)
        u = np.fft.ifftn(uhat, axes=(1, 2, 3))
        imag.append(float(np.max(np.abs(u.imag))))
        div.append(_div_defect_hat(uhat[6:9], k))
        if keep_snapshots:
            snaps.append(Field(n, L, np.ascontiguousarray(u.real)))
    traj = Trajectory(times=times, snapshots=snaps, sys=sys, d=d,
                      imag_residue=np.array(imag), div_defect=np.array(div))
    traj.norms = norms_table(times, spectra, k, sys, d, n, L)
    return traj


def energy_functional_N(traj: Trajectory, d: float | None = None) -> float:
    """Discrete ``N(t)^2`` at the last output time.

    Running sup of ``||U||^2_{H^d}`` plus trapezoidal time integrals of the
    gradient and relaxation terms, all at the linearized level.
    """
    d = traj.d if d is None else d
    if d == traj.d and traj.norms:
        return traj.norms[-1].N2
    if not traj.snapshots:
        raise InvalidParameter("trajectory has no snapshots to evaluate")
    f0 = traj.snapshots[0]
    k = wavenumbers(f0.n, f0.L)
    spectra = [np.fft.fftn(f.data, axes=(1, 2, 3)) for f in traj.snapshots]
    rows = norms_table(traj.times, spectra, k, traj.sys, d, f0.n, f0.L)
    return rows[-1].N2


def single_mode_field(n: int, L: float, mode, amplitude) -> Field:
    """``Re(c exp(i k.x))`` with integer ``mode`` and complex 9-vector ``c``."""
    m = np.asarray(mode, dtype=float).reshape(3)
    kv = 2.0 * np.pi / L * m
    x = grid_coordinates(n, L)
    phase = np.exp(1j * np.einsum("j,jxyz->xyz", kv, x))
    c = np.asarray(amplitude, dtype=complex).reshape(N_STATE)
    return Field(n, float(L), np.real(c[:, None, None, None] * phase[None]))


def random_field(n: int, L: float = 2 * np.pi, seed: int = 7, q: float = 3.0,
                 band: int | None = None) -> Field:
    """Seeded smooth random field with ``|U(k)| ~ (1 + |k|^2)^{-q}``, divergence-free ``b``.

    Only integer modes with ``0 < max |m_i| <= band`` (default ``n // 4``) are excited.
    """
    band = n // 4 if band is None else band
    if not 1 <= band < n // 2:
        raise InvalidParameter("band must be in [1, n/2)")
    rng = np.random.default_rng(seed)
    m = np.fft.fftfreq(n, 1.0 / n)
    M = np.stack(np.meshgrid(m, m, m, indexing="ij"))
    inside = np.all(np.abs(M) <= band, axis=0)
    inside[0, 0, 0] = False  # zero-mean perturbation
    k = wavenumbers(n, L)
    amp = (1.0 + np.sum(k * k, axis=0)) ** (-q) * inside
    coef = (rng.standard_normal((N_STATE, n, n, n)) + 1j * rng.standard_normal((N_STATE, n, n, n))) * amp
    data = np.fft.ifftn(coef, axes=(1, 2, 3)).real * n**3
    return project_divfree(Field(n, float(L), data))
