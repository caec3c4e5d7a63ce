from __future__ import annotations

import numpy as np
import pytest
import scipy.linalg as sla

from radmhd.errors import GridTooSmall, InvalidParameter
from radmhd.propagator import (Field, Trajectory, divergence_defect, energy_functional_N, grid_coordinates,
                               project_divfree, propagate_mode, propagate_modes, random_field, simulate,
                               single_mode_field, sobolev_norm, wavenumbers)
from radmhd.symbols import fourier_symbol

L = 2 * np.pi


def mode_oracle(sys, n, mode, c, t):
    """Analytic single-mode solution through scipy's expm."""
    k = np.asarray(mode, float) * 2 * np.pi / L
    G = np.linalg.solve(sys.A0, fourier_symbol(sys, k).Exi)
    ct = sla.expm(t * G) @ c
    phase = np.exp(1j * np.einsum("j,jxyz->xyz", k, grid_coordinates(n, L)))
    return np.real(ct[:, None, None, None] * phase[None])


def divfree_amplitude(mode, rng):
    c = rng.normal(size=9) + 1j * rng.normal(size=9)
    k = np.asarray(mode, float)
    c[6:9] -= k * (k @ c[6:9]) / (k @ k)
    return c


def test_field_validation():
    with pytest.raises(GridTooSmall):
        Field.zeros(2)
    with pytest.raises(InvalidParameter):
        Field.zeros(6)
    with pytest.raises(InvalidParameter):
        Field(4, 1.0, np.zeros((9, 4, 4, 5)))


def test_wavenumbers_match_numpy_derivative():
    n = 8
    x = grid_coordinates(n, L)
    f = np.sin(2 * x[0]) * np.cos(x[2])
    k = wavenumbers(n, L)
    df = np.fft.ifftn(1j * k[0] * np.fft.fftn(f)).real
    np.testing.assert_allclose(df, 2 * np.cos(2 * x[0]) * np.cos(x[2]), atol=1e-13)


@pytest.mark.parametrize("mode", [(1, 0, 0), (0, 2, -1), (3, 1, 2)])
def test_single_mode_matches_exponential(ones, mode):
    rng = np.random.default_rng(sum(mode) + 5)
    c = divfree_amplitude(mode, rng)
    f0 = single_mode_field(16, L, mode, c)
    traj = simulate(ones, f0, 2.0, 4)
    for t, snap in zip(traj.times, traj.snapshots):
        np.testing.assert_allclose(snap.data, mode_oracle(ones, 16, mode, c, t), atol=1e-10)


def test_semigroup(ones):
    rng = np.random.default_rng(2)
    xis = rng.normal(size=(20, 3)) * 3
    U0 = rng.normal(size=(20, 9)) + 1j * rng.normal(size=(20, 9))
    a = propagate_modes(ones, propagate_modes(ones, U0, xis, 0.7), xis, 1.9)
    b = propagate_modes(ones, U0, xis, 2.6)
    assert np.abs(a - b).max() <= 1e-11 * np.abs(U0).max()
    np.testing.assert_allclose(propagate_mode(ones, U0[0], xis[0], 0.0), U0[0], atol=0)
    with pytest.raises(InvalidParameter):
        propagate_modes(ones, U0, xis, -1.0)


def test_random_field_properties():
    f = random_field(16, L, seed=3)
    assert divergence_defect(f) <= 1e-12
    assert np.abs(f.data.mean(axis=(1, 2, 3))).max() < 1e-15
    g = random_field(16, L, seed=3)
    np.testing.assert_array_equal(f.data, g.data)
    assert not np.array_equal(f.data, random_field(16, L, seed=4).data)
    spec = np.abs(np.fft.fftn(f.data, axes=(1, 2, 3)))
    m = np.abs(np.fft.fftfreq(16, 1 / 16))
    high = (m[:, None, None] > 4) | (m[None, :, None] > 4) | (m[None, None, :] > 4)
    assert spec[:, high].max() < 1e-12


def test_projection_removes_divergence():
    rng = np.random.default_rng(0)
    f = Field(8, L, rng.normal(size=(9, 8, 8, 8)))
    assert divergence_defect(f) > 1e-2
    assert divergence_defect(project_divfree(f)) < 1e-14


def test_sobolev_norm_of_cosine():
    n, s = 8, 2.0
    c = np.zeros(9)
    c[4] = 0.3
    f = single_mode_field(n, L, (1, 2, 0), c)
    # || a cos(k.x) ||^2 over the box = a^2 L^3 / 2
    assert sobolev_norm(f, s) == pytest.approx(np.sqrt(0.09 * L**3 / 2 * (1 + 5) ** s), rel=1e-12)
    assert sobolev_norm(f, 0) == pytest.approx(np.sqrt(np.sum(f.data**2) * f.cell_volume), rel=1e-12)


def test_decay_and_invariants(ones):
    f0 = random_field(16, L, seed=7)
    traj = simulate(ones, f0, 10.0, 10)
    assert traj.imag_residue.max() <= 1e-10
    assert traj.div_defect.max() <= 1e-10
    a, b = traj.snapshots[0].data[1:], traj.snapshots[-1].data[1:]
    for comp in range(8):
        assert np.sum(b[comp] ** 2) < np.sum(a[comp] ** 2)
    assert traj.norms[-1].Hd < traj.norms[0].Hd
    assert np.isfinite(traj.norms[-1].N2)
    # recomputing from snapshots reproduces the table
    assert energy_functional_N(traj, d=4.0) == traj.norms[-1].N2
    twin = Trajectory(traj.times, traj.snapshots, ones, d=4.0)
    assert energy_functional_N(twin) == pytest.approx(traj.norms[-1].N2, rel=1e-12)
    assert energy_functional_N(traj, d=2.0) < traj.norms[-1].N2


def test_trajectory_time_validation(ones):
    with pytest.raises(InvalidParameter):
        Trajectory(np.array([0.5, 1.0]), [], ones)
    with pytest.raises(InvalidParameter):
        simulate(ones, Field.zeros(4), 0.0, 3)
