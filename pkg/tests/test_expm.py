from __future__ import annotations

import numpy as np
import pytest
import scipy.linalg as sla
from hypothesis import given, settings
from hypothesis import strategies as st

from radmhd.expm import expm


@given(seed=st.integers(0, 2**32 - 1), scale=st.floats(1e-6, 50.0))
@settings(max_examples=60, deadline=None)
def test_matches_scipy(seed, scale):
    rng = np.random.default_rng(seed)
    A = scale * (rng.normal(size=(9, 9)) + 1j * rng.normal(size=(9, 9))) / 3
    ref = sla.expm(A)
    assert np.linalg.norm(expm(A) - ref) <= 1e-11 * max(1.0, np.linalg.norm(ref))


def test_batched_equals_single():
    rng = np.random.default_rng(1)
    stack = rng.normal(size=(5, 4, 4)) * np.array([1e-3, 0.1, 1, 10, 100])[:, None, None]
    out = expm(stack)
    for M, E in zip(stack, out):
        np.testing.assert_allclose(E, expm(M), rtol=1e-14, atol=1e-300)


def test_known_values():
    np.testing.assert_allclose(expm(np.zeros((3, 3))), np.eye(3), atol=0)
    np.testing.assert_allclose(expm(np.diag([1.0, -2.0])), np.diag(np.exp([1.0, -2.0])), rtol=1e-14)
    t = 0.7
    R = expm(np.array([[0.0, -t], [t, 0.0]]))
    np.testing.assert_allclose(R, [[np.cos(t), -np.sin(t)], [np.sin(t), np.cos(t)]], atol=1e-15)
    N = np.array([[0.0, 1.0], [0.0, 0.0]])
    np.testing.assert_allclose(expm(N), [[1, 1], [0, 1]], atol=0)


def test_integer_input_and_shape_errors():
    np.testing.assert_allclose(expm(np.eye(2, dtype=int)), np.e * np.eye(2), rtol=1e-15)
    with pytest.raises(ValueError):
        expm(np.ones((2, 3)))
