from __future__ import annotations

import numpy as np
import pytest

from radmhd.compensator import (N_PARAMS, compensator_from_params, find_compensator, pointwise_margins,
                                skew_from_params, verify_compensator)
from radmhd.errors import InvalidParameter, NoCompensatorFound
from radmhd.stability import fibonacci_sphere
from radmhd.symbols import fourier_symbol


@pytest.fixture(scope="module")
def found(ones):
    return find_compensator(ones, n_train=64, budget=20000)


def test_parametrization_is_skew_after_A0(ones):
    theta = np.random.default_rng(0).normal(size=N_PARAMS)
    S = skew_from_params(theta)
    np.testing.assert_array_equal(S, -S.transpose(0, 2, 1))
    K = compensator_from_params(theta, np.asarray(ones.A0))
    KA0 = K @ np.asarray(ones.A0)
    assert np.abs(KA0 + KA0.transpose(0, 2, 1)).max() <= 1e-15


def test_pointwise_margin_oracle(ones):
    K = compensator_from_params(np.random.default_rng(1).normal(size=N_PARAMS), np.asarray(ones.A0))
    w = fibonacci_sphere(5)
    got = pointwise_margins(K, ones, w)
    for om, m in zip(w, got):
        s = fourier_symbol(ones, om)
        KA = np.einsum("j,jab->ab", om, K) @ s.Axi
        H = 0.5 * (KA + KA.T) + 0.5 * (s.Bxi + s.Bxi.T)
        assert m == pytest.approx(np.linalg.eigvalsh(H).min(), abs=1e-12)


def test_search_finds_positive_margin(found, ones):
    assert found.found and found.margin > 0
    chk = verify_compensator(found, ones, n_test=500)
    assert chk.margin > 0.5 * found.margin
    assert chk.odd_defect == 0.0
    assert chk.skew_defect <= 1e-12
    np.testing.assert_array_equal(found.at((1.0, 0.0, 0.0)), found.K1)
    np.testing.assert_array_equal(found.at(-np.eye(3)[2]), -found.K3)


def test_exhausted_budget_reports_failure(ones):
    c = find_compensator(ones, budget=1)
    assert not c.found and c.margin <= 0
    with pytest.raises(NoCompensatorFound):
        find_compensator(ones, budget=1, raise_on_failure=True)
    with pytest.raises(InvalidParameter):
        find_compensator(ones, n_train=4)
