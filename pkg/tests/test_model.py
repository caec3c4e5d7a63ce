from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from radmhd.errors import CompatibilityViolation, InvalidParameter, NonPositiveState
from radmhd.model import (Equilibrium, PhysParams, derive_coefficients, make_cold_pressure_eos,
                          make_ideal_gas_eos, validate_equilibrium)

pos = st.floats(0.25, 4.0)


def test_all_ones_coefficients(ones_setup):
    c = derive_coefficients(*ones_setup)
    expected = dict(alpha_p=1, beta_p=1, beta_pp=1 / 3, gamma_p=1, gamma_pp=4 / 3,
                    delta_p=1, delta_pp=1 / 3, zeta=4, eta=1, pi=4)
    for k, v in expected.items():
        assert getattr(c, k) == pytest.approx(v, rel=1e-15), k
    assert c.all_positive()


@given(mu=pos, sigma=pos, sa=pos, ss=pos, a=pos, kappa=pos, R=pos, Cv=pos, rho=pos, th=pos)
@settings(max_examples=50, deadline=None)
def test_coefficients_match_hand_formulas(mu, sigma, sa, ss, a, kappa, R, Cv, rho, th):
    params = PhysParams(mu, sigma, sa, ss, a, kappa, 1.0)
    eq = Equilibrium.compatible(params, rho, th)
    c = derive_coefficients(params, make_ideal_gas_eos(R, Cv), eq)
    # ideal gas: p_rho = R th, p_theta = R rho
    assert c.alpha_p == pytest.approx(R * th / rho)
    assert c.beta_p == pytest.approx(R)
    assert c.beta_pp == pytest.approx(1 / (3 * rho))
    assert c.gamma_p == pytest.approx(R * rho / Cv)
    assert c.gamma_pp == pytest.approx(4 / 3 * a * th**4)
    assert c.delta_p == pytest.approx(kappa / (rho * Cv))
    assert c.delta_pp == pytest.approx(1 / (3 * ss))
    assert c.zeta == pytest.approx(4 * a * sa * th**3 / (rho * Cv))
    assert c.eta == pytest.approx(sa / (rho * Cv))
    assert c.pi == pytest.approx(4 * a * sa * th**3)
    assert params.lam * params.mu * params.sigma == pytest.approx(1.0, rel=1e-15)


@pytest.mark.parametrize("field", ["mu", "sigma", "sigma_a", "sigma_s", "a", "kappa"])
def test_params_reject_nonpositive(field):
    with pytest.raises(InvalidParameter):
        PhysParams(**{field: 0.0})


def test_nu_zero_admissible_and_negative_rejected():
    assert PhysParams(nu=0.0).nu == 0.0
    with pytest.raises(InvalidParameter):
        PhysParams(nu=-1e-3)


def test_lambda_is_derived():
    with pytest.raises(TypeError):
        PhysParams(lam=2.0)
    assert PhysParams(mu=2.0, sigma=4.0).lam == 0.125


def test_equilibrium_compatibility():
    params = PhysParams(a=2.0)
    with pytest.raises(CompatibilityViolation):
        validate_equilibrium(params, Equilibrium(1.0, 1.0, 1.0))
    with pytest.raises(NonPositiveState):
        validate_equilibrium(params, Equilibrium(-1.0, 1.0, 2.0))
    assert Equilibrium.compatible(params, 1.0, 2.0).Er_bar == 32.0


@pytest.mark.parametrize("eos", [make_ideal_gas_eos(1.3, 0.7), make_cold_pressure_eos(0.8, 1.5, 0.4, 1.7)])
def test_gibbs_consistency_by_differences(eos):
    rng = np.random.default_rng(3)
    h = 1e-5
    for rho, th in rng.uniform(0.5, 2.0, size=(20, 2)):
        s_th = (eos.s(rho, th + h) - eos.s(rho, th - h)) / (2 * h)
        e_th = (eos.e(rho, th + h) - eos.e(rho, th - h)) / (2 * h)
        e_rho = (eos.e(rho + h, th) - eos.e(rho - h, th)) / (2 * h)
        p_th = (eos.p(rho, th + h) - eos.p(rho, th - h)) / (2 * h)
        p_rho = (eos.p(rho + h, th) - eos.p(rho - h, th)) / (2 * h)
        assert th * s_th == pytest.approx(e_th, abs=1e-9)
        assert e_rho == pytest.approx((eos.p(rho, th) - th * p_th) / rho**2, abs=1e-9)
        assert float(eos.e_theta(rho, th)) == pytest.approx(e_th, abs=1e-9)
        assert float(eos.p_rho(rho, th)) == pytest.approx(p_rho, abs=1e-9)
        assert float(eos.e_rho(rho, th)) == pytest.approx(e_rho, abs=1e-9)


def test_eos_monotone_and_derivative_defects():
    eos = make_cold_pressure_eos(1.0, 1.0, 0.5, 2.0)
    assert eos.check_monotone(1.0, 1.0)
    assert max(eos.derivative_defects(1.0, 1.0).values()) < 1e-8
    with pytest.raises(InvalidParameter):
        make_ideal_gas_eos(R=0.0)
