import math

import mpmath
import pytest

from mediamod import (
    SwitchingModel,
    integrate_switching_ode,
    load_config,
    photon_energy,
    photon_flux,
    state_b_population,
    switch_probability,
)

# frozen reference values, computed from first principles with exact
# CODATA constants and cross-checked in extended precision
E_365NM = 5.44231741684638e-19
E_529NM = 3.755096138277748e-19
FLUX_1E3 = 9.187262735765443e+16
ABSORPTION_SCALE = 6.347063953998507e-16
P_SWITCH_1E3 = 0.11267139330508624   # at n_tx = 100
P_SWITCH_1E4 = 0.6974167869855867
B_FRACTION_1E3 = 0.8873286066949195  # N_B(T)/n at P=1e3, n=100


def test_photon_energy_reference_values():
    assert photon_energy(365e-9) == pytest.approx(E_365NM, rel=1e-12)
    assert photon_energy(529e-9) == pytest.approx(E_529NM, rel=1e-12)


def test_photon_energy_inverse_proportionality():
    assert photon_energy(730e-9) == pytest.approx(photon_energy(365e-9) / 2, rel=1e-14)


def test_photon_energy_rejects_nonpositive():
    with pytest.raises(ValueError):
        photon_energy(0.0)
    with pytest.raises(ValueError):
        photon_energy(-1e-9)


def test_photon_flux_reference_value():
    assert photon_flux(1e3, 5e-5, 365e-9) == pytest.approx(FLUX_1E3, rel=1e-12)


def test_photon_flux_zero_iff_dark():
    assert photon_flux(0.0, 5e-5, 365e-9) == 0.0
    assert photon_flux(1e-30, 5e-5, 365e-9) > 0.0


def test_photon_flux_linear_in_irradiance():
    one = photon_flux(1e3, 5e-5, 365e-9)
    assert photon_flux(2e3, 5e-5, 365e-9) == pytest.approx(2 * one, rel=1e-14)


def test_photon_flux_rejects_bad_inputs():
    with pytest.raises(ValueError):
        photon_flux(-1.0, 5e-5, 365e-9)
    with pytest.raises(ValueError):
        photon_flux(1e3, 0.0, 365e-9)


def test_model_from_config(default_cfg):
    model = SwitchingModel.from_config(default_cfg)
    assert model.photon_energy_j == pytest.approx(E_365NM, rel=1e-12)
    assert model.flux == pytest.approx(FLUX_1E3, rel=1e-12)
    assert model.absorption_scale == pytest.approx(ABSORPTION_SCALE, rel=1e-12)
    assert model.quantum_yield == 0.41
    assert model.irradiation_time == 5e-3


def test_model_irradiance_override(default_cfg):
    model = SwitchingModel.from_config(default_cfg, irradiance=2e3)
    assert model.flux == pytest.approx(2 * FLUX_1E3, rel=1e-12)
    with pytest.raises(ValueError):
        SwitchingModel.from_config(default_cfg, irradiance=-1.0)


def test_population_initial_condition(default_cfg):
    model = SwitchingModel.from_config(default_cfg)
    assert state_b_population(model, 100.0, 0.0) == pytest.approx(100.0, rel=1e-15)


def test_population_dark_transmitter(default_cfg):
    dark = SwitchingModel.from_config(default_cfg, irradiance=0.0)
    for t in (0.0, 1e-3, 5e-3, 1.0):
        assert state_b_population(dark, 100.0, t) == 100.0


def test_population_reference_fraction(default_cfg):
    model = SwitchingModel.from_config(default_cfg)
    n_b = state_b_population(model, 100.0, 5e-3)
    assert n_b / 100.0 == pytest.approx(B_FRACTION_1E3, rel=1e-12)


def test_population_monotone_nonincreasing(default_cfg):
    model = SwitchingModel.from_config(default_cfg)
    values = [state_b_population(model, 100.0, t) for t in (0.0, 1e-3, 3e-3, 5e-3, 1e-2)]
    assert all(b <= a for a, b in zip(values, values[1:]))
    assert all(0.0 <= v <= 100.0 for v in values)


def test_population_extreme_scales(default_cfg):
    # neither overflow at a*n ~ 50 nor underflow at a*n ~ 1e-20
    model = SwitchingModel.from_config(default_cfg)
    a = model.absorption_scale
    big = state_b_population(model, 50.0 / a, 5e-3)
    assert math.isfinite(big) and 0 < big <= 50.0 / a
    small = state_b_population(model, 1e-20 / a, 5e-3)
    assert math.isfinite(small) and 0 < small < 1e-20 / a


def test_population_matches_extended_precision(default_cfg):
    # the closed form must hold up where the naive expression
    # log(1 - exp(-k)*(1 - exp(n*a)))/a loses every significant digit
    model = SwitchingModel.from_config(default_cfg)
    a = model.absorption_scale
    k_rate = model.quantum_yield * model.flux * a
    mpmath.mp.dps = 60
    for an in (1e-20, 1e-12, 1e-8, 1e-4, 1.0, 10.0):
        n = an / a
        got = state_b_population(model, n, 5e-3)
        k = mpmath.mpf(k_rate) * mpmath.mpf(5e-3)
        want = mpmath.log1p(mpmath.exp(-k) * mpmath.expm1(mpmath.mpf(n) * mpmath.mpf(a))) / mpmath.mpf(a)
        assert got == pytest.approx(float(want), rel=1e-10)


def test_population_input_validation(default_cfg):
    model = SwitchingModel.from_config(default_cfg)
    with pytest.raises(ValueError):
        state_b_population(model, -1.0, 1.0)
    with pytest.raises(ValueError):
        state_b_population(model, 10.0, -1.0)
    assert state_b_population(model, 0.0, 1.0) == 0.0


def test_switch_probability_reference_values(default_cfg):
    model = SwitchingModel.from_config(default_cfg)
    assert switch_probability(model, 100.0) == pytest.approx(P_SWITCH_1E3, rel=1e-12)
    hot = SwitchingModel.from_config(default_cfg, irradiance=1e4)
    assert switch_probability(hot, 100.0) == pytest.approx(P_SWITCH_1E4, rel=1e-12)


def test_switch_probability_dark_is_zero(default_cfg):
    dark = SwitchingModel.from_config(default_cfg, irradiance=0.0)
    assert switch_probability(dark, 100.0) == 0.0


def test_switch_probability_saturates_at_high_power(default_cfg):
    blazing = SwitchingModel.from_config(default_cfg, irradiance=1e6)
    assert switch_probability(blazing, 100.0) == 1.0


def test_switch_probability_monotone_in_irradiance(default_cfg):
    probs = [
        switch_probability(SwitchingModel.from_config(default_cfg, irradiance=p), 100.0)
        for p in (1e2, 1e3, 1e4, 1e5, 1e6)
    ]
    assert all(b >= a for a, b in zip(probs, probs[1:]))


def test_switch_probability_thin_sample_limit(default_cfg):
    # optically thin: p approaches 1 - exp(-phi*a*q*T)
    model = SwitchingModel.from_config(default_cfg)
    k = model.quantum_yield * model.absorption_scale * model.flux * model.irradiation_time
    limit = -math.expm1(-k)
    assert switch_probability(model, 100.0) == pytest.approx(limit, rel=1e-10)


def test_switch_probability_independence_regime(default_cfg):
    model = SwitchingModel.from_config(default_cfg)
    base = switch_probability(model, 1.0)
    for n in (1e3, 1e6, 1e9, 1e12):
        assert abs(switch_probability(model, n) - base) / base < 0.01
    # dense samples start competing for photons
    assert abs(switch_probability(model, 1e14) - base) / base > 0.01


def test_switch_probability_requires_positive_count(default_cfg):
    model = SwitchingModel.from_config(default_cfg)
    with pytest.raises(ValueError):
        switch_probability(model, 0.0)
    with pytest.raises(ValueError):
        switch_probability(model, -5.0)


def test_ode_integrator_matches_closed_form(default_cfg):
    model = SwitchingModel.from_config(default_cfg)
    want = state_b_population(model, 100.0, 5e-3)
    got = integrate_switching_ode(model, 100.0, 5e-3, steps=5000)
    assert got == pytest.approx(want, rel=1e-10)


def test_ode_integrator_dark_is_constant(default_cfg):
    dark = SwitchingModel.from_config(default_cfg, irradiance=0.0)
    assert integrate_switching_ode(dark, 123.0, 5e-3, steps=100) == 123.0


def test_ode_photon_limited_regime(default_cfg):
    # dense regime: nearly every photon is absorbed, so the initial decay
    # rate approaches quantum_yield * flux
    model = SwitchingModel.from_config(default_cfg)
    n0 = 1e17
    t = 1e-5
    n1 = integrate_switching_ode(model, n0, t, steps=200)
    rate = (n0 - n1) / t
    assert rate == pytest.approx(model.quantum_yield * model.flux, rel=1e-3)


def test_ode_validation(default_cfg):
    model = SwitchingModel.from_config(default_cfg)
    with pytest.raises(ValueError):
        integrate_switching_ode(model, 100.0, 5e-3, steps=0)
    with pytest.raises(ValueError):
        integrate_switching_ode(model, 100.0, -1.0, steps=10)


def test_closed_form_satisfies_the_rate_equation(default_cfg):
    # central difference of the closed form reproduces
    # dN_B/dt = -phi*q*(1 - exp(-a*N_B)) at interior times
    model = SwitchingModel.from_config(default_cfg)
    n0 = 100.0
    for t in (1e-3, 2.5e-3, 4e-3):
        h = 1e-7
        deriv = (
            state_b_population(model, n0, t + h) - state_b_population(model, n0, t - h)
        ) / (2 * h)
        n_b = state_b_population(model, n0, t)
        rhs = model.quantum_yield * model.flux * math.expm1(-model.absorption_scale * n_b)
        assert deriv == pytest.approx(rhs, rel=1e-6)


def test_conservation_switched_plus_remaining(default_cfg):
    model = SwitchingModel.from_config(default_cfg)
    n0 = 100.0
    n_b = state_b_population(model, n0, 5e-3)
    p = switch_probability(model, n0)
    assert p * n0 + n_b == pytest.approx(n0, rel=1e-12)
