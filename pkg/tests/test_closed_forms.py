import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from pssmp.closed_forms import (BesselLIL, DomainError, LogRegularPhi, PoissonF, PsiOverLogLog,
                                StableConditionedPhi, WatanabeG, bessel_closed_forms,
                                bessel_future_infimum_integrand, bessel_lil_candidate,
                                catalog_anchors, catalog_records, de_bruijn_tail, density_bundle,
                                entrance_moment, eval_test_function, export_catalog,
                                incomplete_gamma_sandwich, lil_constant, log_regular_inner,
                                negative_moment, rate_inverse_H, sandwich_domain_start, tail_form,
                                verified_sandwich_pairs)
from pssmp.levy_models import (BrownianWithDrift, CompoundPoissonExp, LampertiStableSubordinator,
                               StablePlusDrift, StandardPoisson, drift_mean, laplace_exponent)

EE = math.exp(math.e)


@pytest.mark.parametrize("model", [BrownianWithDrift(1.0), CompoundPoissonExp(3.0, 2.0),
                                   StandardPoisson()], ids=lambda m: m.family)
def test_first_negative_moment_is_mean(model):
    assert negative_moment(model, 1) == drift_mean(model)


def test_bessel_negative_moments_match_gamma():
    # I = 1/(2 gamma_1): E I^-k = 2^k k!
    for k in range(1, 5):
        assert negative_moment(BrownianWithDrift(1.0), k) == pytest.approx(2 ** k * math.factorial(k))


def test_watanabe_negative_moment():
    # I ~ Gamma(3, rate 3): E I^-2 = 9 / 2
    assert negative_moment(CompoundPoissonExp(3.0, 2.0), 2) == pytest.approx(4.5)
    with pytest.raises(DomainError, match="psi\\(2\\)"):
        negative_moment(CompoundPoissonExp(3.0, 2.0), 3)


def test_entrance_moments():
    assert entrance_moment(BrownianWithDrift(1.0), 1) == 4.0
    assert entrance_moment(BrownianWithDrift(1.0), 2) == 24.0
    assert entrance_moment(StablePlusDrift(1.5, 0.3), 1) == pytest.approx(1.3)
    with pytest.raises(DomainError):
        entrance_moment(BrownianWithDrift(1.0), 0)


def test_rate_inverse():
    assert rate_inverse_H(lambda s: s ** 1.5, 4.0) == pytest.approx(16.0, rel=1e-10)
    m = StablePlusDrift(1.5, 1.0)
    x = laplace_exponent(m, 4.0) / 4.0 + 1e-9
    assert rate_inverse_H(m, x) == pytest.approx(4.0, abs=1e-8)
    with pytest.raises(DomainError):
        rate_inverse_H(m, 0.5)


@settings(max_examples=30, deadline=None)
@given(x1=st.floats(1.5, 1e3), x2=st.floats(1.5, 1e3))
def test_rate_inverse_monotone(x1, x2):
    m = StablePlusDrift(1.5, 1.0)
    lo, hi = sorted((x1, x2))
    assert rate_inverse_H(m, lo) <= rate_inverse_H(m, hi)


def test_test_functions_at_ee():
    assert eval_test_function(BesselLIL(), EE) == pytest.approx(2 * EE, rel=1e-12)
    assert eval_test_function(WatanabeG(2.0), EE) == pytest.approx(EE / 2, rel=1e-12)
    assert eval_test_function(PoissonF(), EE) == pytest.approx(EE * math.exp(-math.sqrt(2)), rel=1e-12)
    assert eval_test_function(StableConditionedPhi(2.0), EE) == pytest.approx(math.sqrt(EE))


@pytest.mark.parametrize("t", [1.0, math.e, 1 / math.e, 2.0])
def test_test_functions_reject_inner_window(t):
    with pytest.raises(DomainError):
        eval_test_function(BesselLIL(), t)


def test_log_regular_inner_bessel_exact():
    # -log P(I < 1/s) = -log Q(1, s/2) = s/2, so the inner inf is 2 log L
    assert log_regular_inner(BrownianWithDrift(1.0), 50.0) == pytest.approx(2 * math.log(50.0), rel=1e-10)
    assert eval_test_function(LogRegularPhi(BrownianWithDrift(1.0)), math.exp(-50.0)) == pytest.approx(
        math.exp(-50.0) * 2 * math.log(50.0), rel=1e-10)


def test_tail_forms_flag_regime():
    assert tail_form(BrownianWithDrift(1.0))(3.0).in_regime
    pois = tail_form(StandardPoisson())
    assert not pois(2.0).in_regime and pois(10.0).in_regime


def test_psi_over_loglog_needs_finite_psi():
    with pytest.raises(DomainError):
        eval_test_function(PsiOverLogLog(CompoundPoissonExp(3.0, 2.0)), 1e8)


def test_lil_constants():
    assert lil_constant("stable_conditioned_J", alpha=2.0) == pytest.approx(2.0)
    assert lil_constant("logregular_U", beta=1.5) == pytest.approx(math.sqrt(0.5))
    assert lil_constant("bessel_J") == 1.0
    with pytest.raises(DomainError):
        lil_constant("no_such_statement")
    with pytest.raises(DomainError):
        lil_constant("logregular_U")


@pytest.mark.parametrize("beta", np.linspace(1.05, 1.95, 19))
def test_log_regular_reciprocity(beta):
    u = lil_constant("logregular_U", beta=beta)
    j = lil_constant("logregular_J", beta=beta)
    assert u * j == pytest.approx(1.0, abs=4 * np.finfo(float).eps)


def test_catalog_export(tmp_path):
    export_catalog(tmp_path / "c.json")
    recs = json.loads((tmp_path / "c.json").read_text())
    assert recs == json.loads(json.dumps(catalog_records(), sort_keys=True))
    assert {r["paper_anchor"] for r in recs} == catalog_anchors()
    assert all(set(r) == {"statement_id", "formula", "value", "paper_anchor"} for r in recs)


def test_bessel_closed_forms():
    b = bessel_closed_forms(1.0)
    assert b.dim_delta == 4.0
    assert b.I_cdf(0.5) == pytest.approx(math.exp(-1.0), rel=1e-12)
    assert bessel_closed_forms(2.0).I_cdf(1e12) == pytest.approx(1.0)
    # X_1 = 2 gamma_2
    assert b.X1_cdf(2.0) == pytest.approx(1 - 2 * math.exp(-1.0), rel=1e-12)


def test_bessel_lil_integrand_oracle():
    # for delta = 4 the integrand is exp(-c loglog(1/t)) / t = 1 / (t |log t|^c)
    f = bessel_future_infimum_integrand(4.0, bessel_lil_candidate(1.5))
    t = 1e-5
    assert f(t) == pytest.approx(1 / (t * abs(math.log(t)) ** 1.5), rel=1e-12)


def test_watanabe_density_bundle():
    d = density_bundle(CompoundPoissonExp(3.0, 2.0))
    total, _ = integrate.quad(d.rho, 0, np.inf, epsabs=0, epsrel=1e-12)
    assert abs(total - 1.0) < 1e-8
    assert d.rho_1(1.0) == pytest.approx(d.rho(1.0) / 1.5)
    total1, _ = integrate.quad(d.rho_1, 0, np.inf, epsabs=0, epsrel=1e-12)
    assert abs(total1 - 1.0) < 1e-8
    assert d.X1_survival(2.0) == pytest.approx(integrate.quad(d.rho_1, 2.0, np.inf)[0], rel=1e-8)


def test_poisson_density_bundle():
    d = density_bundle(StandardPoisson())
    v = d.I_cdf(math.exp(-4.0))
    assert v.value == pytest.approx(8.0) and v.in_regime
    assert not d.I_cdf(0.5).in_regime


def test_lamperti_stable_bundle_needs_k():
    d = density_bundle(LampertiStableSubordinator(0.5))
    with pytest.raises(DomainError):
        d.rho(0.01)
    assert d.rho(0.01, k=1.0).in_regime


def test_sandwich():
    assert all(incomplete_gamma_sandwich(1.0, x, 1.0 - 1e-9, 1.0 + 1e-9) for x in np.geomspace(1e-3, 100, 50))
    assert all(incomplete_gamma_sandwich(3.0, x, 1.0, 2.0) for x in np.linspace(4, 100, 200))
    with pytest.raises(DomainError):
        incomplete_gamma_sandwich(3.0, 1.0, 1.0, 2.0)
    assert sandwich_domain_start(3.0, 2.0) == 4.0
    with pytest.raises(DomainError):
        verified_sandwich_pairs(0.5)


def test_sandwich_detects_violation():
    # the ratio at a=3, x=4 is 26/16
    assert incomplete_gamma_sandwich(3.0, 4.0, 1.6, 2.0)
    assert not incomplete_gamma_sandwich(3.0, 4.0, 1.7, 2.0)


def test_de_bruijn():
    assert de_bruijn_tail(2.0, 0.01) == pytest.approx(25.0)
    assert de_bruijn_tail(2.0, 0.02) == pytest.approx(12.5)
    xs = np.geomspace(1e-3, 1, 20)
    assert np.all(np.diff([de_bruijn_tail(1.5, x) for x in xs]) < 0)
