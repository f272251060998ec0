import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bayesloss.dataset import Dataset
from bayesloss.effects import (EMPIRICAL_MEAN, STRICT_NEG, BaselineSpec, EffectThresholds,
                               baseline_logodds, effect_summary, mean_identity_check,
                               or_to_logodds, prob_effect_curve, summarize_sample)
from bayesloss.errors import NotConvergedError, ValidationError
from bayesloss.loss import inv_logit, logit
from bayesloss.oracles import truncnorm_lower, truncnorm_products
from bayesloss.posterior import INTERCEPT, PosteriorDraws


def se_of_product(x, mask):
    return np.std(np.where(mask, x, 0.0)) / math.sqrt(x.size)


def test_default_split_normal(normal_sample, normal_draws):
    s = effect_summary(normal_draws, "theta", EffectThresholds(STRICT_NEG, 0.0))
    assert s.p_theta_int == pytest.approx(-0.55, abs=0.02)
    assert s.q_theta_unint == pytest.approx(0.04, abs=0.01)
    exp_p, exp_q = truncnorm_products(-0.5, 0.5, 0.0, 0.0)
    assert exp_p == pytest.approx(-0.5416, abs=1e-4)
    assert exp_q == pytest.approx(0.0417, abs=1e-4)
    x = normal_sample
    assert abs(s.p_theta_int - exp_p) < 3 * se_of_product(x, x < 0)
    assert abs(s.q_theta_unint - exp_q) < 3 * se_of_product(x, x >= 0)


def test_null_band_normal(normal_sample, normal_draws):
    s = effect_summary(normal_draws, "theta", EffectThresholds(-0.5, 0.5))
    assert s.p_theta_int == pytest.approx(-0.46, abs=0.02)
    assert s.q_theta_unint == pytest.approx(0.02, abs=0.01)
    exp_p, exp_q = truncnorm_products(-0.5, 0.5, -0.5, 0.5)
    x = normal_sample
    assert abs(s.p_theta_int - exp_p) < 3 * se_of_product(x, x <= -0.5)
    assert abs(s.q_theta_unint - exp_q) < 3 * se_of_product(x, x >= 0.5)
    assert s.p + s.q < 1


def test_all_negative_has_no_unintended_part():
    s = summarize_sample(np.array([-3.0, -1.0, -0.2]), EffectThresholds(STRICT_NEG, 0.0))
    assert s.q == 0 and s.q_theta_unint == 0 and s.theta_unint is None
    assert s.p == 1 and s.p_theta_int == pytest.approx(-1.4)


def test_three_point_example():
    s = summarize_sample(np.array([-2.0, -1.0, 1.0]), EffectThresholds())
    assert s.p_theta_int == pytest.approx(-1.0)
    assert s.q_theta_unint == pytest.approx(1 / 3)
    total, mean = mean_identity_check(PosteriorDraws.from_array([-2.0, -1.0, 1.0]), "theta")
    assert total == pytest.approx(-2 / 3) and mean == pytest.approx(-2 / 3)


def test_mean_identity_normal_sample(normal_draws):
    total, mean = mean_identity_check(normal_draws, "theta")
    assert total == pytest.approx(mean, rel=1e-12)
    assert total == pytest.approx(-0.5, abs=0.015)


def test_zero_draw_counts_as_unintended():
    s = summarize_sample(np.array([-1.0, 0.0, 0.0, 1.0]), EffectThresholds())
    assert s.p == 0.25 and s.q == 0.75


def test_closed_ranges_at_thresholds():
    s = summarize_sample(np.array([-0.5, -0.4, 0.5, 0.6]), EffectThresholds(-0.5, 0.5))
    assert s.p == 0.25 and s.q == 0.5


def test_products_exact():
    x = np.random.default_rng(0).normal(size=999)
    s = summarize_sample(x, EffectThresholds(-0.3, 0.2))
    assert s.p_theta_int == s.p * s.theta_int
    assert s.q_theta_unint == s.q * s.theta_unint


def test_unit_change_scales():
    x = np.random.default_rng(1).normal(-0.2, 0.3, 400)
    d = PosteriorDraws.from_array(x)
    base = effect_summary(d, "theta", EffectThresholds(-0.1, 0.05))
    scaled = effect_summary(d, "theta", EffectThresholds(-1.0, 0.5, unit_change=10.0))
    assert scaled.p == base.p and scaled.q == base.q
    assert scaled.p_theta_int == pytest.approx(10 * base.p_theta_int, rel=1e-12)
    assert scaled.q_theta_unint == pytest.approx(10 * base.q_theta_unint, rel=1e-12)


@pytest.mark.parametrize("kwargs", [dict(theta_md=0.0), dict(theta_md=0.1),
                                    dict(theta_mu=-0.1), dict(unit_change=0.0)])
def test_threshold_validation(kwargs):
    with pytest.raises(ValidationError):
        EffectThresholds(**kwargs)


def test_missing_param_and_empty():
    d = PosteriorDraws.from_array([1.0, 2.0], "beta")
    with pytest.raises(KeyError, match="beta"):
        effect_summary(d, "gamma")
    with pytest.raises(ValidationError):
        summarize_sample(np.array([]), EffectThresholds())


def test_refuses_unconverged():
    rng = np.random.default_rng(0)
    x = np.stack([rng.normal(0, 1, 500), rng.normal(5, 1, 500)])
    d = PosteriorDraws(("t",), x[:, :, None])
    with pytest.raises(NotConvergedError):
        effect_summary(d, "t")
    assert effect_summary(d, "t", allow_unconverged=True).n_draws_used == 1000


finite_samples = st.lists(st.floats(-50, 50, allow_nan=False), min_size=1, max_size=200)


@given(finite_samples, st.floats(-5, -1e-3), st.floats(0, 5))
@settings(max_examples=200, deadline=None)
def test_partition_properties(values, md, mu):
    x = np.array(values)
    s = summarize_sample(x, EffectThresholds(md, mu))
    assert 0 <= s.p <= 1 and 0 <= s.q <= 1 and s.p + s.q <= 1 + 1e-15
    assert s.p_theta_int <= 0 <= s.q_theta_unint
    if s.theta_int is not None:
        assert s.theta_int <= md
    if s.theta_unint is not None:
        assert s.theta_unint >= mu


@given(finite_samples)
@settings(max_examples=200, deadline=None)
def test_default_thresholds_cover_everything(values):
    s = summarize_sample(np.array(values), EffectThresholds())
    assert s.p + s.q == pytest.approx(1.0)
    assert s.total == pytest.approx(math.fsum(values) / len(values), rel=1e-12, abs=1e-12)


@given(finite_samples, st.floats(-5, -1e-3), st.floats(0.0, 2.0))
@settings(max_examples=150, deadline=None)
def test_monotone_in_thresholds(values, md, step):
    x = np.array(values)
    a = summarize_sample(x, EffectThresholds(md, 0.1))
    b = summarize_sample(x, EffectThresholds(md - step, 0.1 + step))
    assert b.p <= a.p and b.q <= a.q
    if b.theta_int is not None:
        assert b.theta_int <= a.theta_int + 1e-12


def test_baseline_intercept_only():
    b0 = logit(0.26)
    d = PosteriorDraws.from_array(np.full(10, b0), INTERCEPT)
    data = Dataset([0, 1, 0, 1], None, np.zeros((4, 0)), ())
    pi = baseline_logodds(d, data)
    assert pi == pytest.approx(-1.046, abs=1e-3)
    assert inv_logit(pi) == pytest.approx(0.26)


def _two_cov_setup():
    draws = PosteriorDraws((INTERCEPT, "d", "a", "b"),
                           np.tile([0.0, -1.0, 0.5, 1.0], (1, 5, 1)))
    cov = np.array([[1.0, -2.0], [3.0, 0.0], [2.0, -1.0]])
    data = Dataset([0, 1, 1], [0, 1, 0], cov, ("a", "b"))
    return draws, data


def test_baseline_two_covariates():
    draws, data = _two_cov_setup()
    assert baseline_logodds(draws, data) == pytest.approx(0.5 * 2 + 1.0 * (-1))
    assert baseline_logodds(draws, data, BaselineSpec(overrides={"a": 0, "b": 0})) == 0.0
    spec = BaselineSpec(covariate_profile={"a": 4.0, "b": EMPIRICAL_MEAN})
    assert baseline_logodds(draws, data, spec) == pytest.approx(2.0 - 1.0)


def test_baseline_name_mismatch():
    draws, data = _two_cov_setup()
    with pytest.raises(ValidationError, match="zz"):
        baseline_logodds(draws, data, BaselineSpec(overrides={"zz": 0}))
    with pytest.raises(ValidationError):
        BaselineSpec(covariate_profile={"a": 1}, overrides={"a": 0})


def test_prob_curve_point_mass():
    d = PosteriorDraws.from_array(np.full(100, -1.0))
    out = prob_effect_curve(d, "theta", 0.0, [-1.0, -1.5])
    assert out[0][1] == 1.0
    assert out[0][0] == pytest.approx(inv_logit(-1.0)) == pytest.approx(0.2689, abs=1e-4)
    assert out[1][1] == 0.0 and math.isnan(out[1][0])


def test_prob_curve_truncated_normal(normal_sample, normal_draws):
    pi = logit(0.26)
    ((rev, prob),) = prob_effect_curve(normal_draws, "theta", pi, [-0.5])
    exp_prob, exp_mean = truncnorm_lower(-0.5, 0.5, -0.5)
    assert exp_mean == pytest.approx(-0.899, abs=1e-3)
    se = math.sqrt(exp_prob * (1 - exp_prob) / normal_sample.size)
    assert abs(prob - exp_prob) < 3 * se
    assert inv_logit(pi + exp_mean) == pytest.approx(0.125, abs=5e-4)
    assert rev == pytest.approx(inv_logit(pi + exp_mean), abs=0.005)
    ((rev_t, _),) = prob_effect_curve(normal_draws, "theta", pi, [-0.5], mode="threshold")
    assert rev_t == pytest.approx(inv_logit(pi - 0.5))


def test_prob_curve_monotone(normal_draws):
    grid = [STRICT_NEG] + [-0.1 * k for k in range(1, 20)]
    out = prob_effect_curve(normal_draws, "theta", logit(0.26), grid)
    valid = [(r, p) for r, p in out if not math.isnan(r)]
    revs = [r for r, _ in valid]
    probs = [p for _, p in valid]
    assert revs == sorted(revs, reverse=True)
    assert probs == sorted(probs, reverse=True)


def test_prob_curve_errors(normal_draws):
    with pytest.raises(ValidationError):
        prob_effect_curve(normal_draws, "theta", 0.0, [])
    with pytest.raises(ValidationError):
        prob_effect_curve(normal_draws, "theta", 0.0, [0.3])
    with pytest.raises(ValidationError):
        prob_effect_curve(normal_draws, "theta", 0.0, [-1], mode="bogus")


def test_or_to_logodds():
    assert or_to_logodds(1) == 0
    assert or_to_logodds(0.5) == pytest.approx(-0.6931, abs=1e-4)
    for o, want in zip((0.5, 0.25, 0.1, 0.05), (0.149, 0.081, 0.034, 0.017)):
        assert inv_logit(logit(0.26) + or_to_logodds(o)) == pytest.approx(want, abs=5e-4)
    with pytest.raises(ValidationError):
        or_to_logodds(0)
