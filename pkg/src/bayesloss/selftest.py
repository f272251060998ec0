"""Quick oracle checks runnable from the command line (``bayesloss selftest``)."""

from __future__ import annotations

import math

import numpy as np

from . import oracles
from .dataset import Dataset
from .effects import STRICT_NEG, EffectThresholds, effect_summary, mean_identity_check, or_to_logodds
from .loss import cost_ratio_sweep, critical_ratio, inv_logit, logit
from .posterior import INTERCEPT, PosteriorDraws
from .sampler import SamplerConfig, fit_logistic


def _check_truncated_normal(seed):
    rng = np.random.default_rng(seed)
    x = rng.normal(-0.5, 0.5, 10_000)
    draws = PosteriorDraws.from_array(x)
    worst = 0.0
    for md, mu in [(STRICT_NEG, 0.0), (-0.5, 0.5)]:
        s = effect_summary(draws, "theta", EffectThresholds(md, mu))
        md_val = 0.0 if md is STRICT_NEG else md
        exp_p, exp_q = oracles.truncnorm_products(-0.5, 0.5, md_val, mu)
        se_p = np.std(np.where(x <= md_val, x, 0.0)) / math.sqrt(x.size)
        se_q = np.std(np.where(x >= mu, x, 0.0)) / math.sqrt(x.size)
        worst = max(worst, abs(s.p_theta_int - exp_p) / se_p, abs(s.q_theta_unint - exp_q) / se_q)
    return worst < 3.0, f"max deviation {worst:.2f} Monte Carlo SE (limit 3)"


def _check_mean_identity(seed):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(100):
        x = rng.normal(rng.uniform(-2, 2), rng.uniform(0.1, 2), 1000)
        total, mean = mean_identity_check(PosteriorDraws.from_array(x), "theta")
        worst = max(worst, abs(total - mean) / abs(mean))
    return worst <= 1e-12, f"max relative gap {worst:.2e} (limit 1e-12)"


def _check_critical_ratio(seed):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(200):
        pi, delta = rng.uniform(-3, 3), rng.uniform(-3, 0)
        exact = critical_ratio(pi, delta)
        curve = cost_ratio_sweep(pi, delta)
        found = curve.crossover_ratio
        if found is None:
            gap = 0.0 if exact <= curve.ratio[0] else math.inf
        else:
            gap = abs(found - exact)
        worst = max(worst, gap)
    return worst <= 0.01 + 1e-12, f"max |sweep - closed form| {worst:.4f} (limit 0.01)"


def _check_odds_ratios(_seed):
    got = [inv_logit(logit(0.26) + or_to_logodds(o)) for o in (0.5, 0.25, 0.1, 0.05)]
    want = [0.149, 0.081, 0.034, 0.017]
    ok = all(abs(g - w) <= 5e-3 for g, w in zip(got, want))
    return ok, "revised likelihoods " + ", ".join(f"{g:.3f}" for g in got)


def _check_sampler(seed):
    y = np.r_[np.ones(26), np.zeros(74)]
    data = Dataset(y, None, np.zeros((100, 0)), ())
    draws = fit_logistic(data, SamplerConfig(n_iter=4000, n_warmup=1000, seed=seed))
    b0 = draws.pooled(INTERCEPT)
    mean, sd = oracles.intercept_posterior_moments(26, 100, 10.0)
    rel_m = abs(b0.mean() - mean) / abs(mean)
    rel_s = abs(b0.std(ddof=1) - sd) / sd
    return max(rel_m, rel_s) < 0.03, f"mean rel err {rel_m:.4f}, sd rel err {rel_s:.4f} (limit 0.03)"


CHECKS = [
    ("truncated-normal oracle", _check_truncated_normal),
    ("mean identity", _check_mean_identity),
    ("critical ratio vs sweep", _check_critical_ratio),
    ("odds-ratio conversion", _check_odds_ratios),
    ("intercept-only quadrature", _check_sampler),
]


def run(seed: int = 12345, echo=print) -> bool:
    ok_all = True
    for name, fn in CHECKS:
        ok, detail = fn(seed)
        ok_all &= bool(ok)
        echo(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
    return ok_all
