"""Closed-form and quadrature reference values used by the self-test.

These do not share code with the estimators they check.
"""

from __future__ import annotations

import numpy as np
from scipy.integrate import trapezoid
from scipy.stats import norm


def truncnorm_lower(mu: float, sd: float, upper: float):
    """``(P(X <= upper), E[X | X <= upper])`` for X ~ Normal(mu, sd)."""
    a = (upper - mu) / sd
    prob = norm.cdf(a)
    return float(prob), float(mu - sd * norm.pdf(a) / prob)


def truncnorm_upper(mu: float, sd: float, lower: float):
    """``(P(X >= lower), E[X | X >= lower])`` for X ~ Normal(mu, sd)."""
    a = (lower - mu) / sd
    prob = norm.sf(a)
    return float(prob), float(mu + sd * norm.pdf(a) / prob)


def truncnorm_products(mu, sd, theta_md, theta_mu):
    """``(p * theta_int, q * theta_unint)`` for a normal posterior."""
    p, ti = truncnorm_lower(mu, sd, theta_md)
    q, tu = truncnorm_upper(mu, sd, theta_mu)
    return p * ti, q * tu


def intercept_posterior_moments(n_events: int, n: int, prior_sd: float = 10.0,
                                grid_points: int = 200_001, half_width: float = 30.0):
    """Mean and sd of the intercept-only logistic posterior by grid quadrature.

    Posterior density is ``Bernoulli^n x Normal(0, prior_sd)`` in the
    intercept alone; integrated with the trapezoid rule on a dense grid
    centered at the empirical log odds.
    """
    k = n_events
    center = np.log((k + 0.5) / (n - k + 0.5))
    b = np.linspace(center - half_width, center + half_width, grid_points)
    # log(sigmoid(b)) = -log1p(exp(-b)), log(1 - sigmoid(b)) = -log1p(exp(b))
    logp = (-k * np.logaddexp(0.0, -b) - (n - k) * np.logaddexp(0.0, b)
            - 0.5 * (b / prior_sd) ** 2)
    w = np.exp(logp - logp.max())
    z = trapezoid(w, b)
    mean = trapezoid(b * w, b) / z
    var = trapezoid((b - mean) ** 2 * w, b) / z
    return float(mean), float(np.sqrt(var))
