"""Bayesian logistic regression by adaptive random-walk Metropolis.

Model::

    y_i ~ Bernoulli(inv_logit(b0 + b1 * d_i + x_i . gamma))

Predictors are centered and divided by their standard deviation before
sampling. In that standardized space every slope gets a Normal(0,
coef_prior_scale) prior, which is the same as a Normal(0,
coef_prior_scale / sd(x_j)) prior on the original slope, and the intercept of
the centered design gets Normal(0, intercept_prior_sd). Draws are mapped back
to the original scale before they are returned.

Each chain starts near the posterior mode and uses a diagonal Gaussian
proposal whose per-parameter widths come from the Laplace approximation. A
global multiplier is tuned toward ``target_accept`` by a Robbins-Monro
recursion during warmup only; the kernel is frozen for kept draws.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .dataset import Dataset
from .errors import SamplerDivergenceError, ValidationError
from .posterior import INTERCEPT, PosteriorDraws

MAX_INIT_RETRIES = 10


@dataclass(frozen=True)
class SamplerConfig:
    n_chains: int = 4
    n_iter: int = 10_000
    n_warmup: int = 1_000
    seed: int = 0
    coef_prior_scale: float = math.log(10)
    intercept_prior_sd: float = 10.0
    target_accept: float = 0.234

    def __post_init__(self):
        for name in ("n_chains", "n_iter", "n_warmup"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or isinstance(v, bool) or v < 1:
                raise ValidationError(f"{name} must be a positive integer, got {v!r}")
        if self.n_warmup >= self.n_iter:
            raise ValidationError(
                f"n_warmup ({self.n_warmup}) must be smaller than n_iter ({self.n_iter})")
        if not (isinstance(self.seed, (int, np.integer)) and 0 <= self.seed < 2**64):
            raise ValidationError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")
        if not (self.coef_prior_scale > 0 and self.intercept_prior_sd > 0):
            raise ValidationError("prior scales must be positive")
        if not 0 < self.target_accept < 1:
            raise ValidationError("target_accept must lie in (0, 1)")

    def to_dict(self):
        return asdict(self)


def chain_rng(seed: int, chain: int) -> np.random.Generator:
    """Counter-based generator for one chain, keyed by ``seed XOR chain``."""
    return np.random.Generator(np.random.Philox(int(seed) ^ int(chain)))


def find_collinear(design: np.ndarray, names, tol=None) -> list[str]:
    """Names of columns that add nothing to the rank of the preceding ones.

    ``design`` must already contain the intercept as its first column.
    """
    rank = 0
    kept = []
    bad = []
    for j in range(design.shape[1]):
        trial = design[:, kept + [j]]
        r = np.linalg.matrix_rank(trial, tol=tol)
        if r > rank:
            kept.append(j)
            rank = r
        else:
            bad.append(names[j])
    return bad


class _StandardizedModel:
    """Log posterior on the standardized, centered scale."""

    def __init__(self, data: Dataset, config: SamplerConfig):
        x = data.predictors()
        self.names = (INTERCEPT, *data.predictor_names)
        n, k = x.shape
        self.center = x.mean(axis=0)
        self.scale = x.std(axis=0, ddof=1) if n > 1 else np.ones(k)

        design = np.column_stack([np.ones(n), x - self.center])
        bad = find_collinear(design, self.names)
        if bad or np.any(self.scale <= 0):
            const = [self.names[j + 1] for j in range(k) if self.scale[j] <= 0]
            bad = sorted(set(bad) | set(const), key=self.names.index)
            raise ValidationError(
                f"design matrix is rank-deficient; collinear columns: {bad}")

        self.z = (x - self.center) / self.scale
        self.y = data.outcome
        # y . eta is linear in the parameters
        self.yz = np.concatenate([[self.y.sum()], self.z.T @ self.y])
        self.prior_sd = np.concatenate([[config.intercept_prior_sd],
                                        np.full(k, config.coef_prior_scale)])
        self.dim = k + 1

    def eta(self, theta: np.ndarray) -> np.ndarray:
        """Linear predictor; ``theta`` is ``(m, dim)``, result ``(m, n)``."""
        return theta[:, :1] + theta[:, 1:] @ self.z.T

    def logp(self, theta: np.ndarray) -> np.ndarray:
        theta = np.atleast_2d(theta)
        loglik = theta @ self.yz - np.logaddexp(0.0, self.eta(theta)).sum(axis=1)
        logprior = -0.5 * np.sum((theta / self.prior_sd) ** 2, axis=1)
        out = loglik + logprior
        return np.where(np.isfinite(out), out, -np.inf)

    def mode(self, max_iter=100):
        """Posterior mode and Hessian of -logp there (damped Newton)."""
        theta = np.zeros(self.dim)
        design = np.column_stack([np.ones(len(self.y)), self.z])
        prec = 1.0 / self.prior_sd ** 2
        cur = self.logp(theta)[0]
        for _ in range(max_iter):
            mu = 1.0 / (1.0 + np.exp(-(design @ theta)))
            grad = design.T @ (self.y - mu) - prec * theta
            hess = (design * (mu * (1 - mu))[:, None]).T @ design + np.diag(prec)
            step = np.linalg.solve(hess, grad)
            t = 1.0
            while t > 1e-8:
                cand = theta + t * step
                val = self.logp(cand)[0]
                if val >= cur:
                    break
                t *= 0.5
            theta, prev, cur = cand, cur, val
            if abs(cur - prev) < 1e-12 and np.max(np.abs(t * step)) < 1e-10:
                break
        mu = 1.0 / (1.0 + np.exp(-(design @ theta)))
        hess = (design * (mu * (1 - mu))[:, None]).T @ design + np.diag(prec)
        return theta, hess

    def to_original(self, theta: np.ndarray) -> np.ndarray:
        """Map standardized draws ``(..., dim)`` to original-scale coefficients."""
        slopes = theta[..., 1:] / self.scale
        intercept = theta[..., 0] - slopes @ self.center
        return np.concatenate([intercept[..., None], slopes], axis=-1)


def _adapt_gain(t: int) -> float:
    return (t + 1) ** -0.6


def fit_logistic(data: Dataset, config: SamplerConfig = SamplerConfig()) -> PosteriorDraws:
    """Sample the posterior of the logistic model.

    Returns post-warmup draws for the intercept, the treatment slope (named
    after the treatment column) and every covariate slope. The same data,
    config and seed always give bit-identical draws.
    """
    model = _StandardizedModel(data, config)
    dim = model.dim
    n_chains, n_iter, n_warmup = config.n_chains, config.n_iter, config.n_warmup

    mode, hess = model.mode()
    cov = np.linalg.inv(hess)
    laplace_sd = np.sqrt(np.diag(cov))
    base_scale = laplace_sd * 2.38 / math.sqrt(dim)

    rngs = [chain_rng(config.seed, c) for c in range(n_chains)]
    theta = np.empty((n_chains, dim))
    for c, rng in enumerate(rngs):
        for _ in range(MAX_INIT_RETRIES):
            start = mode + laplace_sd * rng.standard_normal(dim)
            if np.isfinite(model.logp(start)[0]):
                break
        else:
            raise SamplerDivergenceError(
                f"chain {c}: no finite log-posterior after {MAX_INIT_RETRIES} initial points")
        theta[c] = start
    noise = np.stack([rng.standard_normal((n_iter, dim)) for rng in rngs], axis=1)
    log_u = np.stack([np.log(rng.random(n_iter)) for rng in rngs], axis=1)

    cur_lp = model.logp(theta)
    log_lambda = np.zeros(n_chains)
    kept = np.empty((n_chains, n_iter - n_warmup, dim))
    finite_proposals = np.zeros(n_chains, dtype=int)
    accepted = np.zeros(n_chains, dtype=int)

    for t in range(n_iter):
        step = np.exp(log_lambda)[:, None] * base_scale
        prop = theta + step * noise[t]
        prop_lp = model.logp(prop)
        finite = np.isfinite(prop_lp)
        finite_proposals += finite
        log_ratio = np.where(finite, prop_lp - cur_lp, -np.inf)
        accept = log_u[t] < log_ratio
        theta = np.where(accept[:, None], prop, theta)
        cur_lp = np.where(accept, prop_lp, cur_lp)
        if t < n_warmup:
            alpha = np.exp(np.minimum(log_ratio, 0.0))
            log_lambda = log_lambda + _adapt_gain(t) * (alpha - config.target_accept)
            if t == n_warmup - 1 and np.any(finite_proposals == 0):
                bad = np.flatnonzero(finite_proposals == 0).tolist()
                raise SamplerDivergenceError(
                    f"chains {bad}: every warmup proposal had log-posterior -inf")
        else:
            kept[:, t - n_warmup] = theta
            accepted += accept

    original = model.to_original(kept)
    scale_info = {
        name: {"center": float(m), "scale": float(s)}
        for name, m, s in zip(model.names[1:], model.center, model.scale)
    }
    scale_info[INTERCEPT] = {"centered_design": True}
    sampler_info = {
        "acceptance_rate": (accepted / (n_iter - n_warmup)).tolist(),
        "step_multiplier": np.exp(log_lambda).tolist(),
    }
    return PosteriorDraws(model.names, original, scale_info=scale_info,
                          treatment_name=data.treatment_name, sampler_info=sampler_info)
