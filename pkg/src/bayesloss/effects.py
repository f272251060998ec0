"""Posterior summaries that feed the loss function.

A treatment-effect posterior (log-odds) is cut into three ranges:

* intended effects, ``theta <= theta_md`` (or ``theta < 0`` for ``STRICT_NEG``),
* practically null values strictly between the two thresholds,
* unintended effects, ``theta >= theta_mu``.

Each tail is summarized by its probability mass times its conditional mean.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dataset import Dataset
from .diagnostics import split_rhat
from .errors import NotConvergedError, ValidationError
from .posterior import INTERCEPT, PosteriorDraws
from .loss import inv_logit


class _StrictNeg:
    """Threshold marker for the open range ``theta < 0``."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "STRICT_NEG"

    def __reduce__(self):
        return (_StrictNeg, ())


STRICT_NEG = _StrictNeg()


class _EmpiricalMean:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "EMPIRICAL_MEAN"


EMPIRICAL_MEAN = _EmpiricalMean()


def threshold_label(t) -> str:
    return "strict_neg" if t is STRICT_NEG else repr(float(t))


@dataclass(frozen=True)
class EffectThresholds:
    theta_md: float | _StrictNeg = STRICT_NEG
    theta_mu: float = 0.0
    unit_change: float = 1.0

    def __post_init__(self):
        if self.theta_md is not STRICT_NEG:
            md = float(self.theta_md)
            if not md < 0:
                raise ValidationError(f"theta_md must be negative, got {md}")
            object.__setattr__(self, "theta_md", md)
        mu = float(self.theta_mu)
        if not mu >= 0:
            raise ValidationError(f"theta_mu must be >= 0, got {mu}")
        object.__setattr__(self, "theta_mu", mu)
        if not (math.isfinite(self.unit_change) and self.unit_change != 0):
            raise ValidationError("unit_change must be a nonzero finite number")

    def to_dict(self):
        return {"theta_md": threshold_label(self.theta_md) if self.theta_md is STRICT_NEG
                else self.theta_md,
                "theta_mu": self.theta_mu, "unit_change": self.unit_change}


@dataclass(frozen=True)
class EffectSummary:
    """``theta_int``/``theta_unint`` are ``None`` when their range holds no draws."""

    p: float
    theta_int: float | None
    q: float
    theta_unint: float | None
    p_theta_int: float
    q_theta_unint: float
    n_draws_used: int

    @property
    def total(self) -> float:
        """Combined shift in log odds, ``p*theta_int + q*theta_unint``."""
        return self.p_theta_int + self.q_theta_unint

    def to_dict(self):
        return {
            "p": self.p, "theta_int": self.theta_int,
            "q": self.q, "theta_unint": self.theta_unint,
            "p_theta_int": self.p_theta_int, "q_theta_unint": self.q_theta_unint,
            "total_effect": self.total, "n_draws_used": self.n_draws_used,
        }


def _check_converged(draws: PosteriorDraws, allow_unconverged: bool):
    # a single chain or very short chains cannot be assessed; pass them through
    if allow_unconverged or draws.n_chains < 2 or draws.n_kept < 4:
        return
    report = split_rhat(draws, with_ess=False)
    if not report.converged:
        raise NotConvergedError(
            "chains have not converged (" + "; ".join(report.messages)
            + "); pass allow_unconverged=True to summarize anyway")


def effect_draws(draws: PosteriorDraws, param: str, unit_change: float = 1.0) -> np.ndarray:
    """Pooled draws of ``param`` times ``unit_change``."""
    x = draws.pooled(param)
    if x.size == 0:
        raise ValidationError("posterior has no draws")
    return x * unit_change if unit_change != 1.0 else x


def _tail(x: np.ndarray, mask: np.ndarray):
    n_in = int(mask.sum())
    if n_in == 0:
        return 0.0, None, 0.0
    prob = n_in / x.size
    sel = x[mask]
    # the division can land one ulp outside the selected values
    cond = min(max(math.fsum(sel) / n_in, float(sel.min())), float(sel.max()))
    return prob, cond, prob * cond


def summarize_sample(x: np.ndarray, thr: EffectThresholds) -> EffectSummary:
    """Effect summary of an already-scaled flat sample."""
    x = np.asarray(x, dtype=float)
    if x.size == 0:
        raise ValidationError("posterior has no draws")
    low = x < 0 if thr.theta_md is STRICT_NEG else x <= thr.theta_md
    high = x >= thr.theta_mu
    p, theta_int, pti = _tail(x, low)
    q, theta_unint, qtu = _tail(x, high)
    return EffectSummary(p, theta_int, q, theta_unint, pti, qtu, int(x.size))


def effect_summary(draws: PosteriorDraws, param: str, thr: EffectThresholds = EffectThresholds(),
                   allow_unconverged: bool = False) -> EffectSummary:
    """Probability-weighted intended and unintended effects of ``param``.

    Draws from all chains are pooled; when there are enough chains to judge,
    unconverged draws are refused unless ``allow_unconverged`` is set.
    """
    x = effect_draws(draws, param, thr.unit_change)
    _check_converged(draws, allow_unconverged)
    return summarize_sample(x, thr)


def mean_identity_check(draws: PosteriorDraws, param: str, unit_change: float = 1.0,
                        allow_unconverged: bool = True) -> tuple[float, float]:
    """``(p_theta_int + q_theta_unint, sample mean)`` with no null region.

    The two numbers agree up to rounding because the two tails partition the
    sample.
    """
    x = effect_draws(draws, param, unit_change)
    if not allow_unconverged:
        _check_converged(draws, False)
    s = summarize_sample(x, EffectThresholds(STRICT_NEG, 0.0))
    return s.total, math.fsum(x) / x.size


@dataclass(frozen=True)
class BaselineSpec:
    """How each covariate is fixed when building the baseline log odds.

    Covariates named in neither map use their empirical mean.
    """

    covariate_profile: dict = field(default_factory=dict)
    overrides: dict = field(default_factory=dict)

    def __post_init__(self):
        both = set(self.covariate_profile) & set(self.overrides)
        if both:
            raise ValidationError(f"covariates given both a profile value and an override: {sorted(both)}")


def baseline_logodds(draws: PosteriorDraws, data: Dataset, spec: BaselineSpec = BaselineSpec(),
                     intercept: str = INTERCEPT) -> float:
    """Posterior-mean intercept plus covariate terms at their fixed values.

    Because the linear predictor is linear, averaging it over rows is the
    same as evaluating it at the column means. The treatment term is left
    out; it enters through the loss function.
    """
    means = draws.posterior_means()
    if intercept not in means:
        raise ValidationError(f"intercept {intercept!r} not among parameters {list(means)}")
    covs = data.covariate_names
    missing = [c for c in covs if c not in means]
    unknown = [c for c in list(spec.covariate_profile) + list(spec.overrides) if c not in covs]
    if missing or unknown:
        raise ValidationError(
            f"covariate names do not match the fitted model: not in draws {missing}, "
            f"not in data {unknown}")
    pi = means[intercept]
    for j, name in enumerate(covs):
        if name in spec.overrides:
            value = float(spec.overrides[name])
        else:
            value = spec.covariate_profile.get(name, EMPIRICAL_MEAN)
            value = float(data.covariates[:, j].mean()) if value is EMPIRICAL_MEAN else float(value)
        pi += means[name] * value
    return float(pi)


CURVE_MODES = ("conditional_mean", "threshold")


def prob_effect_curve(draws: PosteriorDraws, param: str, pi: float, grid,
                      mode: str = "conditional_mean", unit_change: float = 1.0,
                      allow_unconverged: bool = False) -> list[tuple[float, float]]:
    """``(revised_likelihood, probability)`` for each minimum desired effect in ``grid``.

    ``probability`` is P(theta <= t). In ``threshold`` mode the revised
    likelihood is ``inv_logit(pi + t)``; in ``conditional_mean`` mode it is
    ``inv_logit(pi + E[theta | theta <= t])``, which is NaN when no draw
    reaches ``t``.
    """
    if mode not in CURVE_MODES:
        raise ValidationError(f"mode must be one of {CURVE_MODES}, got {mode!r}")
    grid = list(grid)
    if not grid:
        raise ValidationError("grid is empty")
    if not math.isfinite(pi):
        raise ValidationError("baseline log odds must be finite")
    x = effect_draws(draws, param, unit_change)
    _check_converged(draws, allow_unconverged)
    out = []
    for t in grid:
        if t is STRICT_NEG:
            mask, t_val = x < 0, 0.0
        else:
            t_val = float(t)
            if not t_val < 0:
                raise ValidationError(f"grid values must be negative, got {t_val}")
            mask = x <= t_val
        prob, cond, _ = _tail(x, mask)
        if mode == "threshold":
            revised = float(inv_logit(pi + t_val))
        else:
            revised = float(inv_logit(pi + cond)) if cond is not None else float("nan")
        out.append((revised, prob))
    return out


def or_to_logodds(odds_ratio: float) -> float:
    """Natural log of an odds ratio."""
    if not odds_ratio > 0:
        raise ValidationError(f"odds ratio must be positive, got {odds_ratio}")
    return math.log(odds_ratio)
