"""Expected losses for implementing a policy or not.

Binary outcome::

    E[loss] = C_p * I + C_e * inv_logit(pi + (p*theta_int + q*theta_unint) * I)

Continuous outcome on a common cost scale::

    E[loss] = C_p * I + C_s + f((p*theta_int + q*theta_unint) * I)

with ``f`` the identity unless the caller supplies a conversion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit, logit as _logit

from .errors import ValidationError


def inv_logit(x):
    """Overflow-safe ``1 / (1 + exp(-x))``; accepts scalars or arrays, rejects NaN."""
    arr = np.asarray(x, dtype=float)
    if np.any(np.isnan(arr)):
        raise ValidationError("inv_logit of NaN")
    out = expit(arr)
    return float(out) if out.ndim == 0 else out


def logit(p):
    arr = np.asarray(p, dtype=float)
    if np.any((arr < 0) | (arr > 1) | np.isnan(arr)):
        raise ValidationError("logit needs probabilities in [0, 1]")
    out = _logit(arr)
    return float(out) if out.ndim == 0 else out


def total_effect(summary) -> float:
    """Accept an EffectSummary (anything with the two products) or a plain number."""
    if isinstance(summary, (int, float, np.floating)):
        return float(summary)
    return float(summary.p_theta_int + summary.q_theta_unint)


@dataclass(frozen=True)
class LossScenario:
    pi: float
    summary: object
    c_p: float = 1.0
    c_e: float = 1.0

    def __post_init__(self):
        if not (self.c_p > 0 and self.c_e > 0):
            raise ValidationError(f"costs must be positive, got C_p={self.c_p}, C_e={self.c_e}")
        if not math.isfinite(self.pi):
            raise ValidationError("baseline log odds must be finite")


def expected_loss_binary(s: LossScenario, implement: bool) -> float:
    i = 1.0 if implement else 0.0
    return s.c_p * i + s.c_e * inv_logit(s.pi + total_effect(s.summary) * i)


def _identity(x):
    return x


def expected_loss_continuous(c_p: float, c_s: float, summary, implement: bool,
                             transform=_identity) -> float:
    """Loss when the outcome and both costs share one scale.

    ``transform`` converts the weighted effect to that cost scale; the default
    identity assumes it already is.
    """
    if not c_p > 0:
        raise ValidationError(f"C_p must be positive, got {c_p}")
    if not math.isfinite(c_s):
        raise ValidationError("C_s must be finite")
    i = 1.0 if implement else 0.0
    return c_p * i + (c_s + transform(total_effect(summary) * i))


def critical_ratio(pi: float, summary) -> float:
    """Cost ratio C_p/C_e below which implementing is strictly better."""
    delta = total_effect(summary)
    return inv_logit(pi) - inv_logit(pi + delta)


@dataclass(frozen=True)
class DecisionCurve:
    ratio: np.ndarray
    loss_implement: np.ndarray
    loss_not: np.ndarray
    crossover_ratio: float | None
    grid_step: float
    critical_ratio: float = field(default=float("nan"))

    @property
    def points(self):
        return list(zip(self.ratio.tolist(), self.loss_implement.tolist(), self.loss_not.tolist()))

    @property
    def difference(self) -> np.ndarray:
        return self.loss_implement - self.loss_not

    def sign_changes(self) -> int:
        prefer = self.difference < 0
        return int(np.count_nonzero(prefer[1:] != prefer[:-1]))


def ratio_grid(grid_step=0.01, ratio_min=0.01, ratio_max=0.99) -> np.ndarray:
    if not grid_step > 0:
        raise ValidationError(f"grid_step must be positive, got {grid_step}")
    if not 0 < ratio_min <= ratio_max:
        raise ValidationError("need 0 < ratio_min <= ratio_max")
    n = int(math.floor((ratio_max - ratio_min) / grid_step + 1e-9)) + 1
    return np.round(ratio_min + grid_step * np.arange(n), 12)


def cost_ratio_sweep(pi: float, summary, grid_step: float = 0.01,
                     ratio_min: float = 0.01, ratio_max: float = 0.99) -> DecisionCurve:
    """Losses with C_p = 1 and C_e = 1/r over a grid of ratios r.

    The crossover is the largest grid ratio where implementing is strictly
    cheaper; it is ``None`` when no grid point, or every grid point, prefers
    implementing. Ties go to not implementing.
    """
    r = ratio_grid(grid_step, ratio_min, ratio_max)
    delta = total_effect(summary)
    loss_impl = np.empty(r.size)
    loss_not = np.empty(r.size)
    for k, ratio in enumerate(r):
        s = LossScenario(pi, delta, c_p=1.0, c_e=1.0 / ratio)
        loss_impl[k] = expected_loss_binary(s, True)
        loss_not[k] = expected_loss_binary(s, False)
    better = loss_impl < loss_not
    crossover = None
    if better.any() and not better.all():
        crossover = float(r[np.flatnonzero(better)[-1]])
    return DecisionCurve(r, loss_impl, loss_not, crossover, float(grid_step),
                         critical_ratio(pi, delta))
