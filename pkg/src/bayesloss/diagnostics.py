"""Split-chain convergence diagnostics."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtri
from scipy.stats import rankdata

from .errors import ValidationError
from .posterior import PosteriorDraws

RHAT_THRESHOLD = 1.01


@dataclass(frozen=True)
class ConvergenceReport:
    rhat: dict
    ess_bulk: dict
    converged: bool
    messages: tuple = field(default_factory=tuple)


def _split(x: np.ndarray) -> np.ndarray:
    """(chains, n) -> (2*chains, n//2); the middle draw is dropped for odd n."""
    half = x.shape[1] // 2
    return np.concatenate([x[:, :half], x[:, -half:]], axis=0)


def rhat_from_chains(x: np.ndarray) -> float:
    """Split R-hat for one parameter given a ``(chains, n)`` array.

    Returns NaN when the within-chain variance is zero.
    """
    pieces = _split(np.asarray(x, dtype=float))
    n = pieces.shape[1]
    w = pieces.var(axis=1, ddof=1).mean()
    b = n * pieces.mean(axis=1).var(ddof=1)
    if not w > 0:
        return float("nan")
    return float(np.sqrt(((n - 1) / n * w + b / n) / w))


def _autocov_sum_ess(z: np.ndarray) -> float:
    """ESS for a (chains, n) array using Geyer's initial monotone sequence."""
    m, n = z.shape
    centered = z - z.mean(axis=1, keepdims=True)
    size = 1 << int(np.ceil(np.log2(2 * n)))
    f = np.fft.rfft(centered, n=size, axis=1)
    acov = np.fft.irfft(f * np.conj(f), n=size, axis=1)[:, :n] / n
    chain_var = acov[:, 0] * n / (n - 1)
    w = chain_var.mean()
    var_plus = w * (n - 1) / n
    if m > 1:
        var_plus += z.mean(axis=1).var(ddof=1)
    if not var_plus > 0:
        return float("nan")
    rho = 1.0 - (w - acov.mean(axis=0)) / var_plus
    rho[0] = 1.0
    # pair sums, truncated at the first negative pair, forced monotone
    total = 0.0
    prev = np.inf
    t = 0
    while t + 1 < n:
        pair = rho[t] + rho[t + 1]
        if pair < 0:
            break
        pair = min(pair, prev)
        total += pair
        prev = pair
        t += 2
    tau = -1.0 + 2.0 * total
    tau = max(tau, 1.0 / np.log10(m * n))
    return float(m * n / tau)


def ess_bulk_from_chains(x: np.ndarray) -> float:
    """Rank-normalized bulk ESS on split chains."""
    pieces = _split(np.asarray(x, dtype=float))
    ranks = rankdata(pieces, method="average").reshape(pieces.shape)
    s = pieces.size
    z = ndtri((ranks - 0.375) / (s + 0.25))
    return _autocov_sum_ess(z)


def split_rhat(draws: PosteriorDraws, with_ess: bool = True) -> ConvergenceReport:
    """Split-R-hat per parameter over the ``2 * n_chains`` half-chains.

    ``converged`` requires every R-hat to be finite and below 1.01. A
    parameter with zero within-chain variance gets NaN and a message instead
    of raising.
    """
    if draws.n_chains < 2:
        raise ValidationError(f"split R-hat needs at least 2 chains, got {draws.n_chains}")
    if draws.n_kept < 4:
        raise ValidationError(f"split R-hat needs at least 4 draws per chain, got {draws.n_kept}")
    rhat, ess, messages = {}, {}, []
    for name in draws.parameter_names:
        x = draws.chains(name)
        r = rhat_from_chains(x)
        rhat[name] = r
        if np.isnan(r):
            messages.append(f"{name}: zero within-chain variance, R-hat undefined")
            ess[name] = float("nan")
            continue
        ess[name] = ess_bulk_from_chains(x) if with_ess else float("nan")
        if r >= RHAT_THRESHOLD:
            messages.append(f"{name}: R-hat {r:.4f} >= {RHAT_THRESHOLD}")
    converged = all(np.isfinite(r) and r < RHAT_THRESHOLD for r in rhat.values())
    return ConvergenceReport(rhat, ess, converged, tuple(messages))
