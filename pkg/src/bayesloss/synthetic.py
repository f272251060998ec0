"""Synthetic datasets for demos and tests.

``conflict_dataset`` mimics the structure of a post-civil-war study: a
binary recurrence outcome, a peacekeeping indicator that is only ever 1 for
wars ending in a peace agreement, victory dummies (peace agreement is the
omitted category) and a continuous severity covariate.
"""

from __future__ import annotations

import numpy as np

from .dataset import Dataset
from .loss import inv_logit


def logistic_dataset(n=500, intercept=-1.0, effect=-1.5, gammas=(), seed=0,
                     treat_prob=0.5, names=None) -> Dataset:
    """Binary treatment plus standard-normal covariates with the given slopes."""
    rng = np.random.default_rng(seed)
    d = (rng.random(n) < treat_prob).astype(float)
    x = rng.standard_normal((n, len(gammas)))
    eta = intercept + effect * d + x @ np.asarray(gammas, dtype=float)
    y = (rng.random(n) < inv_logit(eta)).astype(float)
    names = tuple(names) if names else tuple(f"x{j + 1}" for j in range(len(gammas)))
    return Dataset(y, d, x, names, "y", "d")


CONFLICT_OVERRIDES = {"gov_victory": 0.0, "rebel_victory": 0.0}


# (rows, events) per category; 13/50 = 26% recurrence for untreated peace
# agreements and 2/30 for peacekeeping, a log-odds gap of about -1.6
CONFLICT_CELLS = {"peace": (50, 13), "pko": (30, 2), "gov": (19, 4), "rebel": (12, 2)}


def conflict_dataset(seed=0, cells=None) -> Dataset:
    """Fixed event counts per outcome-of-war category (111 rows by default).

    ``seed`` only shuffles row order and draws the severity covariate, which
    is unrelated to the outcome, so every seed yields a similar posterior.
    """
    rng = np.random.default_rng(seed)
    cells = cells or CONFLICT_CELLS
    cat, y = [], []
    for name, (rows, events) in cells.items():
        cat += [name] * rows
        y += [1.0] * events + [0.0] * (rows - events)
    cat, y = np.array(cat), np.array(y)
    order = rng.permutation(cat.size)
    cat, y = cat[order], y[order]
    log_deaths = rng.normal(9.0, 1.5, cat.size)
    cov = np.column_stack([(cat == "gov").astype(float), (cat == "rebel").astype(float), log_deaths])
    return Dataset(y, (cat == "pko").astype(float), cov,
                   ("gov_victory", "rebel_victory", "log_deaths"), "recurrence", "pko")
