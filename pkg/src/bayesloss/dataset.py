"""Binary-outcome dataset container."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError


def _frozen(values, name, ndim):
    arr = np.array(values, dtype=float)
    if arr.ndim != ndim:
        raise ValidationError(f"{name} must be {ndim}-dimensional, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Dataset:
    """Outcome, treatment and covariates for the logistic model.

    ``treatment`` may be ``None`` for intercept/covariate-only models.
    Arrays are copied on construction and made read-only.
    """

    outcome: np.ndarray
    treatment: np.ndarray | None
    covariates: np.ndarray
    covariate_names: tuple[str, ...] = ()
    outcome_name: str = "y"
    treatment_name: str | None = "d"
    source: str | None = field(default=None, compare=False)

    def __post_init__(self):
        y = _frozen(self.outcome, "outcome", 1)
        n = y.shape[0]
        if n < 2:
            raise ValidationError(f"need at least 2 rows, got {n}")
        d = None
        if self.treatment is not None:
            d = _frozen(self.treatment, "treatment", 1)
            if d.shape[0] != n:
                raise ValidationError("treatment length does not match outcome")
        cov = np.asarray(self.covariates, dtype=float)
        if cov.size == 0:
            cov = np.zeros((n, 0))
        cov = _frozen(cov, "covariates", 2)
        if cov.shape[0] != n:
            raise ValidationError("covariate rows do not match outcome length")
        names = tuple(self.covariate_names)
        if len(names) != cov.shape[1]:
            raise ValidationError(
                f"{cov.shape[1]} covariate columns but {len(names)} names")
        all_names = [self.outcome_name] + ([self.treatment_name] if d is not None else []) + list(names)
        if len(set(all_names)) != len(all_names):
            raise ValidationError(f"column names must be unique: {all_names}")

        for label, arr in [("outcome", y), ("treatment", d), ("covariates", cov)]:
            if arr is not None and not np.all(np.isfinite(arr)):
                raise ValidationError(f"{label} contains missing or non-finite values")
        if not np.all((y == 0) | (y == 1)):
            bad = sorted(set(y[(y != 0) & (y != 1)].tolist()))
            raise ValidationError(f"outcome must be coded 0/1, found {bad[:5]}")
        if y.min() == y.max():
            raise ValidationError(
                f"outcome has a single class ({int(y[0])}); both 0 and 1 are required")

        object.__setattr__(self, "outcome", y)
        object.__setattr__(self, "treatment", d)
        object.__setattr__(self, "covariates", cov)
        object.__setattr__(self, "covariate_names", names)
        if d is None:
            object.__setattr__(self, "treatment_name", None)

    @property
    def n_rows(self) -> int:
        return self.outcome.shape[0]

    @property
    def predictor_names(self) -> tuple[str, ...]:
        """Treatment (if any) followed by covariates, in design-matrix order."""
        head = (self.treatment_name,) if self.treatment is not None else ()
        return head + self.covariate_names

    def predictors(self) -> np.ndarray:
        """Design matrix without the intercept column."""
        if self.treatment is None:
            return np.array(self.covariates)
        return np.column_stack([self.treatment, self.covariates])

    def column(self, name: str) -> np.ndarray:
        if name == self.outcome_name:
            return self.outcome
        if self.treatment is not None and name == self.treatment_name:
            return self.treatment
        if name in self.covariate_names:
            return self.covariates[:, self.covariate_names.index(name)]
        raise KeyError(f"no column {name!r}; available: {[self.outcome_name, *self.predictor_names]}")

    def replace_column(self, name: str, values) -> "Dataset":
        """Return a copy with one column swapped out."""
        values = np.asarray(values, dtype=float)
        outcome, treatment, cov = self.outcome, self.treatment, np.array(self.covariates)
        if name == self.outcome_name:
            outcome = values
        elif self.treatment is not None and name == self.treatment_name:
            treatment = values
        elif name in self.covariate_names:
            cov[:, self.covariate_names.index(name)] = values
        else:
            raise KeyError(f"no column {name!r}")
        return Dataset(outcome, treatment, cov, self.covariate_names,
                       self.outcome_name, self.treatment_name, self.source)

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        same_t = (self.treatment is None and other.treatment is None) or (
            self.treatment is not None and other.treatment is not None
            and np.array_equal(self.treatment, other.treatment))
        return (self.outcome_name == other.outcome_name
                and self.treatment_name == other.treatment_name
                and self.covariate_names == other.covariate_names
                and np.array_equal(self.outcome, other.outcome)
                and same_t
                and np.array_equal(self.covariates, other.covariates))
