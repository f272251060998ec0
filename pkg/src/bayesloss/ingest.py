"""Reading datasets and checking outcome/treatment coding."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dataset import Dataset
from .errors import DrawsParseError, ValidationError
from .posterior import _open_text, format_float

CODING_ADVISORY = (
    "Confirm that outcome = 1 marks the undesirable event and that larger treatment "
    "values are expected to reduce its likelihood; recode with flip_binary otherwise."
)


@dataclass(frozen=True)
class CodingReport:
    outcome_ok: bool
    treatment_direction_note: str
    recodes_applied: tuple = field(default_factory=tuple)

    def to_dict(self):
        return {"outcome_ok": self.outcome_ok,
                "treatment_direction_note": self.treatment_direction_note,
                "recodes_applied": [list(r) for r in self.recodes_applied]}


def load_dataset(path, outcome: str, treatment: str | None, drop=()) -> Dataset:
    """Read a CSV (optionally ``.gz``) into a Dataset.

    Every column other than the outcome, the treatment and ``drop`` becomes a
    covariate. Empty cells are rejected with their line numbers.
    """
    path = Path(path)
    with _open_text(path, "r") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header:
            raise DrawsParseError("missing header", row=1)
        header = [h.strip() for h in header]
        wanted = [outcome] + ([treatment] if treatment else []) + list(drop)
        absent = [c for c in wanted if c not in header]
        if absent:
            raise ValidationError(f"columns not found in {path.name}: {absent}; header is {header}")
        rows, missing = [], []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise DrawsParseError(f"expected {len(header)} fields, got {len(row)}", row=lineno)
            if any(cell.strip() == "" for cell in row):
                missing.append(lineno)
                continue
            try:
                rows.append([float(cell) for cell in row])
            except ValueError:
                raise DrawsParseError(f"non-numeric cell in {row}", row=lineno) from None
    if missing:
        raise ValidationError(f"rows with missing values at lines {missing[:20]}")
    if len(rows) < 2:
        raise ValidationError(f"need at least 2 data rows, got {len(rows)}")
    table = np.array(rows)
    col = {name: j for j, name in enumerate(header)}
    cov_names = tuple(h for h in header if h not in set(wanted))
    cov = table[:, [col[c] for c in cov_names]] if cov_names else np.zeros((len(rows), 0))
    return Dataset(
        outcome=table[:, col[outcome]],
        treatment=table[:, col[treatment]] if treatment else None,
        covariates=cov,
        covariate_names=cov_names,
        outcome_name=outcome,
        treatment_name=treatment,
        source=str(path),
    )


def write_dataset(data: Dataset, path) -> None:
    names = [data.outcome_name, *data.predictor_names]
    cols = [data.outcome] + ([data.treatment] if data.treatment is not None else []) + \
        [data.covariates[:, j] for j in range(data.covariates.shape[1])]
    with _open_text(path, "w") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(names)
        for row in zip(*cols):
            w.writerow([format_float(v) for v in row])


def _is_binary(x: np.ndarray) -> bool:
    return bool(np.all((x == 0) | (x == 1)))


def flip_binary(data: Dataset, column: str, report: CodingReport | None = None):
    """Recode a 0/1 column as ``1 - x``; returns ``(dataset, report)``."""
    x = data.column(column)
    if not _is_binary(x):
        raise ValidationError(f"column {column!r} is not coded 0/1")
    flipped = data.replace_column(column, 1.0 - x)
    base = report or validate_coding(flipped)
    return flipped, CodingReport(base.outcome_ok, base.treatment_direction_note,
                                 tuple(base.recodes_applied) + ((column, "flip_binary"),))


def revert_recodes(data: Dataset, report: CodingReport) -> Dataset:
    """Undo every recode in ``report``, most recent first."""
    for column, transform in reversed(report.recodes_applied):
        if transform != "flip_binary":
            raise ValidationError(f"don't know how to revert {transform!r}")
        data = data.replace_column(column, 1.0 - data.column(column))
    return data


def validate_coding(data: Dataset) -> CodingReport:
    """Structural coding checks plus the direction advisory.

    Which outcome value is undesirable, and which way the treatment should
    push, cannot be read off the data; the note asks the user to confirm.
    """
    y = data.outcome
    if not _is_binary(y):
        raise ValidationError("outcome must be coded 0/1")
    if y.min() == y.max():
        raise ValidationError("outcome has a single class")
    notes = [CODING_ADVISORY]
    if data.treatment is None:
        notes.append("No treatment column: only the intercept and covariates are modeled.")
    elif not _is_binary(data.treatment):
        notes.append(
            f"Treatment {data.treatment_name!r} is continuous: set unit_change to the size of "
            "the change of interest when summarizing effects.")
    return CodingReport(True, " ".join(notes), ())
