"""Posterior draws container and the draws CSV format.

The CSV layout is ``chain,iter,<param1>,<param2>,...`` with one row per kept
iteration. Chain ids are labels: any set of integers is accepted on import and
chains come back ordered by id.
"""

from __future__ import annotations

import csv
import gzip
import io
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DrawsParseError, ValidationError

INTERCEPT = "(Intercept)"


@dataclass(frozen=True, eq=False)
class PosteriorDraws:
    """Post-warmup draws with shape ``(n_chains, n_kept, n_params)``.

    Values are always on the original (uncentered, unscaled) log-odds scale.
    ``scale_info`` maps parameter name to whatever centering/scaling the
    sampler used internally; it is empty for imported draws.
    ``chain_ids`` keeps the labels read from a file (``0..n-1`` otherwise).
    """

    parameter_names: tuple[str, ...]
    draws: np.ndarray
    scale_info: dict = field(default_factory=dict)
    treatment_name: str | None = None
    chain_ids: tuple[int, ...] | None = None
    sampler_info: dict = field(default_factory=dict)

    def __post_init__(self):
        names = tuple(self.parameter_names)
        if len(set(names)) != len(names):
            raise ValidationError(f"parameter names must be unique: {names}")
        arr = np.array(self.draws, dtype=float)
        if arr.ndim != 3 or arr.shape[2] != len(names):
            raise ValidationError(
                f"draws must have shape (chains, iterations, {len(names)}), got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValidationError("draws contain NaN or Inf")
        arr.setflags(write=False)
        ids = tuple(range(arr.shape[0])) if self.chain_ids is None else tuple(self.chain_ids)
        if len(ids) != arr.shape[0]:
            raise ValidationError("chain_ids length does not match number of chains")
        if self.treatment_name is not None and self.treatment_name not in names:
            raise ValidationError(f"treatment {self.treatment_name!r} not among parameters")
        object.__setattr__(self, "parameter_names", names)
        object.__setattr__(self, "draws", arr)
        object.__setattr__(self, "chain_ids", ids)

    @classmethod
    def from_array(cls, values, name="theta", n_chains=1):
        """Wrap a flat sample of one parameter, split evenly into ``n_chains``."""
        values = np.asarray(values, dtype=float).ravel()
        if values.size % n_chains:
            raise ValidationError("sample size is not divisible by n_chains")
        return cls((name,), values.reshape(n_chains, -1, 1))

    @property
    def n_chains(self) -> int:
        return self.draws.shape[0]

    @property
    def n_kept(self) -> int:
        return self.draws.shape[1]

    def index(self, name: str) -> int:
        try:
            return self.parameter_names.index(name)
        except ValueError:
            raise KeyError(
                f"parameter {name!r} not found; available: {list(self.parameter_names)}") from None

    def chains(self, name: str) -> np.ndarray:
        """``(n_chains, n_kept)`` array for one parameter."""
        return self.draws[:, :, self.index(name)]

    def pooled(self, name: str) -> np.ndarray:
        """All chains concatenated, chain-major."""
        return self.chains(name).ravel()

    def posterior_means(self) -> dict[str, float]:
        flat = self.draws.reshape(-1, len(self.parameter_names))
        return {n: float(m) for n, m in zip(self.parameter_names, flat.mean(axis=0))}

    def summary_table(self) -> dict[str, dict[str, float]]:
        """Mean, sd and central 95% interval per parameter."""
        flat = self.draws.reshape(-1, len(self.parameter_names))
        lo, hi = np.percentile(flat, [2.5, 97.5], axis=0)
        out = {}
        for j, n in enumerate(self.parameter_names):
            out[n] = {
                "mean": float(flat[:, j].mean()),
                "sd": float(flat[:, j].std(ddof=1)) if flat.shape[0] > 1 else 0.0,
                "q2.5": float(lo[j]),
                "q97.5": float(hi[j]),
            }
        return out


def _open_text(path, mode):
    path = Path(path)
    if path.suffix == ".gz":
        return gzip.open(path, mode + "t", encoding="utf-8", newline="")
    return open(path, mode, encoding="utf-8", newline="")


def format_float(x: float) -> str:
    """17 significant digits, enough to round-trip any double."""
    return f"{x:.17g}"


def export_draws(draws: PosteriorDraws, path) -> None:
    with _open_text(path, "w") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["chain", "iter", *draws.parameter_names])
        for c, cid in enumerate(draws.chain_ids):
            for i in range(draws.n_kept):
                writer.writerow([cid, i + 1, *(format_float(v) for v in draws.draws[c, i])])


def import_draws(source, treatment_name=None) -> PosteriorDraws:
    """Read a draws CSV (path or open text stream).

    Every chain must contribute the same number of rows. Rows are kept in file
    order within each chain.
    """
    if isinstance(source, (str, Path)):
        with _open_text(source, "r") as fh:
            return _parse_draws(fh, treatment_name)
    return _parse_draws(source, treatment_name)


def _parse_draws(fh: io.TextIOBase, treatment_name) -> PosteriorDraws:
    reader = csv.reader(fh)
    header = next(reader, None)
    if not header:
        raise DrawsParseError("missing header", row=1)
    header = [h.strip() for h in header]
    if len(header) < 3 or header[0] != "chain" or header[1] != "iter":
        raise DrawsParseError(
            f"header must start with 'chain,iter' and name at least one parameter, got {header}",
            row=1)
    names = header[2:]
    width = len(header)
    by_chain: dict[int, list[list[float]]] = {}
    for lineno, row in enumerate(reader, start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != width:
            raise DrawsParseError(f"expected {width} fields, got {len(row)}", row=lineno)
        try:
            chain = int(row[0])
            int(row[1])
        except ValueError:
            raise DrawsParseError(f"chain and iter must be integers: {row[:2]}", row=lineno) from None
        try:
            values = [float(cell) for cell in row[2:]]
        except ValueError:
            raise DrawsParseError(f"non-numeric cell in {row[2:]}", row=lineno) from None
        if not all(np.isfinite(values)):
            raise DrawsParseError("non-finite value", row=lineno)
        by_chain.setdefault(chain, []).append(values)
    if not by_chain:
        raise DrawsParseError("no draws found")
    ids = sorted(by_chain)
    lengths = {len(by_chain[c]) for c in ids}
    if len(lengths) != 1:
        raise DrawsParseError(
            f"chains have unequal lengths: {dict((c, len(by_chain[c])) for c in ids)}")
    arr = np.array([by_chain[c] for c in ids], dtype=float)
    if treatment_name is not None and treatment_name not in names:
        raise DrawsParseError(f"treatment column {treatment_name!r} not in header {names}")
    return PosteriorDraws(tuple(names), arr, treatment_name=treatment_name, chain_ids=tuple(ids))
