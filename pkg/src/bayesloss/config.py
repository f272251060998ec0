"""Analysis configuration and its flat key-value file format.

One setting per line::

    # comments start with '#'
    data = "civil_war.csv"
    seed = 20200101
    theta_md_or = [0.5, 0.25]
    baseline_override = {"rebel_victory": 0.0}

Keys are ``AnalysisConfig`` field names; each value is a JSON literal
(string, number, true/false/null, list or object). Unknown keys are errors.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, fields

from .errors import ValidationError
from .sampler import SamplerConfig


@dataclass
class AnalysisConfig:
    data: str | None = None
    outcome: str | None = None
    treatment: str | None = None
    drop: list = field(default_factory=list)
    draws: str | None = None
    param: str | None = None
    out_dir: str = "out"

    n_chains: int = 4
    n_iter: int = 10_000
    n_warmup: int = 1_000
    seed: int = 0
    coef_prior_scale: float = math.log(10)
    intercept_prior_sd: float = 10.0
    target_accept: float = 0.234

    theta_md_or: list = field(default_factory=list)
    theta_md_log: list = field(default_factory=list)
    theta_mu_log: float = 0.0
    unit_change: float = 1.0

    baseline_override: dict = field(default_factory=dict)
    baseline_logodds: float | None = None
    grid_step: float = 0.01
    ratio_min: float = 0.01
    ratio_max: float = 0.99

    curve_mode: str = "conditional_mean"
    curve_grid_min: float = -5.0
    curve_grid_step: float = 0.1

    plots: bool = True
    confirm_coding: bool = False
    allow_unconverged: bool = False

    def sampler_config(self) -> SamplerConfig:
        return SamplerConfig(self.n_chains, self.n_iter, self.n_warmup, self.seed,
                             self.coef_prior_scale, self.intercept_prior_sd, self.target_accept)

    def to_dict(self) -> dict:
        return asdict(self)

    def update(self, values: dict) -> "AnalysisConfig":
        known = {f.name for f in fields(self)}
        unknown = sorted(set(values) - known)
        if unknown:
            raise ValidationError(f"unknown config keys: {unknown}")
        merged = self.to_dict()
        merged.update(values)
        return AnalysisConfig(**merged)


def dumps(config: AnalysisConfig) -> str:
    lines = [f"{k} = {json.dumps(v, sort_keys=True)}" for k, v in config.to_dict().items()]
    return "\n".join(lines) + "\n"


def loads(text: str) -> AnalysisConfig:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValidationError(f"config line {lineno}: expected 'key = value'")
        key = key.strip()
        if key in values:
            raise ValidationError(f"config line {lineno}: duplicate key {key!r}")
        try:
            values[key] = json.loads(value.strip())
        except json.JSONDecodeError as exc:
            raise ValidationError(f"config line {lineno}: bad value for {key!r}: {exc}") from None
    return AnalysisConfig().update(values)


def load(path) -> AnalysisConfig:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())


def save(config: AnalysisConfig, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(config))
