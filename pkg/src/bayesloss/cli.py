"""Command-line entry point.

Subcommands: ``fit``, ``summarize``, ``sweep``, ``prob-curve``, ``check`` and
``selftest``. Exit codes: 0 success, 2 validation error, 3 nonconvergence,
4 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__, config as cfgmod, selftest, svgplot
from .config import AnalysisConfig
from .diagnostics import split_rhat
from .effects import (STRICT_NEG, BaselineSpec, EffectThresholds, baseline_logodds,
                      effect_draws, effect_summary, mean_identity_check, or_to_logodds,
                      prob_effect_curve, threshold_label)
from .errors import NotConvergedError, ValidationError
from .ingest import load_dataset, validate_coding
from .loss import cost_ratio_sweep, inv_logit
from .posterior import INTERCEPT, export_draws, format_float, import_draws

EXIT_OK, EXIT_VALIDATION, EXIT_NOT_CONVERGED, EXIT_IO = 0, 2, 3, 4
DEFAULT_PANEL_OR = (0.5, 0.25, 0.1, 0.05)


def _clean(obj):
    """JSON-safe copy: NaN/Inf become null, numpy scalars become floats."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def write_json(path: Path, payload: dict) -> None:
    text = json.dumps(_clean(payload), sort_keys=True, indent=2, allow_nan=False)
    path.write_text(text + "\n", encoding="utf-8")


def _report(cfg: AnalysisConfig, command: str, **body) -> dict:
    return {"tool": "bayesloss", "version": __version__, "command": command,
            "config": cfg.to_dict(), **body}


# ---------------------------------------------------------------- arguments

def _kv(text: str):
    key, sep, value = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected col=value, got {text!r}")
    return key.strip(), float(value)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key = value config file")
    common.add_argument("--data")
    common.add_argument("--outcome")
    common.add_argument("--treatment")
    common.add_argument("--drop", action="append")
    common.add_argument("--draws")
    common.add_argument("--param")
    common.add_argument("--out-dir", dest="out_dir")
    common.add_argument("--seed", type=int)
    common.add_argument("--n-chains", dest="n_chains", type=int)
    common.add_argument("--n-iter", dest="n_iter", type=int)
    common.add_argument("--n-warmup", dest="n_warmup", type=int)
    common.add_argument("--theta-md-or", dest="theta_md_or", type=float, action="append")
    common.add_argument("--theta-md-log", dest="theta_md_log", type=float, action="append")
    common.add_argument("--theta-mu-log", dest="theta_mu_log", type=float)
    common.add_argument("--unit-change", dest="unit_change", type=float)
    common.add_argument("--baseline-override", dest="baseline_override", type=_kv, action="append")
    common.add_argument("--baseline-logodds", dest="baseline_logodds", type=float)
    common.add_argument("--grid-step", dest="grid_step", type=float)
    common.add_argument("--curve-mode", dest="curve_mode", choices=["conditional_mean", "threshold"])
    common.add_argument("--confirm-coding", dest="confirm_coding", action="store_const", const=True)
    common.add_argument("--allow-unconverged", dest="allow_unconverged", action="store_const",
                        const=True)
    common.add_argument("--no-plots", dest="plots", action="store_const", const=False)

    parser = argparse.ArgumentParser(prog="bayesloss", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in [
        ("fit", "fit the Bayesian logistic regression and write draws"),
        ("summarize", "probability-weighted intended and unintended effects"),
        ("sweep", "expected losses over the cost ratio"),
        ("prob-curve", "probability of reaching each revised likelihood"),
        ("check", "validate outcome/treatment coding"),
        ("selftest", "run the built-in oracle checks"),
    ]:
        sub.add_parser(name, parents=[common], help=help_)
    return parser


def resolve_config(args: argparse.Namespace) -> AnalysisConfig:
    cfg = cfgmod.load(args.config) if args.config else AnalysisConfig()
    overrides = {}
    for key, value in vars(args).items():
        if key in ("config", "command") or value is None:
            continue
        if key == "baseline_override":
            value = dict(value)
        overrides[key] = value
    return cfg.update(overrides)


# ---------------------------------------------------------------- helpers

def _out_dir(cfg) -> Path:
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _load_draws(cfg):
    path = cfg.draws or str(Path(cfg.out_dir) / "draws.csv")
    return import_draws(path)


def _param(cfg, draws) -> str:
    if cfg.param:
        draws.index(cfg.param)
        return cfg.param
    if cfg.treatment and cfg.treatment in draws.parameter_names:
        return cfg.treatment
    others = [n for n in draws.parameter_names if n != INTERCEPT]
    if len(others) == 1:
        return others[0]
    raise ValidationError(f"--param is required; parameters are {list(draws.parameter_names)}")


def _theta_md_list(cfg, default_panel: bool):
    values = [or_to_logodds(o) for o in cfg.theta_md_or] + [float(v) for v in cfg.theta_md_log]
    labels = [f"OR {o:g}" for o in cfg.theta_md_or] + [f"log OR {v:g}" for v in cfg.theta_md_log]
    if not values:
        if default_panel:
            return [or_to_logodds(o) for o in DEFAULT_PANEL_OR], [f"OR {o:g}" for o in DEFAULT_PANEL_OR]
        return [STRICT_NEG], ["theta < 0"]
    return values, labels


def _thresholds(cfg, md):
    if cfg.unit_change == 0:
        raise ValidationError("unit_change must be nonzero")
    return EffectThresholds(md, cfg.theta_mu_log, cfg.unit_change)


def _baseline(cfg, draws, param):
    if cfg.baseline_logodds is not None:
        return float(cfg.baseline_logodds), "given"
    covariates = [n for n in draws.parameter_names if n not in (INTERCEPT, param)]
    if not covariates:
        return draws.posterior_means()[INTERCEPT], "intercept"
    if not cfg.data:
        raise ValidationError(
            "baseline log odds needs --data (covariate means) or --baseline-logodds")
    data = load_dataset(cfg.data, cfg.outcome, cfg.treatment, cfg.drop)
    return baseline_logodds(draws, data, BaselineSpec(overrides=dict(cfg.baseline_override))), "data"


# ---------------------------------------------------------------- commands

def cmd_fit(cfg: AnalysisConfig) -> int:
    from .sampler import fit_logistic

    if not (cfg.data and cfg.outcome):
        raise ValidationError("fit needs --data and --outcome")
    sampler_cfg = cfg.sampler_config()
    if sampler_cfg.n_chains < 2:
        raise ValidationError("split R-hat needs at least 2 chains; use --n-chains >= 2")
    data = load_dataset(cfg.data, cfg.outcome, cfg.treatment, cfg.drop)
    coding = validate_coding(data)
    if not cfg.confirm_coding:
        raise ValidationError(coding.treatment_direction_note
                              + " Re-run with --confirm-coding once checked.")
    draws = fit_logistic(data, sampler_cfg)
    conv = split_rhat(draws)
    out = _out_dir(cfg)
    export_draws(draws, out / "draws.csv")
    table = draws.summary_table()
    for name in table:
        table[name]["rhat"] = conv.rhat[name]
        table[name]["ess_bulk"] = conv.ess_bulk[name]
    write_json(out / "fit_report.json", _report(
        cfg, "fit", n_rows=data.n_rows, parameters=table, converged=conv.converged,
        convergence_messages=list(conv.messages), treatment=data.treatment_name,
        scale_info=draws.scale_info, sampler=draws.sampler_info,
        coding=coding.to_dict()))
    if data.treatment_name:
        t = table[data.treatment_name]
        print(f"{data.treatment_name}: mean {t['mean']:.2f} "
              f"[{t['q2.5']:.2f}, {t['q97.5']:.2f}]  R-hat {t['rhat']:.3f}")
    if not conv.converged:
        print("not converged: " + "; ".join(conv.messages), file=sys.stderr)
        return EXIT_NOT_CONVERGED
    return EXIT_OK


def cmd_summarize(cfg: AnalysisConfig) -> int:
    draws = _load_draws(cfg)
    param = _param(cfg, draws)
    mds, labels = _theta_md_list(cfg, default_panel=False)
    results, panels = [], []
    for md, label in zip(mds, labels):
        thr = _thresholds(cfg, md)
        s = effect_summary(draws, param, thr, allow_unconverged=cfg.allow_unconverged)
        results.append({"label": label, "thresholds": thr.to_dict(), "summary": s.to_dict()})
        panels.append((thr, s))
    total, mean = mean_identity_check(draws, param, cfg.unit_change)
    out = _out_dir(cfg)
    write_json(out / "summary.json", _report(
        cfg, "summarize", param=param, results=results,
        mean_identity={"p_theta_int_plus_q_theta_unint": total, "sample_mean": mean}))
    if cfg.plots:
        x = effect_draws(draws, param, cfg.unit_change)
        (out / "summary.svg").write_text(svgplot.effect_density_svg(x, panels), encoding="utf-8")
    for r in results:
        s = r["summary"]
        print(f"{r['label']}: p*theta_int = {s['p_theta_int']:.4f}, "
              f"q*theta_unint = {s['q_theta_unint']:.4f}")
    return EXIT_OK


def _write_curve_csv(path: Path, curve) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["ratio", "loss_implement", "loss_not_implement"])
        for r, li, ln in curve.points:
            w.writerow([format_float(r), format_float(li), format_float(ln)])
        cross = "none" if curve.crossover_ratio is None else format_float(curve.crossover_ratio)
        fh.write(f"# crossover_ratio={cross}\n")


def cmd_sweep(cfg: AnalysisConfig) -> int:
    draws = _load_draws(cfg)
    param = _param(cfg, draws)
    pi, pi_source = _baseline(cfg, draws, param)
    mds, labels = _theta_md_list(cfg, default_panel=True)
    out = _out_dir(cfg)
    panels, rows = [], []
    for k, (md, label) in enumerate(zip(mds, labels), start=1):
        thr = _thresholds(cfg, md)
        s = effect_summary(draws, param, thr, allow_unconverged=cfg.allow_unconverged)
        curve = cost_ratio_sweep(pi, s, cfg.grid_step, cfg.ratio_min, cfg.ratio_max)
        name = f"sweep_{k}.csv"
        _write_curve_csv(out / name, curve)
        rows.append({"label": label, "theta_md": threshold_label(md), "file": name,
                     "summary": s.to_dict(), "crossover_ratio": curve.crossover_ratio,
                     "critical_ratio": curve.critical_ratio})
        panels.append((f"{label}: crossover " + (
            "none" if curve.crossover_ratio is None else f"~{curve.crossover_ratio:.2f}"), curve))
        print(f"{label}: crossover ratio "
              + ("none" if curve.crossover_ratio is None else f"{curve.crossover_ratio:.2f}")
              + f" (closed form {curve.critical_ratio:.4f})")
    write_json(out / "sweep.json", _report(
        cfg, "sweep", param=param, baseline_logodds=pi, baseline_likelihood=inv_logit(pi),
        baseline_source=pi_source, curves=rows))
    if cfg.plots:
        (out / "sweep.svg").write_text(svgplot.sweep_svg(panels), encoding="utf-8")
    return EXIT_OK


def cmd_prob_curve(cfg: AnalysisConfig) -> int:
    draws = _load_draws(cfg)
    param = _param(cfg, draws)
    pi, pi_source = _baseline(cfg, draws, param)
    if not (cfg.curve_grid_step > 0 and cfg.curve_grid_min < 0):
        raise ValidationError("curve grid needs a positive step and a negative minimum")
    n = int(math.floor(-cfg.curve_grid_min / cfg.curve_grid_step + 1e-9))
    grid = [STRICT_NEG] + [round(-cfg.curve_grid_step * k, 12) for k in range(1, n + 1)]
    curve = prob_effect_curve(draws, param, pi, grid, cfg.curve_mode, cfg.unit_change,
                              allow_unconverged=cfg.allow_unconverged)
    out = _out_dir(cfg)
    with open(out / "prob_curve.csv", "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["threshold", "revised_likelihood", "probability"])
        for t, (rev, prob) in zip(grid, curve):
            w.writerow([threshold_label(t) if t is STRICT_NEG else repr(t),
                        "nan" if math.isnan(rev) else format_float(rev), format_float(prob)])
    write_json(out / "prob_curve.json", _report(
        cfg, "prob-curve", param=param, baseline_logodds=pi, baseline_likelihood=inv_logit(pi),
        baseline_source=pi_source,
        points=[{"threshold": threshold_label(t), "revised_likelihood": r, "probability": p}
                for t, (r, p) in zip(grid, curve)]))
    if cfg.plots:
        (out / "prob_curve.svg").write_text(svgplot.prob_curve_svg(curve, inv_logit(pi)),
                                            encoding="utf-8")
    rev0, p0 = curve[0]
    print(f"P({param} < 0) = {p0:.3f}; revised likelihood {100 * rev0:.1f}% "
          f"from baseline {100 * inv_logit(pi):.1f}%")
    return EXIT_OK


def cmd_check(cfg: AnalysisConfig) -> int:
    if not (cfg.data and cfg.outcome):
        raise ValidationError("check needs --data and --outcome")
    data = load_dataset(cfg.data, cfg.outcome, cfg.treatment, cfg.drop)
    report = validate_coding(data)
    print(json.dumps(report.to_dict(), indent=2, sort_keys=True))
    return EXIT_OK


def cmd_selftest(cfg: AnalysisConfig) -> int:
    return EXIT_OK if selftest.run(cfg.seed or 12345) else 1


COMMANDS = {"fit": cmd_fit, "summarize": cmd_summarize, "sweep": cmd_sweep,
            "prob-curve": cmd_prob_curve, "check": cmd_check, "selftest": cmd_selftest}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        return COMMANDS[args.command](cfg)
    except NotConvergedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    except (ValidationError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
