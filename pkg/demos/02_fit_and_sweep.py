# Fit a logistic model, build the baseline, and sweep the cost ratio.
#
# The data mimic a post-conflict study: a peacekeeping indicator, victory
# dummies and a severity covariate. The baseline is a war ending in a peace
# agreement (both victory dummies set to zero) and the other covariates at
# their means. Each minimum desired odds ratio gives one decision curve.

# %%
import numpy as np

from bayesloss.diagnostics import split_rhat
from bayesloss.effects import BaselineSpec, EffectThresholds, baseline_logodds, effect_summary, or_to_logodds
from bayesloss.loss import cost_ratio_sweep, critical_ratio, inv_logit
from bayesloss.sampler import SamplerConfig, fit_logistic
from bayesloss.svgplot import sweep_svg
from bayesloss.synthetic import CONFLICT_OVERRIDES, conflict_dataset

data = conflict_dataset(seed=0)
draws = fit_logistic(data, SamplerConfig(seed=2020))
for name, row in draws.summary_table().items():
    print(f"{name:>14}: mean {row['mean']:+.3f}  95% [{row['q2.5']:+.3f}, {row['q97.5']:+.3f}]")

report = split_rhat(draws)
print("converged:", report.converged, "max R-hat", round(max(report.rhat.values()), 4))

# %% baseline log odds
pi = baseline_logodds(draws, data, BaselineSpec(overrides=CONFLICT_OVERRIDES))
print(f"baseline likelihood {inv_logit(pi):.3f}")
print(f"P(effect < 0) = {np.mean(draws.pooled('pko') < 0):.3f}")

# %% four decision curves
curves = []
for odds_ratio in (0.5, 0.25, 0.1, 0.05):
    s = effect_summary(draws, "pko", EffectThresholds(or_to_logodds(odds_ratio), 0.0))
    c = cost_ratio_sweep(pi, s)
    curves.append((f"OR {odds_ratio}", c))
    print(f"OR {odds_ratio}: crossover {c.crossover_ratio}, closed form {critical_ratio(pi, s):.4f}")

with open("sweep_demo.svg", "w") as fh:
    fh.write(sweep_svg(curves))
