# Intended and unintended effects from a synthetic posterior.
#
# A treatment effect posterior of Normal(-0.5, 0.5) on the log-odds scale is
# split into a risk-reducing part and a null-or-harmful part. The weighted sum
# of the two pieces always equals the posterior mean under the default
# thresholds; moving the thresholds carves out a null region between them.

# %%
import numpy as np

from bayesloss import oracles
from bayesloss.effects import STRICT_NEG, EffectThresholds, effect_summary, or_to_logodds
from bayesloss.posterior import PosteriorDraws

rng = np.random.default_rng(2020)
x = rng.normal(-0.5, 0.5, 10_000)
draws = PosteriorDraws.from_array(x, "theta", n_chains=4)

# %% default split at zero
s = effect_summary(draws, "theta")
print(f"p = {s.p:.3f}, theta_int = {s.theta_int:.3f}, q = {s.q:.3f}, theta_unint = {s.theta_unint:.3f}")
print(f"p*theta_int = {s.p_theta_int:.4f}, q*theta_unint = {s.q_theta_unint:.4f}")
print(f"sum {s.total:.6f} vs posterior mean {x.mean():.6f}")

# %% a null band from -0.5 to 0.5
s2 = effect_summary(draws, "theta", EffectThresholds(-0.5, 0.5))
exact = oracles.truncnorm_products(-0.5, 0.5, -0.5, 0.5)
print(f"p*theta_int = {s2.p_theta_int:.4f} (normal closed form {exact[0]:.4f})")
print(f"q*theta_unint = {s2.q_theta_unint:.4f} (normal closed form {exact[1]:.4f})")

# %% thresholds stated as odds ratios
for odds_ratio in (0.9, 0.75, 0.5):
    t = or_to_logodds(odds_ratio)
    si = effect_summary(draws, "theta", EffectThresholds(t, 0.0))
    print(f"OR {odds_ratio}: log-odds {t:.3f}, p = {si.p:.3f}, p*theta_int = {si.p_theta_int:.4f}")

# %% the strict sentinel excludes exact zeros from the intended side
point = PosteriorDraws.from_array(np.r_[np.zeros(5), -np.ones(5)], "theta")
print(effect_summary(point, "theta", EffectThresholds(STRICT_NEG, 0.0)).to_dict())
