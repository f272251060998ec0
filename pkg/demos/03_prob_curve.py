# How likely is each revised likelihood of the event?
#
# Sliding the minimum desired effect down the log-odds axis trades
# probability for size of effect. In conditional-mean mode each point uses
# the mean of the draws at or below the threshold; threshold mode shifts the
# baseline by the threshold itself.

# %%
import numpy as np

from bayesloss.effects import STRICT_NEG, prob_effect_curve
from bayesloss.loss import inv_logit, logit
from bayesloss.posterior import PosteriorDraws
from bayesloss.svgplot import prob_curve_svg

x = np.random.default_rng(2020).normal(-0.5, 0.5, 10_000)
draws = PosteriorDraws.from_array(x, "theta", n_chains=4)
pi = logit(0.26)
grid = [STRICT_NEG] + [-0.25 * k for k in range(1, 9)]

# %%
cond = prob_effect_curve(draws, "theta", pi, grid)
thr = prob_effect_curve(draws, "theta", pi, grid, mode="threshold")
print(" threshold  P(theta<=t)  conditional  threshold-mode")
for t, (rc, p), (rt, _) in zip(grid, cond, thr):
    label = "<0" if t is STRICT_NEG else f"{t:.2f}"
    print(f"{label:>10}  {p:11.3f}  {rc:11.3f}  {rt:14.3f}")

# %% the probability column never increases down the table
probs = [p for _, p in cond]
assert all(a >= b for a, b in zip(probs, probs[1:]))
print("baseline", inv_logit(pi))

with open("prob_curve_demo.svg", "w") as fh:
    fh.write(prob_curve_svg(cond, inv_logit(pi)))
