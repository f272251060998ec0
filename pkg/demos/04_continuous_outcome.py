# Decisions when the outcome is measured on the cost scale itself.
#
# With a continuous outcome the expected loss of implementing is the policy
# cost plus the status-quo cost plus the weighted effect, so implementing pays
# exactly when the policy cost is below minus the weighted effect.

# %%
import numpy as np

from bayesloss.effects import EffectThresholds, summarize_sample
from bayesloss.loss import expected_loss_continuous

# effect on yearly spending, in thousands
x = np.random.default_rng(5).normal(-3.0, 2.0, 20_000)
s = summarize_sample(x, EffectThresholds())
print(f"weighted effect {s.total:.3f}")

c_s = 50.0
for c_p in (1.0, 2.5, 2.9, 3.1, 5.0):
    yes = expected_loss_continuous(c_p, c_s, s, True)
    no = expected_loss_continuous(c_p, c_s, s, False)
    print(f"C_p {c_p:4.1f}: implement {yes:7.3f}, not {no:7.3f} -> {'implement' if yes < no else 'not'}")

# %% a concave transform dampens large savings
damped = expected_loss_continuous(2.5, c_s, s, True, transform=lambda v: -np.sqrt(-v) if v < 0 else v)
print(f"with sqrt damping: implement {damped:.3f} vs not {c_s:.3f}")
