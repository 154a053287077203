# %% [markdown]
# # What happens as the table grows
#
# Under multinomial sampling the posterior of any log odds ratio shrinks at
# rate 1/n.  Under row-fixed sampling the row probabilities stay at their
# prior, so a contrast that involves them keeps a variance floor no matter how
# much data arrive.  Margin-free contrasts still concentrate.

# %%
import numpy as np

from marginodds import (
    Partition,
    concentration_study,
    odds_ratio_2x2,
    prior_tau_variance,
    stream_rng,
)

rows = Partition.rows(2, 2)
theta0 = [0.4, 0.1, 0.2, 0.3]
n_list = [100, 1000, 10_000]
half = np.full(4, 0.5)

cases = [
    ("odds ratio, unconstrained", odds_ratio_2x2(), "unconstrained"),
    ("odds ratio, rows fixed", odds_ratio_2x2(), "constrained"),
    ("c = 0.5, rows fixed", half, "constrained"),
]
for label, c, scheme in cases:
    table = concentration_study(theta0, c, rows, n_list, scheme, 50_000, stream_rng(0, scheme))
    print(label)
    for n, v in table.rows():
        print(f"   n = {n:>6d}  var(log psi) = {v:.5f}")

# %%
floor, se = prior_tau_variance(np.ones(4), half, rows, 200_000, stream_rng(0, "prior"))
print(f"prior variance of the row part: {floor:.4f} +/- {se:.4f}")
