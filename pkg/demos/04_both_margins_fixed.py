# %% [markdown]
# # Fixing both margins
#
# With row and column totals both fixed the top-left count follows Fisher's
# noncentral hypergeometric distribution, whose only parameter is the odds
# ratio.  The posterior is built by importance sampling: draw theta from the
# Dirichlet prior and weight each draw by the probability of the observed
# count.

# %%
import numpy as np

from marginodds import (
    FnchParams,
    Partition,
    fnch_pmf,
    kde,
    ks_weighted,
    odds_ratio_2x2,
    posterior_constrained,
    posterior_double_constrained,
    stream_rng,
)

x = np.array([7, 1, 1, 1])
alpha = np.ones(4)
params = FnchParams.from_table(x)
for psi in (0.2, 1.0, 5.0):
    u, pmf = fnch_pmf(FnchParams(params.n1, params.n2, params.m1, psi))
    print(f"psi = {psi}: support {u.tolist()}, pmf {np.round(pmf, 4).tolist()}")

# %%
rows_fixed = posterior_constrained(
    alpha, x, Partition.rows(2, 2), odds_ratio_2x2(), 100_000, stream_rng(0, "constrained")
).column(0)
both_fixed = posterior_double_constrained(alpha, x, 100_000, stream_rng(0, "double"))
print(f"effective sample size: {both_fixed.effective_sample_size:.0f} of {len(both_fixed)}")
print(f"posterior means: rows fixed {rows_fixed.mean():.3f}, both fixed {both_fixed.mean():.3f}")
print(ks_weighted(rows_fixed, both_fixed))

# %% [markdown]
# Density estimates on a shared grid, printed coarsely instead of plotted.

# %%
grid = np.linspace(-4, 7, 23)
d_rows = kde(rows_fixed, grid=grid).density
d_both = kde(both_fixed, grid=grid).density
for g, a, b in zip(grid, d_rows, d_both):
    print(f"{g:6.2f}  {'#' * int(60 * a):<30}|{'*' * int(60 * b)}")
