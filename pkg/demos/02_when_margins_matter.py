# %% [markdown]
# # A contrast that does depend on the row probabilities
#
# With every coefficient equal to 0.5, log psi picks up the log row
# probabilities.  Under row-fixed sampling those probabilities are never
# updated, so the two posteriors can differ.  With a single observation they
# still coincide; with two they do not.

# %%
import numpy as np

from marginodds import (
    Partition,
    assumption2c_check,
    cf_scheme_difference,
    cf_zero_set_scan,
    cf_grid_logpsi,
    default_t_grid,
    enumerate_tables,
    lgamma_complex,
    search_noninvariant_table,
)

rows = Partition.rows(2, 2)
half = np.full(4, 0.5)
alpha = np.ones(4)
t = default_t_grid()

# %%
for n in (1, 2):
    print(f"n = {n}: sample-size condition holds: {assumption2c_check(half, rows, 0, n)}")
    for x in enumerate_tables(4, n):
        diff, where = cf_scheme_difference(t, alpha, x, half, rows)
        print(f"   x = {x.tolist()}  max |phi_u - phi_c| = {diff:.2e} at t = {where:g}")

# %% [markdown]
# The exhaustive search over n = 2 returns the table with the largest gap.

# %%
x, diff, where = search_noninvariant_table(alpha, half, rows, 2, t)
print("largest gap:", x.tolist(), f"{diff:.3e}")

# %% [markdown]
# The characteristic functions are products of Gamma ratios, and Gamma has
# no zeros, so a grid scan should find no interval where they vanish.

# %%
grid = cf_grid_logpsi(np.linspace(-20, 20, 4001), alpha, x, half, rows, "unconstrained")
print("near-zero intervals:", cf_zero_set_scan(grid))

# %% [markdown]
# All of this rests on a complex log Gamma.  A quick look at how well it
# satisfies its recurrence away from the real axis:

# %%
z = np.array([2 + 3j, -7.5 + 0.25j, 40 - 25j])
print(np.abs(lgamma_complex(z + 1) - lgamma_complex(z) - np.log(z)))
