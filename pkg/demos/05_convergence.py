# %% [markdown]
# # Grid convergence
#
# For a solution with a shock, first-order schemes converge at rate about
# one in L1 at best; the rarefaction corner and the smeared shock keep it a
# little below.

# %%
from blmw import RunConfig
from blmw.runner import convergence_study

cells, errors, rate = convergence_study(RunConfig(), (64, 128, 256, 512, 1024), pvi=0.5, workers=2)
for n, e in zip(cells, errors):
    print(f"N={n:5d}  L1={e:.3e}")
print(f"fitted rate {rate:.3f}")

# %% [markdown]
# Rusanov adds more dissipation than Godunov and smears the shock further.
# Compare the two on the same grids; in this benchmark the L1 error at
# PVI 0.5 is not the ordering one might guess.

# %%
from blmw.config import with_overrides

cells, rus, rate_r = convergence_study(with_overrides(RunConfig(), flux="rusanov"),
                                       (128, 256, 512), pvi=0.5, workers=2)
for n, e, g in zip(cells, rus, errors[1:]):
    print(f"N={n:5d}  Rusanov {e:.3e}  Godunov {g:.3e}")
print(f"Rusanov rate {rate_r:.3f}")
