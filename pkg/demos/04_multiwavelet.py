# %% [markdown]
# # The multiwavelet layer
#
# A cell-average vector on a dyadic grid is a piecewise constant function.
# Projected onto orthonormal Legendre polynomials of degree < 8 per dyadic
# interval, it is represented exactly; coarser levels come from the
# two-scale relation, and the detail between levels measures local
# structure.

# %%
import numpy as np

from blmw import FluidRockParams, advance_to, compress, detail_norms
from blmw import project_cell_averages, reconstruct_cell_averages
from blmw.diagnostics import detail_energies
from blmw.fv_transport import Grid, SaturationState

p = FluidRockParams()
grid = Grid(p.core_length, 512)
state, _ = advance_to(SaturationState.initial(grid, p), float(p.pvi_to_time(0.35)), grid, p)

tree = project_cell_averages(state, grid)
back = reconstruct_cell_averages(tree, grid.cells)
print(f"round trip max error {np.max(np.abs(back - state.averages)):.1e}")

# %% [markdown]
# Detail concentrates at the fine levels around the front and the foot of
# the rarefaction.  Pruning subtrees whose detail falls below a threshold
# shrinks the tree with a controlled error.

# %%
for n, e in enumerate(detail_norms(tree)):
    print(f"level {n}: detail energy {e:.3e}")

for eps in (1e-10, 1e-7, 1e-4, 1e-2):
    t = compress(tree, eps)
    err = np.max(np.abs(reconstruct_cell_averages(t, 512) - state.averages))
    print(f"eps={eps:.0e}: {len(t.leaves):4d} leaves, max error {err:.2e}")

# %% [markdown]
# The same picture from the plain dyadic average/half-difference split used
# for the energy diagnostics (level 8 is the finest).

# %%
for level, e in enumerate(detail_energies(state.averages)):
    print(f"E_{level} = {e:.3e}")
