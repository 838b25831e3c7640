# %% [markdown]
# # Analytic reference by the tangent construction
#
# The shock top S* is where the chord from the initial state touches f_w.
# Behind the shock the profile is a rarefaction, x = (v/phi) f_w'(S) t.

# %%
import numpy as np

from blmw import FluidRockParams, build_reference, fractional_flow
from blmw.fv_transport import Grid
from blmw.reference_bl import reference_profile

p = FluidRockParams()
ref = build_reference(p)
print(f"S*               {ref.shock_saturation:.6f}")
print(f"shock speed      {ref.shock_front_speed:.6f} m/day")
print(f"breakthrough PVI {ref.breakthrough_pvi:.6f}")

# %% [markdown]
# For quadratic Corey curves starting at connate water the tangent point has
# a closed form, which makes a convenient cross-check.

# %%
M = p.mobility_ratio
closed = p.connate_water + 0.7 * np.sqrt(M / (1 + M))
print(f"closed form S*   {closed:.6f}  (diff {abs(closed - ref.shock_saturation):.1e})")

# %%
grid = Grid(p.core_length, 512)
profiles = {pvi: reference_profile(ref, grid, float(p.pvi_to_time(pvi)))
            for pvi in (0.1, 0.2, 0.35, 0.5, 0.8)}
for pvi, prof in profiles.items():
    print(f"PVI {pvi:.2f}: outlet S = {prof[-1]:.4f}, inlet S = {prof[0]:.4f}")

# %%
from _plot import pyplot

plt = pyplot()
if plt is not None:
    fig, ax = plt.subplots(1, 2, figsize=(9, 3.5))
    s = np.linspace(0.1, 0.8, 400)
    ax[0].plot(s, fractional_flow(s, p))
    f_star = float(fractional_flow(ref.shock_saturation, p))
    ax[0].plot([0.1, ref.shock_saturation], [0.0, f_star], "k--")
    ax[0].set(xlabel="S_w", ylabel="f_w", title="tangent")
    for pvi, prof in profiles.items():
        ax[1].plot(grid.centers, prof, label=f"{pvi:.2f}")
    ax[1].set(xlabel="x [m]", ylabel="S_w")
    ax[1].legend(title="PVI")
    fig.tight_layout()
    fig.savefig("demo_figures/reference.png", dpi=120)
