# %% [markdown]
# # Corey constitutive chain
#
# Relative permeabilities, fractional flow and the transport flux for the
# Berea benchmark parameters.  The flux derivative bounds the wave speeds
# that set the time step.

# %%
import numpy as np

from blmw import FluidRockParams, flux_derivative, fractional_flow, max_wave_speed
from blmw import relative_permeabilities

p = FluidRockParams()
print(f"cross section  {p.cross_section:.6e} m^2")
print(f"Darcy velocity {p.darcy_velocity:.6f} m/day")
print(f"v/phi          {p.flux_scale:.6f} m/day")
print(f"mobility ratio {p.mobility_ratio}")

# %%
S = np.linspace(p.connate_water, p.injected_saturation, 8)
krw, kro = relative_permeabilities(S, p)
for s, a, b, f in zip(S, krw, kro, fractional_flow(S, p)):
    print(f"S={s:.3f}  krw={a:.4f}  kro={b:.4f}  f_w={f:.4f}")

# %% [markdown]
# The steepest point of f_w is where characteristics travel fastest.  The
# CFL step uses a bound over the saturation bracket rather than the
# global maximum.

# %%
fine = np.linspace(0.1, 0.8, 100001)
dF = flux_derivative(fine, p)
print(f"max F' = {dF.max():.4f} m/day at S = {fine[dF.argmax()]:.4f}")
print(f"bracket bound over [0.1, 0.8]: {float(max_wave_speed(0.1, 0.8, p)):.4f}")
print(f"bracket bound over [0.1, 0.2]: {float(max_wave_speed(0.1, 0.2, p)):.4f}")

# %%
from _plot import pyplot

plt = pyplot()
if plt is not None:
    fig, ax = plt.subplots(1, 2, figsize=(9, 3.5))
    ax[0].plot(fine, fractional_flow(fine, p))
    ax[0].set(xlabel="S_w", ylabel="f_w")
    ax[1].plot(fine, dF / p.flux_scale)
    ax[1].set(xlabel="S_w", ylabel="f_w'")
    fig.tight_layout()
    fig.savefig("demo_figures/constitutive.png", dpi=120)
