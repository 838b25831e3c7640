"""Analytic Buckley-Leverett solution by the Welge tangent construction.

The solution of the Riemann problem "injected state at the inlet, uniform
initial state ahead" is self-similar in x/t.  Behind the front the
saturation follows the rarefaction ``x = (v/phi) f_w'(S) t`` for
``S in [S*, S_inj]``; at ``x = sigma t`` it drops to the initial state.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import bisect

from .constitutive import FluidRockParams, fractional_flow, fractional_flow_derivative
from .errors import NoTangentError

TABLE_SIZE = 4096
TANGENT_XTOL = 1e-13
INVERSE_TOL = 1e-12


@dataclass(frozen=True)
class ReferenceSolution:
    shock_saturation: float
    shock_front_speed: float  # m/day
    breakthrough_pvi: float
    # rarefaction table: f_w' decreasing along saturations increasing
    speed_table: np.ndarray
    saturation_table: np.ndarray
    params: FluidRockParams

    def rarefaction_inverse(self, w):
        """Saturation S in [S*, S_inj] with f_w'(S) = w (dimensionless speed)."""
        w = np.asarray(w, dtype=float)
        sp = self.speed_table[::-1]  # increasing
        sat = self.saturation_table[::-1]
        wc = np.clip(w, sp[0], sp[-1])
        k = np.clip(np.searchsorted(sp, wc), 1, len(sp) - 1)
        # bracket in saturation: sat[k] < S <= sat[k-1] (speeds increase as saturation falls)
        s_lo = np.minimum(sat[k], sat[k - 1])
        s_hi = np.maximum(sat[k], sat[k - 1])
        p = self.params
        # vectorized bisection on the monotone branch
        while np.max(s_hi - s_lo, initial=0.0) > INVERSE_TOL:
            mid = 0.5 * (s_lo + s_hi)
            above = fractional_flow_derivative(mid, p) > wc
            s_lo = np.where(above, mid, s_lo)
            s_hi = np.where(above, s_hi, mid)
        return np.clip(0.5 * (s_lo + s_hi), self.shock_saturation, p.injected_saturation)


def tangent_residual(S, p: FluidRockParams):
    """f_w'(S) (S - S_init) - (f_w(S) - f_w(S_init)); zero at the shock saturation."""
    si = p.initial_saturation
    return (fractional_flow_derivative(S, p) * (S - si)
            - (fractional_flow(S, p) - fractional_flow(si, p)))


def build_reference(p: FluidRockParams, table_size: int = TABLE_SIZE) -> ReferenceSolution:
    si, sinj = p.initial_saturation, p.injected_saturation
    scan = np.linspace(si, sinj, 2001)[1:]
    g = tangent_residual(scan, p)
    # the tangent point is the last + to - transition of g on (S_init, S_inj]
    idx = np.nonzero((g[:-1] > 0) & (g[1:] <= 0))[0]
    if idx.size == 0:
        raise NoTangentError("tangent condition has no sign change on (S_init, S_inj)")
    i = idx[-1]
    if g[i + 1] == 0.0:
        s_star = float(scan[i + 1])
    else:
        s_star = bisect(lambda s: float(tangent_residual(s, p)), scan[i], scan[i + 1],
                        xtol=TANGENT_XTOL, rtol=4 * np.finfo(float).eps, maxiter=200)
    chord = (float(fractional_flow(s_star, p)) - float(fractional_flow(si, p))) / (s_star - si)
    sat = np.linspace(s_star, sinj, table_size)
    speeds = fractional_flow_derivative(sat, p)
    return ReferenceSolution(
        shock_saturation=s_star,
        shock_front_speed=p.flux_scale * chord,
        breakthrough_pvi=1.0 / chord,
        speed_table=speeds,
        saturation_table=sat,
        params=p,
    )


def reference_values(ref: ReferenceSolution, x, t: float):
    """Pointwise reference saturation at positions ``x`` (m) and time ``t`` (day)."""
    p = ref.params
    x = np.asarray(x, dtype=float)
    if t <= 0:
        return np.full(x.shape, p.initial_saturation)
    w = x / (p.flux_scale * t)
    S = ref.rarefaction_inverse(w)
    # left (rarefaction) value exactly at the shock
    return np.where(x > ref.shock_front_speed * t, p.initial_saturation, S)


def reference_profile(ref: ReferenceSolution, grid, t: float):
    """Reference sampled at the cell centers of ``grid`` (point values)."""
    return reference_values(ref, grid.centers, t)


def reference_probe(ref: ReferenceSolution, x_p: float, t: float) -> float:
    return float(reference_values(ref, x_p, t))
