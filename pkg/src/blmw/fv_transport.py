"""Conservative finite-volume transport with monotone fluxes and SSPRK2."""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

from .constitutive import FluidRockParams, flux_derivative, max_wave_speed, transport_flux
from .errors import (BoundViolationWarning, DimensionMismatchError, NonDyadicError,
                     NonFiniteStateError)

FLUX_KINDS = ("godunov", "rusanov")
BOUND_SLACK = 1e-12


def is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class Grid:
    length: float
    cells: int

    def __post_init__(self):
        if self.length <= 0:
            raise ValueError("grid length must be positive")
        if not is_power_of_two(int(self.cells)):
            raise NonDyadicError(f"cell count must be a power of two, got {self.cells}")

    @property
    def dx(self) -> float:
        return self.length / self.cells

    @property
    def interfaces(self) -> np.ndarray:
        return np.linspace(0.0, self.length, self.cells + 1)

    @property
    def centers(self) -> np.ndarray:
        xf = self.interfaces
        return 0.5 * (xf[:-1] + xf[1:])

    def nearest_cell(self, x: float) -> int:
        """Index of the cell whose center is closest to ``x``; ties go to the lower index."""
        return int(np.argmin(np.abs(self.centers - x)))


@dataclass(frozen=True)
class SaturationState:
    averages: np.ndarray
    t: float = 0.0
    pvi: float = 0.0

    @classmethod
    def make(cls, averages, t: float, p: FluidRockParams) -> "SaturationState":
        avg = np.array(averages, dtype=float)
        avg.setflags(write=False)
        return cls(avg, float(t), float(p.time_to_pvi(t)))

    @classmethod
    def initial(cls, grid: Grid, p: FluidRockParams) -> "SaturationState":
        return cls.make(np.full(grid.cells, p.initial_saturation), 0.0, p)


@dataclass
class FluxLedger:
    """Time-integrated boundary fluxes, in m (saturation x length)."""

    integrated_inlet: float = 0.0
    integrated_outlet: float = 0.0
    step_count: int = 0

    def add(self, inflow: float, outflow: float):
        self.integrated_inlet += inflow
        self.integrated_outlet += outflow
        self.step_count += 1

    @property
    def net(self) -> float:
        return self.integrated_inlet - self.integrated_outlet


@lru_cache(maxsize=64)
def flux_critical_points(p: FluidRockParams, samples: int = 4097) -> np.ndarray:
    """Interior saturations where F' changes sign.

    Godunov extrema over any bracket are attained either at its endpoints or
    at one of these points, so the min/max search reduces to a short
    candidate list.  For Corey parameters the list is empty.
    """
    s = np.linspace(p.connate_water, p.injected_saturation, samples)
    d = flux_derivative(s, p)
    roots = []
    for i in np.nonzero(d[:-1] * d[1:] < 0)[0]:
        roots.append(brentq(lambda x: float(flux_derivative(x, p)), s[i], s[i + 1], xtol=1e-14))
    return np.array(roots)


def godunov_flux(a, b, p: FluidRockParams):
    """min F over [a, b] if a <= b, else max F over [b, a]."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    Fa = transport_flux(a, p)
    Fb = transport_flux(b, p)
    fmin = np.minimum(Fa, Fb)
    fmax = np.maximum(Fa, Fb)
    lo = np.minimum(a, b)
    hi = np.maximum(a, b)
    for c in flux_critical_points(p):
        inside = (lo <= c) & (c <= hi)
        Fc = float(transport_flux(c, p))
        fmin = np.where(inside, np.minimum(fmin, Fc), fmin)
        fmax = np.where(inside, np.maximum(fmax, Fc), fmax)
    return np.where(a <= b, fmin, fmax)


def rusanov_flux(a, b, p: FluidRockParams):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    central = 0.5 * (transport_flux(a, p) + transport_flux(b, p))
    jump = b - a
    alpha = np.zeros(np.broadcast(a, b).shape)
    active = np.broadcast_to(jump != 0, alpha.shape)
    if np.any(active):
        aa, bb = np.broadcast_arrays(a, b)
        alpha[active] = max_wave_speed(aa[active], bb[active], p)
    return central - 0.5 * alpha * jump


def numerical_flux(a, b, p: FluidRockParams, flux_kind: str = "godunov"):
    if flux_kind == "godunov":
        return godunov_flux(a, b, p)
    if flux_kind == "rusanov":
        return rusanov_flux(a, b, p)
    raise ValueError(f"unknown flux kind {flux_kind!r}; expected one of {FLUX_KINDS}")


def _values(state) -> np.ndarray:
    return state.averages if isinstance(state, SaturationState) else np.asarray(state, dtype=float)


def residual(state, grid: Grid, p: FluidRockParams, flux_kind: str = "godunov"):
    """Semidiscrete rate dS/dt and the two boundary fluxes.

    Returns ``(R, flux_in, flux_out)``.  The inlet flux is the numerical
    flux between the injected saturation and the first cell; the outlet is
    an outflow closure equal to F of the last cell.
    """
    S = _values(state)
    if S.shape != (grid.cells,):
        raise DimensionMismatchError(f"state has shape {S.shape}, grid has {grid.cells} cells")
    left = np.concatenate(([p.injected_saturation], S[:-1]))
    fluxes = np.empty(grid.cells + 1)
    fluxes[:-1] = numerical_flux(left, S, p, flux_kind)
    fluxes[-1] = transport_flux(S[-1], p)
    R = -(fluxes[1:] - fluxes[:-1]) / grid.dx
    return R, float(fluxes[0]), float(fluxes[-1])


def cfl_dt(state, p: FluidRockParams, grid: Grid, cfl: float, fallback_dt: float | None = None) -> float:
    """CFL-limited step; the wave-speed bracket always includes the inlet state."""
    if not 0.0 < cfl <= 1.0:
        raise ValueError(f"cfl must lie in (0, 1], got {cfl}")
    S = _values(state)
    lo = min(float(S.min()), p.injected_saturation)
    hi = max(float(S.max()), p.injected_saturation)
    alpha = float(max_wave_speed(lo, hi, p))
    if alpha <= 0.0:
        if fallback_dt is None:
            fallback_dt = cfl * grid.dx / p.flux_scale
        return fallback_dt
    return cfl * grid.dx / alpha


def _check_bounds(S: np.ndarray, p: FluidRockParams):
    lo, hi = p.saturation_bounds
    if not np.all(np.isfinite(S)):
        raise NonFiniteStateError("non-finite saturation in state")
    excess = max(lo - float(S.min()), float(S.max()) - hi)
    if excess > BOUND_SLACK:
        warnings.warn(f"cell average outside [{lo}, {hi}] by {excess:.3e}; CFL breach?",
                      BoundViolationWarning, stacklevel=3)


def ssprk2_step(state: SaturationState, dt: float, grid: Grid, p: FluidRockParams,
                flux_kind: str = "godunov", t_new: float | None = None):
    """One two-stage SSP Runge-Kutta step.

    Returns the new state and ``(inflow, outflow)``: the stage-averaged
    boundary fluxes times ``dt``, so that the change in stored water equals
    ``(inflow - outflow)`` up to round-off.
    """
    S0 = state.averages
    R0, fin0, fout0 = residual(S0, grid, p, flux_kind)
    S1 = S0 + dt * R0
    R1, fin1, fout1 = residual(S1, grid, p, flux_kind)
    S2 = 0.5 * S0 + 0.5 * (S1 + dt * R1)
    _check_bounds(S2, p)
    t = state.t + dt if t_new is None else t_new
    inflow = dt * 0.5 * (fin0 + fin1)
    outflow = dt * 0.5 * (fout0 + fout1)
    return SaturationState.make(S2, t, p), (inflow, outflow)


def advance_to(state: SaturationState, t_target: float, grid: Grid, p: FluidRockParams,
               cfl: float = 0.85, flux_kind: str = "godunov", ledger: FluxLedger | None = None,
               on_step=None, fallback_dt: float | None = None):
    """March ``state`` to exactly ``t_target`` with CFL-limited SSPRK2 steps.

    ``on_step(state)`` is called after every accepted step; if it returns a
    state, that state replaces the current one (used by the post-filter).
    """
    if t_target < state.t:
        raise ValueError(f"t_target {t_target} precedes state time {state.t}")
    if ledger is None:
        ledger = FluxLedger()
    while state.t < t_target:
        dt = cfl_dt(state, p, grid, cfl, fallback_dt)
        remaining = t_target - state.t
        landing = dt >= remaining or state.t + dt >= t_target
        if landing:
            dt = remaining
        state, (inflow, outflow) = ssprk2_step(state, dt, grid, p, flux_kind,
                                               t_new=t_target if landing else None)
        ledger.add(inflow, outflow)
        if on_step is not None:
            replaced = on_step(state)
            if replaced is not None:
                state = replaced
    return state, ledger
