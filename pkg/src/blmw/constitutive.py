"""Corey constitutive chain for one-dimensional Buckley-Leverett transport.

Every function accepts scalars or numpy arrays of water saturation and
returns arrays of the same shape.  Saturations outside
``[connate_water, injected_saturation]`` are clamped before evaluation so
that round-off from the transport update never feeds a negative base into a
non-integer power.

Units are meters and days throughout.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace

import numpy as np

from .errors import InvalidParamsError

#: 1 mL/min expressed in m^3/day.
ML_PER_MIN = 1.0e-6 * 60.0 * 24.0

# Uniform samples used by max_wave_speed in addition to both endpoints.
WAVE_SPEED_SAMPLES = 256


@dataclass(frozen=True)
class FluidRockParams:
    """Rock, fluid and geometry constants of a core flood.

    ``cross_section`` and ``darcy_velocity`` are derived from the core
    diameter and the injection rate when left as ``None``; when supplied they
    must agree with the derived values to a relative tolerance of 1e-6.
    """

    core_length: float = 0.1524
    core_diameter: float = 0.0381
    porosity: float = 0.20
    connate_water: float = 0.10
    residual_oil: float = 0.20
    initial_saturation: float = 0.10
    injected_saturation: float = 0.80
    water_viscosity: float = 1.0e-3
    oil_viscosity: float = 4.0e-3
    corey_nw: float = 2.0
    corey_no: float = 2.0
    endpoint_krw: float = 1.0
    endpoint_kro: float = 1.0
    injection_rate: float = 1.0 * ML_PER_MIN  # m^3/day
    cross_section: float | None = field(default=None)
    darcy_velocity: float | None = field(default=None)

    def __post_init__(self):
        for f in fields(self):
            val = getattr(self, f.name)
            if val is not None and not math.isfinite(val):
                raise InvalidParamsError(f"{f.name} must be finite, got {val!r}")
        if self.core_length <= 0 or self.core_diameter <= 0:
            raise InvalidParamsError("core_length and core_diameter must be positive")
        if not 0.0 < self.porosity < 1.0:
            raise InvalidParamsError(f"porosity must lie in (0, 1), got {self.porosity}")
        swc, sinj, sinit = self.connate_water, self.injected_saturation, self.initial_saturation
        if not 0.0 <= swc < sinj <= 1.0:
            raise InvalidParamsError(
                f"need 0 <= connate_water < injected_saturation <= 1, got {swc}, {sinj}")
        if not 0.0 <= self.residual_oil < 1.0:
            raise InvalidParamsError(f"residual_oil must lie in [0, 1), got {self.residual_oil}")
        if not swc <= sinit < sinj:
            raise InvalidParamsError(
                f"need connate_water <= initial_saturation < injected_saturation, got {sinit}")
        if self.water_viscosity <= 0 or self.oil_viscosity <= 0:
            raise InvalidParamsError("viscosities must be positive")
        if self.corey_nw < 1 or self.corey_no < 1:
            raise InvalidParamsError("Corey exponents must be >= 1")
        for name in ("endpoint_krw", "endpoint_kro"):
            if not 0.0 < getattr(self, name) <= 1.0:
                raise InvalidParamsError(f"{name} must lie in (0, 1]")
        if self.injection_rate <= 0:
            raise InvalidParamsError("injection_rate must be positive")

        area = math.pi * self.core_diameter ** 2 / 4.0
        if self.cross_section is None:
            object.__setattr__(self, "cross_section", area)
        elif not math.isclose(self.cross_section, area, rel_tol=1e-6):
            raise InvalidParamsError(
                f"cross_section {self.cross_section} inconsistent with pi*D^2/4 = {area}")
        v = self.injection_rate / self.cross_section
        if self.darcy_velocity is None:
            object.__setattr__(self, "darcy_velocity", v)
        elif not math.isclose(self.darcy_velocity, v, rel_tol=1e-6):
            raise InvalidParamsError(
                f"darcy_velocity {self.darcy_velocity} inconsistent with q/A = {v}")

    @property
    def mobility_ratio(self) -> float:
        """Viscosity ratio mu_w / mu_o."""
        return self.water_viscosity / self.oil_viscosity

    @property
    def flux_scale(self) -> float:
        """Interstitial velocity v/phi in m/day."""
        return self.darcy_velocity / self.porosity

    @property
    def saturation_bounds(self) -> tuple[float, float]:
        return (min(self.initial_saturation, self.injected_saturation),
                max(self.initial_saturation, self.injected_saturation))

    def time_to_pvi(self, t):
        return self.darcy_velocity * np.asarray(t, dtype=float) / (self.porosity * self.core_length)

    def pvi_to_time(self, pvi):
        return np.asarray(pvi, dtype=float) * self.porosity * self.core_length / self.darcy_velocity

    def with_changes(self, **kw) -> "FluidRockParams":
        # derived quantities are recomputed unless explicitly given
        kw.setdefault("cross_section", None)
        kw.setdefault("darcy_velocity", None)
        return replace(self, **kw)


def _clamp(S, p: FluidRockParams):
    return np.clip(np.asarray(S, dtype=float), p.connate_water, p.injected_saturation)


def effective_saturation(S, p: FluidRockParams):
    """Normalized saturation (S - S_wc) / (S_inj - S_wc), in [0, 1]."""
    span = p.injected_saturation - p.connate_water
    if span <= 0:
        raise InvalidParamsError("injected_saturation must exceed connate_water")
    return (_clamp(S, p) - p.connate_water) / span


def relative_permeabilities(S, p: FluidRockParams):
    u = effective_saturation(S, p)
    krw = p.endpoint_krw * u ** p.corey_nw
    kro = p.endpoint_kro * (1.0 - u) ** p.corey_no
    return krw, kro


def mobilities(S, p: FluidRockParams):
    if p.water_viscosity <= 0 or p.oil_viscosity <= 0:
        raise InvalidParamsError("viscosities must be positive")
    krw, kro = relative_permeabilities(S, p)
    return krw / p.water_viscosity, kro / p.oil_viscosity


def fractional_flow(S, p: FluidRockParams):
    lw, lo = mobilities(S, p)
    total = lw + lo
    if np.any(total <= 0):
        raise InvalidParamsError("degenerate mobility: lambda_w + lambda_o = 0")
    return lw / total


def transport_flux(S, p: FluidRockParams):
    """Conservative flux F(S) = (v/phi) f_w(S) in m/day."""
    return p.flux_scale * fractional_flow(S, p)


def fractional_flow_derivative(S, p: FluidRockParams):
    """Analytic d f_w / dS (per unit saturation)."""
    u = effective_saturation(S, p)
    span = p.injected_saturation - p.connate_water
    a = p.endpoint_krw * u ** p.corey_nw / p.water_viscosity
    b = p.endpoint_kro * (1.0 - u) ** p.corey_no / p.oil_viscosity
    # d/du of the mobilities; exponents >= 1 keep these finite at the endpoints
    da = p.endpoint_krw * p.corey_nw * u ** (p.corey_nw - 1.0) / p.water_viscosity
    db = -p.endpoint_kro * p.corey_no * (1.0 - u) ** (p.corey_no - 1.0) / p.oil_viscosity
    return (da * b - a * db) / (a + b) ** 2 / span


def flux_derivative(S, p: FluidRockParams):
    """dF/dS in m/day per unit saturation."""
    return p.flux_scale * fractional_flow_derivative(S, p)


def max_wave_speed(a, b, p: FluidRockParams, samples: int = WAVE_SPEED_SAMPLES):
    """Bound on |F'| over the bracket between ``a`` and ``b``.

    Evaluated on ``samples`` uniform points plus both endpoints, then
    refined by golden-section search on the two sample gaps around the best
    sample.  ``a`` and ``b`` may be arrays of equal shape; the result then
    has that shape.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    lo = np.minimum(a, b)
    hi = np.maximum(a, b)
    theta = np.linspace(0.0, 1.0, samples + 2)
    s = lo[..., None] + (hi - lo)[..., None] * theta
    speed = np.abs(flux_derivative(s, p))
    k = np.argmax(speed, axis=-1)
    best = np.take_along_axis(speed, k[..., None], axis=-1)[..., 0]
    h = (hi - lo) / (samples + 1)
    centre = lo + k * h
    left = np.maximum(centre - h, lo)
    right = np.minimum(centre + h, hi)
    g = 0.5 * (math.sqrt(5.0) - 1.0)
    for _ in range(40):
        x1 = right - g * (right - left)
        x2 = left + g * (right - left)
        f1 = np.abs(flux_derivative(x1, p))
        f2 = np.abs(flux_derivative(x2, p))
        best = np.maximum(best, np.maximum(f1, f2))
        keep_left = f1 >= f2
        right = np.where(keep_left, x2, right)
        left = np.where(keep_left, left, x1)
    return best
