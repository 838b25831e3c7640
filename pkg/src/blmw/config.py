"""Run configuration: strict JSON schema with Berea core-flood defaults.

A configuration file is a JSON object with up to three top-level keys::

    {
      "physical":  {"core_length": 0.1524, "injection_rate_ml_min": 1.0, ...},
      "numerical": {"cells": 512, "cfl": 0.85, "mw": {"order": 8}, ...},
      "output_dir": "out"
    }

Missing keys take their defaults; unknown keys are rejected.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

from .constitutive import ML_PER_MIN, FluidRockParams
from .errors import ConfigError, InvalidParamsError
from .fv_transport import FLUX_KINDS, is_power_of_two

DEFAULT_SNAPSHOT_PVIS = (0.05, 0.10, 0.20, 0.35, 0.50, 0.80, 1.20)

# config key -> FluidRockParams field
_PHYSICAL_KEYS = {
    "core_length": "core_length",
    "core_diameter": "core_diameter",
    "cross_section": "cross_section",
    "porosity": "porosity",
    "connate_water": "connate_water",
    "residual_oil": "residual_oil",
    "initial_saturation": "initial_saturation",
    "injected_saturation": "injected_saturation",
    "water_viscosity": "water_viscosity",
    "oil_viscosity": "oil_viscosity",
    "corey_nw": "corey_nw",
    "corey_no": "corey_no",
    "endpoint_krw": "endpoint_krw",
    "endpoint_kro": "endpoint_kro",
    "injection_rate_ml_min": "injection_rate",
    "darcy_velocity": "darcy_velocity",
}


@dataclass(frozen=True)
class MWParams:
    enabled: bool = True
    order: int = 8
    precision: float = 1e-7
    quadrature_points: int = 8
    postfilter_cadence: int = 0
    theta: float = 0.10


@dataclass(frozen=True)
class NumericsParams:
    cells: int = 512
    cfl: float = 0.85
    flux: str = "godunov"
    time_integrator: str = "ssprk2"
    pvi_end: float = 1.50
    snapshot_pvis: tuple = DEFAULT_SNAPSHOT_PVIS
    probe_x: float | None = None  # None -> core midpoint
    front_threshold: float = 0.5
    fallback_dt: float | None = None
    mw: MWParams = field(default_factory=MWParams)


@dataclass(frozen=True)
class RunConfig:
    physical: FluidRockParams = field(default_factory=FluidRockParams)
    numerical: NumericsParams = field(default_factory=NumericsParams)
    output_dir: str = "blsolve_out"

    @property
    def probe_x(self) -> float:
        x = self.numerical.probe_x
        return 0.5 * self.physical.core_length if x is None else x

    def to_dict(self) -> dict:
        p = self.physical
        phys = {key: getattr(p, attr) for key, attr in _PHYSICAL_KEYS.items()}
        phys["injection_rate_ml_min"] = p.injection_rate / ML_PER_MIN
        num = asdict(self.numerical)
        num["snapshot_pvis"] = list(self.numerical.snapshot_pvis)
        num["probe_x"] = self.probe_x
        return {"physical": phys, "numerical": num, "output_dir": self.output_dir}


def _number(value, key, integer=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{key}: expected a number, got {value!r}", key=key)
    if integer and (not float(value).is_integer()):
        raise ConfigError(f"{key}: expected an integer, got {value!r}", key=key)
    if not math.isfinite(value):
        raise ConfigError(f"{key}: must be finite", key=key)
    return int(value) if integer else float(value)


def _check_keys(block: dict, allowed, where: str):
    if not isinstance(block, dict):
        raise ConfigError(f"{where}: expected an object", key=where)
    for key in block:
        if key not in allowed:
            raise ConfigError(f"unknown key {where}.{key}" if where else f"unknown key {key}",
                              key=f"{where}.{key}" if where else key)


def _physical(block: dict) -> FluidRockParams:
    _check_keys(block, _PHYSICAL_KEYS, "physical")
    kw = {}
    for key, value in block.items():
        kw[_PHYSICAL_KEYS[key]] = _number(value, f"physical.{key}")
    if "injection_rate" in kw:
        kw["injection_rate"] *= ML_PER_MIN
    try:
        return FluidRockParams(**kw)
    except InvalidParamsError as exc:
        raise ConfigError(f"physical: {exc}", key="physical") from exc


def _mw(block: dict) -> MWParams:
    names = MWParams.__dataclass_fields__
    _check_keys(block, names, "numerical.mw")
    kw = {}
    for key, value in block.items():
        where = f"numerical.mw.{key}"
        if key == "enabled":
            if not isinstance(value, bool):
                raise ConfigError(f"{where}: expected true/false", key=where)
            kw[key] = value
        else:
            kw[key] = _number(value, where, integer=key in ("order", "quadrature_points",
                                                              "postfilter_cadence"))
    mw = MWParams(**kw)
    if mw.order < 1:
        raise ConfigError("numerical.mw.order must be >= 1", key="numerical.mw.order")
    if mw.precision < 0:
        raise ConfigError("numerical.mw.precision must be >= 0", key="numerical.mw.precision")
    if mw.quadrature_points < 1:
        raise ConfigError("numerical.mw.quadrature_points must be >= 1",
                          key="numerical.mw.quadrature_points")
    if mw.postfilter_cadence < 0:
        raise ConfigError("numerical.mw.postfilter_cadence must be >= 0",
                          key="numerical.mw.postfilter_cadence")
    if not 0.0 <= mw.theta <= 1.0:
        raise ConfigError("numerical.mw.theta must lie in [0, 1]", key="numerical.mw.theta")
    return mw


def _numerical(block: dict) -> NumericsParams:
    names = NumericsParams.__dataclass_fields__
    _check_keys(block, names, "numerical")
    kw = {}
    for key, value in block.items():
        where = f"numerical.{key}"
        if key == "mw":
            kw[key] = _mw(value)
        elif key in ("flux", "time_integrator"):
            if not isinstance(value, str):
                raise ConfigError(f"{where}: expected a string", key=where)
            kw[key] = value.lower()
        elif key == "snapshot_pvis":
            if not isinstance(value, list):
                raise ConfigError(f"{where}: expected a list", key=where)
            kw[key] = tuple(_number(v, where) for v in value)
        elif key in ("probe_x", "fallback_dt") and value is None:
            kw[key] = None
        else:
            kw[key] = _number(value, where, integer=key == "cells")
    if "snapshot_pvis" not in kw and "pvi_end" in kw:
        # default snapshots truncated to the requested run length
        kept = tuple(v for v in DEFAULT_SNAPSHOT_PVIS if v <= kw["pvi_end"])
        kw["snapshot_pvis"] = kept or (kw["pvi_end"],)
    return NumericsParams(**kw)


def validate(cfg: RunConfig) -> RunConfig:
    n = cfg.numerical
    if not is_power_of_two(n.cells):
        raise ConfigError(f"numerical.cells must be a power of two, got {n.cells}",
                          key="numerical.cells")
    if not 0.0 < n.cfl <= 1.0:
        raise ConfigError(f"numerical.cfl must lie in (0, 1], got {n.cfl}", key="numerical.cfl")
    if n.flux not in FLUX_KINDS:
        raise ConfigError(f"numerical.flux must be one of {FLUX_KINDS}", key="numerical.flux")
    if n.time_integrator != "ssprk2":
        raise ConfigError("numerical.time_integrator must be 'ssprk2'",
                          key="numerical.time_integrator")
    if n.pvi_end < 0:
        raise ConfigError("numerical.pvi_end must be >= 0", key="numerical.pvi_end")
    snaps = n.snapshot_pvis
    if any(b <= a for a, b in zip(snaps, snaps[1:])):
        raise ConfigError("numerical.snapshot_pvis must be strictly increasing",
                          key="numerical.snapshot_pvis")
    if snaps and (snaps[0] < 0 or snaps[-1] > n.pvi_end):
        raise ConfigError("numerical.snapshot_pvis must lie in [0, pvi_end]",
                          key="numerical.snapshot_pvis")
    x = cfg.probe_x
    if not 0.0 < x <= cfg.physical.core_length:
        raise ConfigError("numerical.probe_x must lie in (0, core_length]", key="numerical.probe_x")
    if n.fallback_dt is not None and n.fallback_dt <= 0:
        raise ConfigError("numerical.fallback_dt must be positive", key="numerical.fallback_dt")
    return cfg


def config_from_dict(data: dict) -> RunConfig:
    _check_keys(data, ("physical", "numerical", "output_dir"), "")
    kw = {}
    if "physical" in data:
        kw["physical"] = _physical(data["physical"])
    if "numerical" in data:
        kw["numerical"] = _numerical(data["numerical"])
    if "output_dir" in data:
        if not isinstance(data["output_dir"], str):
            raise ConfigError("output_dir: expected a string", key="output_dir")
        kw["output_dir"] = data["output_dir"]
    return validate(RunConfig(**kw))


def parse_config(path) -> RunConfig:
    path = Path(path)
    text = path.read_text(encoding="utf-8")  # FileNotFoundError propagates
    try:
        data = json.loads(text) if text.strip() else {}
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}", line=exc.lineno) from exc
    return config_from_dict(data)


def with_overrides(cfg: RunConfig, *, cells=None, flux=None, mw_enabled=None,
                   output_dir=None) -> RunConfig:
    num = cfg.numerical
    if cells is not None:
        num = replace(num, cells=int(cells))
    if flux is not None:
        num = replace(num, flux=flux)
    if mw_enabled is not None:
        num = replace(num, mw=replace(num.mw, enabled=mw_enabled))
    out = cfg.output_dir if output_dir is None else str(output_dir)
    return validate(replace(cfg, numerical=num, output_dir=out))
