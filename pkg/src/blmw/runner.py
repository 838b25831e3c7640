"""Run orchestration: time loop, snapshot schedule, multiwavelet pipeline, diagnostics."""
from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import diagnostics as dg
from .config import RunConfig, with_overrides
from .constitutive import FluidRockParams
from .fv_transport import FluxLedger, Grid, SaturationState, advance_to
from .mw_interval import post_filter, project_cell_averages, reconstruct_cell_averages
from .reference_bl import ReferenceSolution, build_reference, reference_probe, reference_profile


@dataclass(frozen=True)
class ProfileRecord:
    pvi: float
    t: float
    x: np.ndarray
    fv: np.ndarray
    mw: np.ndarray | None
    ref: np.ndarray


@dataclass
class RunOutputs:
    config: RunConfig
    reference: ReferenceSolution
    probe: list = field(default_factory=list)  # (t, pvi, sw_num, sw_ref)
    profiles: list = field(default_factory=list)
    metrics: list = field(default_factory=list)
    energies: list = field(default_factory=list)  # (pvi, E array)
    ledger: FluxLedger = field(default_factory=FluxLedger)
    final_state: SaturationState | None = None
    wall_time: float = 0.0
    completed: bool = False
    end_mass_defect: float | None = None

    @property
    def probe_array(self) -> np.ndarray:
        return np.array(self.probe, dtype=float).reshape(-1, 4)

    @property
    def final_mass_defect(self) -> float:
        """Defect at the end of the run, or at the last snapshot of an aborted one."""
        if self.end_mass_defect is not None:
            return self.end_mass_defect
        return self.metrics[-1].mass_defect if self.metrics else 0.0


def mw_reconstruction(values, grid: Grid, cfg: RunConfig) -> np.ndarray:
    mw = cfg.numerical.mw
    tree = project_cell_averages(values, grid, mw.order, mw.precision)
    return reconstruct_cell_averages(tree, grid.cells, mw.quadrature_points)


def _snapshot(state, state0, ledger, grid, p, ref, cfg, out: RunOutputs):
    fv = np.array(state.averages)
    mw = mw_reconstruction(fv, grid, cfg) if cfg.numerical.mw.enabled else None
    num = fv if mw is None else mw
    sref = reference_profile(ref, grid, state.t)
    rmse, l1, linf = dg.error_metrics(num, sref)
    thr = cfg.numerical.front_threshold
    front_num = dg.front_location(num, grid, thr)
    front_ref = dg.front_location(sref, grid, thr)
    out.metrics.append(dg.SnapshotMetrics(
        pvi=state.pvi, rmse=rmse, l1=l1, linf=linf,
        fv_mw_rmse=dg.fv_mw_rmse(fv, mw) if mw is not None else float("nan"),
        front_num=front_num, front_ref=front_ref,
        front_error=dg.front_error(front_num, front_ref),
        mass_defect=dg.mass_balance_defect(state0, state, ledger, grid),
    ))
    out.profiles.append(ProfileRecord(state.pvi, state.t, grid.centers, fv, mw, sref))
    out.energies.append((state.pvi, dg.detail_energies(num)))


def run_simulation(cfg: RunConfig) -> RunOutputs:
    """Run the configured core flood and collect every diagnostic.

    On failure the exception carries the outputs gathered so far as
    ``exc.partial_outputs``.
    """
    start = time.perf_counter()
    p: FluidRockParams = cfg.physical
    num = cfg.numerical
    grid = Grid(p.core_length, num.cells)
    ref = build_reference(p)
    out = RunOutputs(config=cfg, reference=ref)
    ledger = out.ledger
    state0 = SaturationState.initial(grid, p)
    x_p = cfg.probe_x
    jp = grid.nearest_cell(x_p)
    bounds = p.saturation_bounds
    steps = 0

    def record_probe(state):
        out.probe.append((state.t, state.pvi, float(state.averages[jp]),
                          reference_probe(ref, x_p, state.t)))

    def on_step(state):
        nonlocal steps
        steps += 1
        mw = num.mw
        if mw.enabled and mw.postfilter_cadence > 0 and steps % mw.postfilter_cadence == 0:
            blended = post_filter(state.averages, mw_reconstruction(state.averages, grid, cfg),
                                  mw.theta, bounds)
            state = SaturationState.make(blended, state.t, p)
        record_probe(state)
        return state

    # every snapshot PVI and the end time are hit exactly
    events = sorted(set(num.snapshot_pvis) | {num.pvi_end})
    snapshots = set(num.snapshot_pvis)
    state = state0
    record_probe(state)
    try:
        for pvi in events:
            t_event = float(p.pvi_to_time(pvi))
            state, _ = advance_to(state, t_event, grid, p, num.cfl, num.flux, ledger,
                                  on_step=on_step, fallback_dt=num.fallback_dt)
            if pvi in snapshots:
                _snapshot(state, state0, ledger, grid, p, ref, cfg, out)
    except Exception as exc:
        out.wall_time = time.perf_counter() - start
        exc.partial_outputs = out
        raise
    out.final_state = state
    out.end_mass_defect = dg.mass_balance_defect(state0, state, ledger, grid)
    out.wall_time = time.perf_counter() - start
    out.completed = True
    return out


def l1_at_pvi(cfg: RunConfig, pvi: float = 0.5) -> float:
    """L1 error of the finite-volume state against the reference at ``pvi``."""
    p = cfg.physical
    grid = Grid(p.core_length, cfg.numerical.cells)
    ref = build_reference(p)
    t = float(p.pvi_to_time(pvi))
    state, _ = advance_to(SaturationState.initial(grid, p), t, grid, p,
                          cfg.numerical.cfl, cfg.numerical.flux,
                          fallback_dt=cfg.numerical.fallback_dt)
    return dg.error_metrics(state.averages, reference_profile(ref, grid, t))[1]


def convergence_study(cfg: RunConfig, cells=(128, 256, 512, 1024), pvi: float = 0.5,
                      workers: int = 1):
    """L1 errors at ``pvi`` for each grid and the fitted observed order."""
    cfgs = [with_overrides(cfg, cells=n) for n in cells]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            errors = list(pool.map(l1_at_pvi, cfgs, [pvi] * len(cfgs)))
    else:
        errors = [l1_at_pvi(c, pvi) for c in cfgs]
    return list(cells), errors, dg.fit_rate(cells, errors)
