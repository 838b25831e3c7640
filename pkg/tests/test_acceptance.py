"""Acceptance suite: one pass/fail line per criterion.

Run ``pytest tests/test_acceptance.py -v`` and read the "acceptance
criteria" section of the terminal summary.
"""
import json
import math
import time
import warnings
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from blmw.config import RunConfig
from blmw.constitutive import FluidRockParams, fractional_flow, transport_flux
from blmw.diagnostics import detail_energies, total_variation
from blmw.errors import BoundViolationWarning
from blmw.fv_transport import (FluxLedger, Grid, SaturationState, cfl_dt, godunov_flux,
                               residual, ssprk2_step)
from blmw.mw_interval import detail_norms, project_cell_averages, reconstruct_cell_averages
from blmw.outputs import write_outputs
from blmw.reference_bl import build_reference
from blmw.runner import convergence_study, run_simulation

P = FluidRockParams()
TABLE_PVIS = (0.05, 0.10, 0.20, 0.35, 0.50, 0.80, 1.20)


def test_01_welge_construction(report):
    start = time.perf_counter()
    ref = build_reference(P)
    elapsed = time.perf_counter() - start
    M = P.mobility_ratio
    closed = 0.1 + 0.7 * math.sqrt(M / (1 + M))
    s = np.linspace(0.1, 0.8, 10 ** 6 + 1)[1:]
    brute = s[np.argmax(fractional_flow(s, P) / (s - 0.1))]
    ok = (abs(ref.shock_saturation - 0.413050) <= 1e-4
          and abs(ref.breakthrough_pvi - 0.43262) <= 1e-4
          and abs(ref.shock_saturation - closed) <= 1e-10
          and abs(ref.shock_saturation - brute) <= 1e-5
          and elapsed < 1.0)
    report(1, ok, f"S*={ref.shock_saturation:.6f} (closed form {closed:.6f}, scan {brute:.6f}), "
                  f"breakthrough PVI={ref.breakthrough_pvi:.5f}, build {elapsed * 1e3:.1f} ms")
    assert ok


def test_02_pvi_time_identity(report):
    t = float(P.pvi_to_time(1.5))
    ok = abs(t / 0.03620 - 1) <= 1e-3 and abs(t * 1440 / 52.125 - 1) <= 1e-3
    report(2, ok, f"PVI 1.50 <-> t={t:.6f} day = {t * 1440:.3f} min")
    assert ok


def test_03_probe_history(report, berea_run):
    out = berea_run
    ref = out.reference
    probe = out.probe_array
    pvi, num, sref = probe[:, 1], probe[:, 2], probe[:, 3]
    half = 0.1 + 0.5 * (ref.shock_saturation - 0.1)
    hit = np.nonzero(num > half)[0]
    bt = pvi[hit[0]] if hit.size else float("nan")
    window = (pvi >= 0.3) & (pvi <= 1.5)
    dev = float(np.max(np.abs(num[window] - sref[window])))
    expected = ref.breakthrough_pvi / 2
    ok = abs(bt - expected) <= 0.01 and dev <= 0.01 and out.wall_time < 60
    report(3, ok, f"probe breakthrough PVI {bt:.5f} vs {expected:.5f}; "
                  f"max |num-ref| on [0.3,1.5] = {dev:.2e}; run {out.wall_time:.2f} s")
    assert ok


def _localized(rec, ref, grid):
    """Cells where |e| exceeds half the jump all lie within 3 cells of the shock."""
    num = rec.mw if rec.mw is not None else rec.fv
    e = np.abs(num - rec.ref)
    big = np.nonzero(e > 0.5 * (ref.shock_saturation - 0.1))[0]
    x_shock = ref.shock_front_speed * rec.t
    if x_shock >= grid.length:
        return big.size == 0
    j_front = min(int(x_shock / grid.dx), grid.cells - 1)
    return bool(np.all(np.abs(big - j_front) <= 3))


def test_04_profile_errors(report, berea_run):
    out = berea_run
    grid = Grid(P.core_length, out.config.numerical.cells)
    parts, ok = [], True
    for m, rec in zip(out.metrics, out.profiles):
        good = m.l1 <= 5e-3 and m.rmse <= 2e-2 and _localized(rec, out.reference, grid)
        ok &= good
        parts.append(f"{m.pvi:.2f}: L1 {m.l1:.2e} RMSE {m.rmse:.2e}{'' if good else ' x'}")
    report(4, ok, "; ".join(parts))
    assert ok


def test_05_fv_mw_consistency(report, berea_run):
    exact = run_simulation(replace(RunConfig(), numerical=replace(
        RunConfig().numerical, mw=replace(RunConfig().numerical.mw, precision=0.0))))
    worst_exact = max(m.fv_mw_rmse for m in exact.metrics)
    worst_eps = max(m.fv_mw_rmse for m in berea_run.metrics)
    ok = worst_exact <= 1e-12 and worst_eps <= 1e-6
    report(5, ok, f"max FV-MW RMSE {worst_exact:.2e} (no compression), "
                  f"{worst_eps:.2e} (eps=1e-7)")
    assert ok


def test_06_mass_balance(report, berea_run):
    out = berea_run
    defect = out.final_mass_defect
    worst = max([defect] + [m.mass_defect for m in out.metrics])
    ok = worst <= 1e-11 * P.core_length and out.final_state.pvi == pytest.approx(1.5, abs=1e-12)
    report(6, ok, f"mass defect at PVI 1.5 {defect:.2e} m, max over snapshots {worst:.2e} m "
                  f"(limit {1e-11 * P.core_length:.2e})")
    assert ok


def test_07_front_position(report, berea_run):
    out = berea_run
    dx = P.core_length / out.config.numerical.cells
    parts, ok = [], True
    for m in out.metrics:
        if m.pvi < 0.10 - 1e-12:
            continue
        good = m.front_error is not None and m.front_error <= 2 * dx
        ok &= good
        err = "absent" if m.front_error is None else f"{m.front_error / dx:.6f} dx"
        parts.append(f"{m.pvi:.2f}: {err}{'' if good else ' x'}")
    report(7, ok, "front error " + "; ".join(parts))
    assert ok


sat = st.floats(0.1, 0.8, allow_nan=False)


def _property_suite():
    g = Grid(P.core_length, 64)
    failures = []

    @settings(max_examples=100, deadline=None, database=None)
    @given(arrays(np.float64, 64, elements=sat), st.sampled_from(["godunov", "rusanov"]))
    def tvd_bounds(S, kind):
        s = SaturationState.make(S, 0.0, P)
        for _ in range(10):
            tv0 = total_variation(np.concatenate(([0.8], s.averages)))
            with warnings.catch_warnings():
                warnings.simplefilter("error", BoundViolationWarning)
                s, _ = ssprk2_step(s, cfl_dt(s, P, g, 0.85), g, P, kind)
            assert total_variation(np.concatenate(([0.8], s.averages))) <= tv0 + 1e-12
            assert s.averages.min() >= 0.1 - 1e-12 and s.averages.max() <= 0.8 + 1e-12

    @settings(max_examples=100, deadline=None, database=None)
    @given(arrays(np.float64, 64, elements=sat), st.sampled_from(["godunov", "rusanov"]))
    def telescoping(S, kind):
        R, fin, fout = residual(S, g, P, kind)
        assert abs(np.sum(R) * g.dx - (fin - fout)) <= 1e-12 * max(1.0, abs(fin))
        s0 = SaturationState.make(S, 0.0, P)
        ledger = FluxLedger()
        s1, flows = ssprk2_step(s0, cfl_dt(s0, P, g, 0.85), g, P, kind)
        ledger.add(*flows)
        assert abs(np.sum(s1.averages - S) * g.dx - ledger.net) <= 1e-14 * P.core_length

    @settings(max_examples=100, deadline=None, database=None)
    @given(arrays(np.float64, 64, elements=sat))
    def parseval(S):
        t = project_cell_averages(S, g)
        lhs = detail_norms(t).sum() + np.sum(t.scaling[0] ** 2)
        assert abs(lhs - np.sum(t.scaling[-1] ** 2)) <= 1e-12

    @settings(max_examples=100, deadline=None, database=None)
    @given(arrays(np.float64, 512, elements=sat))
    def round_trip(S):
        t = project_cell_averages(S, Grid(P.core_length, 512))
        assert np.max(np.abs(reconstruct_cell_averages(t, 512) - S)) <= 1e-12

    for name, prop in [("TVD/bounds", tvd_bounds), ("telescoping", telescoping),
                       ("Parseval", parseval), ("round trip", round_trip)]:
        try:
            prop()
        except Exception as exc:  # report every property, not just the first failure
            failures.append(f"{name}: {type(exc).__name__}")

    rng = np.random.default_rng(2024)
    a, b = rng.uniform(0.1, 0.8, (2, 10_000))
    if not np.array_equal(godunov_flux(a, b, P), transport_flux(a, P)):
        failures.append("Godunov != upwind")
    if not (np.array_equal(detail_energies([1, 1, 0, 0]), [0.25, 0.0])
            and np.array_equal(detail_energies([1, 0, 1, 0]), [0.0, 0.5])):
        failures.append("detail-energy hand cases")
    return failures


def test_08_property_suites(report):
    start = time.perf_counter()
    failures = _property_suite()
    elapsed = time.perf_counter() - start
    ok = not failures and elapsed < 300
    report(8, ok, f"TVD, bounds, Godunov=upwind (1e4 pairs), telescoping, Parseval, "
                  f"round trip (100 states), energy hand cases: "
                  f"{'all hold' if not failures else ', '.join(failures)} in {elapsed:.1f} s")
    assert ok


def test_09_convergence(report):
    cells, errors, rate = convergence_study(RunConfig(), (128, 256, 512, 1024), pvi=0.5, workers=2)
    monotone = all(b < a for a, b in zip(errors, errors[1:]))
    ok = monotone and rate >= 0.6
    table = ", ".join(f"N={n}: {e:.3e}" for n, e in zip(cells, errors))
    report(9, ok, f"L1 at PVI 0.5 {table}; fitted rate {rate:.3f}")
    assert ok


def test_10_determinism(report, tmp_path):
    dirs = []
    for k in range(2):
        d = tmp_path / f"run{k}"
        write_outputs(run_simulation(RunConfig()), d)
        dirs.append(d)
    names = sorted(p.name for p in dirs[0].iterdir())
    same = names == sorted(p.name for p in dirs[1].iterdir())
    diff = []
    for name in names:
        a, b = (d / name for d in dirs)
        if name == "run_summary.json":
            ja, jb = json.loads(a.read_text()), json.loads(b.read_text())
            ja.pop("wall_time_s")
            jb.pop("wall_time_s")
            if ja != jb:
                diff.append(name)
        elif a.read_bytes() != b.read_bytes():
            diff.append(name)
    ok = same and not diff
    report(10, ok, f"{len(names)} files compared, "
                   f"{'all byte-identical (wall time excluded)' if ok else 'differ: ' + ', '.join(diff)}")
    assert ok
