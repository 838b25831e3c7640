import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from blmw.constitutive import FluidRockParams, max_wave_speed, transport_flux
from blmw.diagnostics import total_variation
from blmw.errors import (BoundViolationWarning, DimensionMismatchError, NonDyadicError,
                         NonFiniteStateError)
from blmw.fv_transport import (FluxLedger, Grid, SaturationState, advance_to, cfl_dt,
                               flux_critical_points, godunov_flux, numerical_flux, residual,
                               rusanov_flux, ssprk2_step)

P = FluidRockParams()
F = lambda s: float(transport_flux(s, P))  # noqa: E731


def states(n):
    return arrays(np.float64, n, elements=st.floats(0.1, 0.8, allow_nan=False))


def test_grid_geometry():
    g = Grid(P.core_length, 512)
    assert g.dx == pytest.approx(2.97656e-4, rel=1e-5)
    assert g.dx * g.cells == pytest.approx(P.core_length, rel=1e-12)
    np.testing.assert_allclose(g.centers, 0.5 * (g.interfaces[:-1] + g.interfaces[1:]))
    with pytest.raises(NonDyadicError):
        Grid(1.0, 96)


def test_nearest_cell_tie_goes_low():
    g = Grid(1.0, 4)
    assert g.nearest_cell(0.5) == 1
    assert g.nearest_cell(0.9) == 3


def test_state_pvi_consistent_with_time():
    s = SaturationState.make(np.full(4, 0.1), 0.03620, P)
    assert s.pvi == pytest.approx(P.darcy_velocity * 0.03620 / (P.porosity * P.core_length), rel=1e-12)


def test_no_interior_critical_points_for_corey():
    assert flux_critical_points(P).size == 0


def test_godunov_examples():
    assert godunov_flux(0.45, 0.45, P) == pytest.approx(5.05223, rel=1e-5)
    # brute-force min/max of F over the bracket
    s = np.linspace(0.1, 0.8, 100001)
    assert godunov_flux(0.10, 0.80, P) == pytest.approx(transport_flux(s, P).min(), abs=1e-12)
    assert godunov_flux(0.80, 0.10, P) == pytest.approx(transport_flux(s, P).max(), rel=1e-12)
    assert godunov_flux(0.80, 0.10, P) == pytest.approx(6.31529, rel=1e-5)


def test_godunov_matches_brute_force_extrema():
    rng = np.random.default_rng(3)
    a, b = rng.uniform(0.1, 0.8, (2, 200))
    theta = np.linspace(0, 1, 2001)
    s = np.minimum(a, b)[:, None] + np.abs(b - a)[:, None] * theta
    Fs = transport_flux(s, P)
    expected = np.where(a <= b, Fs.min(axis=1), Fs.max(axis=1))
    np.testing.assert_allclose(godunov_flux(a, b, P), expected, rtol=1e-12, atol=1e-14)


def test_monotone_flux_reduces_to_upwind():
    rng = np.random.default_rng(5)
    a, b = rng.uniform(0.1, 0.8, (2, 10_000))
    np.testing.assert_array_equal(godunov_flux(a, b, P), transport_flux(a, P))


def test_rusanov_examples():
    assert rusanov_flux(0.3, 0.3, P) == pytest.approx(F(0.3), rel=1e-14)
    alpha = float(max_wave_speed(0.1, 0.8, P))
    assert alpha == pytest.approx(21.04, rel=1e-2)
    val = float(rusanov_flux(0.10, 0.80, P))
    assert val == pytest.approx(0.5 * (0 + P.flux_scale) - 0.5 * alpha * 0.7, rel=1e-12)
    assert val == pytest.approx(-4.21, rel=1e-2)
    a2 = float(max_wave_speed(0.4, 0.5, P))
    assert float(rusanov_flux(0.40, 0.50, P)) == pytest.approx(
        0.5 * (F(0.4) + F(0.5)) - 0.5 * a2 * 0.1, rel=1e-12)


def test_numerical_flux_rejects_unknown_kind():
    with pytest.raises(ValueError):
        numerical_flux(0.1, 0.2, P, "roe")


def test_residual_uniform_injected_state_is_zero():
    g = Grid(P.core_length, 16)
    R, fin, fout = residual(np.full(16, 0.8), g, P)
    np.testing.assert_array_equal(R, 0.0)
    assert fin == fout == pytest.approx(P.flux_scale)


def test_residual_two_cell_riemann_by_hand():
    g = Grid(P.core_length, 2)
    R, fin, fout = residual(np.array([0.8, 0.1]), g, P)
    assert fin == F(0.8)
    assert fout == 0.0
    np.testing.assert_allclose(R, [0.0, F(0.8) / g.dx], rtol=1e-15)


def test_residual_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        residual(np.full(8, 0.1), Grid(1.0, 16), P)


@settings(max_examples=50, deadline=None)
@given(states(32), st.sampled_from(["godunov", "rusanov"]))
def test_residual_telescopes(S, kind):
    g = Grid(P.core_length, 32)
    R, fin, fout = residual(S, g, P, kind)
    assert np.sum(R) * g.dx == pytest.approx(fin - fout, abs=1e-12 * max(1.0, abs(fin)))


def test_cfl_dt_table_settings():
    g = Grid(P.core_length, 512)
    S = np.linspace(0.8, 0.1, 512)
    dt = cfl_dt(S, P, g, 0.85)
    assert dt == pytest.approx(0.85 * 2.97656e-4 / 21.04, rel=0.02)
    assert dt == pytest.approx(1.202e-5, rel=0.02)
    assert cfl_dt(S, P, g, 0.425) == 0.5 * dt


def test_cfl_dt_includes_inlet_state():
    g = Grid(P.core_length, 64)
    dt = cfl_dt(np.full(64, 0.1), P, g, 0.85)
    assert dt == pytest.approx(0.85 * g.dx / float(max_wave_speed(0.1, 0.8, P)))


def test_cfl_dt_fallback_when_no_wave_speed():
    g = Grid(P.core_length, 8)
    # uniform injected state: bracket collapses to a zero-speed endpoint
    assert cfl_dt(np.full(8, 0.8), P, g, 0.5, fallback_dt=1e-6) == 1e-6
    assert cfl_dt(np.full(8, 0.8), P, g, 0.5) > 0


def test_cfl_rejects_bad_number():
    with pytest.raises(ValueError):
        cfl_dt(np.full(8, 0.1), P, Grid(1.0, 8), 0.0)


def test_ssprk2_uniform_injected_unchanged():
    g = Grid(P.core_length, 8)
    s = SaturationState.make(np.full(8, 0.8), 0.0, P)
    s1, (fin, fout) = ssprk2_step(s, 1e-5, g, P)
    np.testing.assert_array_equal(s1.averages, s.averages)
    assert s1.t == 1e-5
    assert fin == pytest.approx(fout)


def test_ssprk2_two_cell_by_hand():
    g = Grid(P.core_length, 2)
    dt = 1e-5
    s = SaturationState.make([0.8, 0.1], 0.0, P)
    new, (fin, fout) = ssprk2_step(s, dt, g, P)
    # stage 1
    s1 = [0.8, 0.1 + dt * F(0.8) / g.dx]
    # stage 2 residual: inlet F(0.8), interface max over [s1[1], 0.8] = F(0.8), outlet F(s1[1])
    r1 = [0.0, (F(0.8) - F(s1[1])) / g.dx]
    expected = [0.5 * 0.8 + 0.5 * (s1[0] + dt * r1[0]),
                0.5 * 0.1 + 0.5 * (s1[1] + dt * r1[1])]
    np.testing.assert_allclose(new.averages, expected, rtol=0, atol=1e-14)
    assert fin == pytest.approx(dt * F(0.8), rel=1e-15)
    assert fout == pytest.approx(dt * 0.5 * (0.0 + F(s1[1])), rel=1e-14)


def test_ssprk2_step_conserves_exactly():
    g = Grid(P.core_length, 64)
    rng = np.random.default_rng(1)
    s = SaturationState.make(rng.uniform(0.1, 0.8, 64), 0.0, P)
    dt = cfl_dt(s, P, g, 0.85)
    new, (fin, fout) = ssprk2_step(s, dt, g, P)
    change = np.sum(new.averages - s.averages) * g.dx
    assert abs(change - (fin - fout)) <= 1e-14 * P.core_length


def test_ssprk2_warns_on_cfl_breach():
    g = Grid(P.core_length, 16)
    s = SaturationState.make(np.full(16, 0.1), 0.0, P)
    with pytest.warns(BoundViolationWarning):
        ssprk2_step(s, 50 * cfl_dt(s, P, g, 1.0), g, P)


def test_ssprk2_nonfinite_raises():
    g = Grid(P.core_length, 4)
    s = SaturationState(np.array([0.1, np.nan, 0.1, 0.1]), 0.0, 0.0)
    with pytest.raises(NonFiniteStateError):
        ssprk2_step(s, 1e-6, g, P)


def test_advance_to_same_time_is_identity():
    g = Grid(P.core_length, 16)
    s = SaturationState.initial(g, P)
    out, ledger = advance_to(s, 0.0, g, P)
    assert out is s
    assert ledger.step_count == 0 and ledger.integrated_inlet == 0.0


def test_advance_to_rejects_past_target():
    g = Grid(P.core_length, 16)
    s = SaturationState.make(np.full(16, 0.1), 0.01, P)
    with pytest.raises(ValueError):
        advance_to(s, 0.005, g, P)


def test_advance_to_lands_exactly_and_pvi_time_identity():
    g = Grid(P.core_length, 64)
    t_end = float(P.pvi_to_time(1.5))
    assert t_end == pytest.approx(0.03620, rel=1e-3)
    assert t_end * 1440 == pytest.approx(52.125, rel=1e-3)
    assert float(P.pvi_to_time(1.0)) == pytest.approx(0.024132, rel=1e-4)
    s, ledger = advance_to(SaturationState.initial(g, P), t_end, g, P)
    assert abs(s.t - t_end) <= 1e-14
    assert s.pvi == pytest.approx(1.5, abs=1e-12)
    assert ledger.step_count > 0


def test_on_step_hook_can_replace_state():
    g = Grid(P.core_length, 16)
    calls = []

    def hook(state):
        calls.append(state.t)
        return SaturationState.make(np.clip(state.averages, 0.1, 0.8), state.t, P)

    s, ledger = advance_to(SaturationState.initial(g, P), 1e-3, g, P, on_step=hook)
    assert len(calls) == ledger.step_count


def _run_steps(S, kind, steps, N):
    g = Grid(P.core_length, N)
    s = SaturationState.make(S, 0.0, P)
    ext_tv = [total_variation(np.concatenate(([0.8], s.averages)))]
    lo, hi = [s.averages.min()], [s.averages.max()]
    ledger = FluxLedger()
    for _ in range(steps):
        dt = cfl_dt(s, P, g, 0.85)
        with warnings.catch_warnings():
            warnings.simplefilter("error", BoundViolationWarning)
            s, (fin, fout) = ssprk2_step(s, dt, g, P, kind)
        ledger.add(fin, fout)
        ext_tv.append(total_variation(np.concatenate(([0.8], s.averages))))
        lo.append(s.averages.min())
        hi.append(s.averages.max())
    return s, ledger, np.array(ext_tv), min(lo), max(hi)


@settings(max_examples=40, deadline=None)
@given(states(32), st.sampled_from(["godunov", "rusanov"]))
def test_tvd_bounds_and_conservation(S, kind):
    s, ledger, tv, lo, hi = _run_steps(S, kind, 20, 32)
    assert np.all(np.diff(tv) <= 1e-12)
    assert lo >= 0.1 - 1e-12 and hi <= 0.8 + 1e-12
    g = Grid(P.core_length, 32)
    defect = abs(np.sum(s.averages - S) * g.dx - ledger.net)
    assert defect <= 1e-12 * 32 * max(np.max(np.abs(s.averages)), 1.0)


def test_ledger_nondecreasing_on_berea():
    g = Grid(P.core_length, 128)
    s = SaturationState.initial(g, P)
    ledger = FluxLedger()
    history = []

    def hook(state):
        history.append((ledger.integrated_inlet, ledger.integrated_outlet))

    advance_to(s, float(P.pvi_to_time(1.0)), g, P, ledger=ledger, on_step=hook)
    h = np.array(history)
    assert np.all(np.diff(h[:, 0]) >= 0) and np.all(np.diff(h[:, 1]) >= 0)
    assert h[-1, 1] > 0  # water has broken through
