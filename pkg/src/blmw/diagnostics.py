"""Validation quantities: error norms, front location, mass balance, detail energies."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, NonDyadicError


@dataclass(frozen=True)
class SnapshotMetrics:
    pvi: float
    rmse: float
    l1: float
    linf: float
    fv_mw_rmse: float
    front_num: float | None
    front_ref: float | None
    front_error: float | None
    mass_defect: float


def _pair(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise DimensionMismatchError(f"shapes {a.shape} and {b.shape} differ")
    return a, b


def error_metrics(num, ref):
    """(rmse, l1, linf) of ``num - ref`` with mean-normalized discrete norms."""
    num, ref = _pair(num, ref)
    e = np.abs(num - ref)
    if e.size == 0:
        return 0.0, 0.0, 0.0
    return float(np.sqrt(np.mean(e ** 2))), float(np.mean(e)), float(np.max(e))


def fv_mw_rmse(fv, mw) -> float:
    return error_metrics(fv, mw)[0]


def front_location(profile, grid, threshold: float = 0.5):
    """Most advanced crossing of ``threshold`` by the linear interpolant of cell-center values.

    The scan runs from the outlet toward the inlet.  Returns ``None`` when
    the whole profile lies below the threshold and ``grid.length`` when the
    outlet cell is at or above it (the isoline has left the core).
    """
    v = np.asarray(profile, dtype=float)
    above = v >= threshold
    if not np.any(above):
        return None
    if above[-1]:
        return float(grid.length)
    j = int(np.nonzero(above[:-1] & ~above[1:])[0][-1])
    x = grid.centers
    lam = (threshold - v[j]) / (v[j + 1] - v[j])
    return float(x[j] + lam * (x[j + 1] - x[j]))


def mass_balance_defect(state0, stateN, ledger, grid) -> float:
    S0 = np.asarray(getattr(state0, "averages", state0), dtype=float)
    SN = np.asarray(getattr(stateN, "averages", stateN), dtype=float)
    _pair(S0, SN)
    stored = float(np.sum(SN - S0)) * grid.dx
    return abs(stored - (ledger.integrated_inlet - ledger.integrated_outlet))


def detail_energies(values) -> np.ndarray:
    """Dyadic detail energies by repeated pairwise averaging and half-differencing.

    Returns an array ``E`` of length ``log2(N)`` where ``E[l]`` is the sum of
    squared half-differences at level ``l``; larger ``l`` is finer.
    """
    v = np.asarray(values, dtype=float)
    N = v.shape[0]
    if N < 1 or N & (N - 1):
        raise NonDyadicError(f"length must be a power of two, got {N}")
    m = N.bit_length() - 1
    E = np.zeros(m)
    for s in range(1, m + 1):
        even, odd = v[0::2], v[1::2]
        E[m - s] = np.sum((0.5 * (even - odd)) ** 2)
        v = 0.5 * (even + odd)
    return E


def total_variation(values) -> float:
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        raise ValueError("total_variation of an empty vector")
    return float(np.sum(np.abs(np.diff(v))))


def front_error(front_num, front_ref):
    if front_num is None or front_ref is None:
        return None
    return abs(front_num - front_ref)


def fit_rate(cells, errors) -> float:
    """Observed order: least-squares slope of log(error) against log(spacing)."""
    h = 1.0 / np.asarray(cells, dtype=float)
    slope = np.polyfit(np.log(h), np.log(np.asarray(errors, dtype=float)), 1)[0]
    return float(slope) if math.isfinite(slope) else float("nan")
