"""Deterministic CSV/JSON output files for a run."""
from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

PROBE_HEADER = "t_day,pvi,sw_num,sw_ref"
PROFILE_HEADER = "x_m,sw_fv,sw_mw,sw_ref"
METRICS_HEADER = "pvi,rmse,l1,linf,fv_mw_rmse,front_num_m,front_ref_m,front_err_m,mass_defect"
ENERGY_HEADER = "pvi,level,energy"


def fmt(value) -> str:
    """Round-trip formatting with 17 significant digits; ``None`` becomes ``nan``."""
    if value is None:
        return "nan"
    return format(float(value), ".17g")


def pvi_label(pvi: float) -> str:
    return f"{pvi:.2f}"


def atomic_write(path, text: str):
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _csv(header: str, rows) -> str:
    lines = [header]
    lines.extend(",".join(fmt(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def run_summary(out) -> dict:
    return {
        "config": out.config.to_dict(),
        "shock_saturation": out.reference.shock_saturation,
        "shock_front_speed_m_per_day": out.reference.shock_front_speed,
        "breakthrough_pvi": out.reference.breakthrough_pvi,
        "final_mass_defect": out.final_mass_defect,
        "steps": out.ledger.step_count,
        "completed": out.completed,
        "wall_time_s": out.wall_time,
    }


def write_outputs(out, directory, gnuplot: bool = False) -> list:
    """Write every output file of ``out`` into ``directory``; returns the paths."""
    d = Path(directory)
    try:
        d.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {d}: {exc}") from exc
    written = []

    def put(name, text):
        path = d / name
        try:
            atomic_write(path, text)
        except OSError as exc:
            raise OSError(f"failed writing {path}: {exc}") from exc
        written.append(path)

    put("probe_history.csv", _csv(PROBE_HEADER, out.probe))
    for rec in out.profiles:
        mw = rec.mw if rec.mw is not None else [None] * len(rec.fv)
        put(f"profiles_pvi_{pvi_label(rec.pvi)}.csv",
            _csv(PROFILE_HEADER, zip(rec.x, rec.fv, mw, rec.ref)))
    put("metrics.csv", _csv(METRICS_HEADER, (
        (m.pvi, m.rmse, m.l1, m.linf, m.fv_mw_rmse, m.front_num, m.front_ref,
         m.front_error, m.mass_defect) for m in out.metrics)))
    put("detail_energies.csv", _csv(ENERGY_HEADER, (
        (pvi, level, e) for pvi, E in out.energies for level, e in enumerate(E))))
    put("run_summary.json", json.dumps(run_summary(out), indent=2, sort_keys=True) + "\n")
    if gnuplot:
        for name, text in gnuplot_scripts(out).items():
            put(name, text)
    return written


def gnuplot_scripts(out) -> dict:
    """Ready-to-render gnuplot scripts that read the CSV files."""
    head = "set datafile separator ','\nset key autotitle columnhead\nset terminal pngcairo size 900,600\n"
    scripts = {
        "fig_probe.gp": head + "set output 'probe.png'\nset xlabel 'PVI'\nset ylabel 'S_w'\n"
        "plot 'probe_history.csv' using 2:4 with lines title 'reference', "
        "'' using 2:3 with lines dt 2 title 'FV/MW'\n",
        "fig_errors.gp": head + "set output 'errors.png'\nset logscale y\nset xlabel 'PVI'\n"
        "plot for [c=2:5] 'metrics.csv' using 1:c with linespoints\n",
        "fig_front_mass.gp": head + "set output 'front_mass.png'\nset multiplot layout 1,2\n"
        "set xlabel 'PVI'\nplot 'metrics.csv' using 1:8 with linespoints\n"
        "set logscale y\nplot 'metrics.csv' using 1:9 with linespoints\nunset multiplot\n",
        "fig_energies.gp": head + "set output 'energies.png'\nset logscale y\nset xlabel 'PVI'\n"
        "plot 'detail_energies.csv' using 1:($3 > 0 ? $3 : 1/0):2 with points palette\n",
    }
    plots = []
    plots_fv = []
    for rec in out.profiles:
        name = f"profiles_pvi_{pvi_label(rec.pvi)}.csv"
        plots.append(f"'{name}' using 1:4 with lines title 'ref {pvi_label(rec.pvi)}', "
                     f"'{name}' using 1:3 with lines dt 2 notitle")
        plots_fv.append(f"'{name}' using 1:2 with lines title 'FV {pvi_label(rec.pvi)}', "
                        f"'{name}' using 1:3 with lines dt 2 notitle")
    if plots:
        scripts["fig_profiles.gp"] = (head + "set output 'profiles.png'\nset xlabel 'x [m]'\n"
                                      "plot " + ", ".join(plots) + "\n")
        scripts["fig_fv_mw.gp"] = (head + "set output 'fv_mw.png'\nset xlabel 'x [m]'\n"
                                   "plot " + ", ".join(plots_fv) + "\n")
    return scripts
