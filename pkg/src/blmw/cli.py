"""Command-line entry point ``blsolve``."""
from __future__ import annotations

import argparse
import logging
import sys

from .config import RunConfig, parse_config, with_overrides
from .errors import ConfigError
from .fv_transport import Grid
from .outputs import fmt, write_outputs
from .reference_bl import build_reference, reference_profile
from .runner import convergence_study, run_simulation

log = logging.getLogger("blmw")


def _load(path) -> RunConfig:
    return parse_config(path) if path else RunConfig()


def _cmd_run(args) -> int:
    cfg = with_overrides(_load(args.config), cells=args.cells, flux=args.flux,
                         mw_enabled=False if args.no_mw else None, output_dir=args.out_dir)
    try:
        out = run_simulation(cfg)
    except Exception as exc:
        partial = getattr(exc, "partial_outputs", None)
        if partial is not None:
            write_outputs(partial, cfg.output_dir, gnuplot=args.gnuplot)
            log.error("run aborted; partial outputs written to %s", cfg.output_dir)
        raise
    paths = write_outputs(out, cfg.output_dir, gnuplot=args.gnuplot)
    log.info("wrote %d files to %s (%.2f s)", len(paths), cfg.output_dir, out.wall_time)
    for m in out.metrics:
        print(f"PVI {m.pvi:5.2f}  L1 {m.l1:.3e}  RMSE {m.rmse:.3e}  Linf {m.linf:.3e}  "
              f"FV-MW {m.fv_mw_rmse:.2e}  mass {m.mass_defect:.2e}")
    return 0


def _cmd_reference(args) -> int:
    cfg = with_overrides(_load(args.config), cells=args.cells)
    p = cfg.physical
    grid = Grid(p.core_length, cfg.numerical.cells)
    ref = build_reference(p)
    values = reference_profile(ref, grid, float(p.pvi_to_time(args.pvi)))
    sys.stdout.write("x_m,sw_ref\n")
    for x, s in zip(grid.centers, values):
        sys.stdout.write(f"{fmt(x)},{fmt(s)}\n")
    return 0


def _cmd_convergence(args) -> int:
    cfg = _load(args.config)
    cells = [int(c) for c in args.cells.split(",")]
    cells, errors, rate = convergence_study(cfg, cells, pvi=args.pvi, workers=args.workers)
    print("cells,l1")
    for n, e in zip(cells, errors):
        print(f"{n},{fmt(e)}")
    print(f"# fitted rate {rate:.4f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="blsolve",
                                     description="1D Buckley-Leverett FV/multiwavelet solver")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a core-flood simulation and write outputs")
    run.add_argument("--config", help="JSON configuration (defaults: Berea benchmark)")
    run.add_argument("--out-dir")
    run.add_argument("--flux", choices=("godunov", "rusanov"))
    run.add_argument("--cells", type=int)
    run.add_argument("--no-mw", action="store_true", help="skip the multiwavelet layer")
    run.add_argument("--gnuplot", action="store_true", help="also write gnuplot scripts")
    run.set_defaults(func=_cmd_run)

    ref = sub.add_parser("reference", help="print the analytic profile at a PVI")
    ref.add_argument("--config")
    ref.add_argument("--pvi", type=float, required=True)
    ref.add_argument("--cells", type=int)
    ref.set_defaults(func=_cmd_reference)

    conv = sub.add_parser("convergence", help="L1 error table over grid sizes")
    conv.add_argument("--config")
    conv.add_argument("--cells", default="128,256,512,1024")
    conv.add_argument("--pvi", type=float, default=0.5)
    conv.add_argument("--workers", type=int, default=1)
    conv.set_defaults(func=_cmd_convergence)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"blsolve: configuration error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"blsolve: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
