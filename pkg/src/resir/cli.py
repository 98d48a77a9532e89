"""``resir`` command line.

    resir <experiment> [flags] [--config path]

On failure a single line ``resir: error[CODE]: message`` goes to stderr and
the exit status is nonzero (2 for configuration errors, 1 otherwise).
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .bench import ReplicateError
from .config import EXPERIMENTS, ConfigError, parse_config
from .datasets import DataError
from .densities import ParameterError
from .experiments import run
from .parallel import default_workers
from .report import emit_plot_data, format_csv, format_json, write_report
from .sir import DegeneratePoolError


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="resir", description=__doc__.split("\n\n")[0])
    p.add_argument("experiment_pos", nargs="?", metavar="experiment", choices=EXPERIMENTS,
                   help="one of: " + ", ".join(EXPERIMENTS))
    p.add_argument("--experiment", choices=EXPERIMENTS)
    p.add_argument("--config", help="INI config file; flags override its values")
    p.add_argument("--schemes", help="comma-separated list of sir, anti-sir, lhs-sir")
    p.add_argument("--N", type=int, help="pool size")
    p.add_argument("--n", type=int, help="resample size")
    p.add_argument("--K", type=int, help="replications")
    p.add_argument("--seed", type=int, help="master seed (64-bit unsigned)")
    p.add_argument("--target", help="target code, e.g. beta(2,3)")
    p.add_argument("--proposal", help="proposal code, e.g. unif(0,1)")
    p.add_argument("--case", help="changepoint prior case: 1, 2 or both")
    p.add_argument("--data", help="year,count file (default: bundled series)")
    p.add_argument("--center", help="MSE center: grand-mean or true-mean")
    p.add_argument("--pool-sizes", dest="pool_sizes", help="convergence-check pool sizes")
    p.add_argument("--output", "-o", help="report path (default: stdout)")
    p.add_argument("--format", help="csv or json")
    p.add_argument("--plot-data", dest="plot_data", help="write an x,y CSV series here")
    p.add_argument("--workers", type=int, help="worker processes (default: $RESIR_WORKERS or cores)")
    return p


def _fail(code: str, message: str, status: int = 1) -> int:
    print(f"resir: error[{code}]: {' '.join(str(message).split())}", file=sys.stderr)
    return status


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    flags = {k: v for k, v in vars(args).items()
             if k not in ("experiment_pos", "config", "workers")}
    if args.experiment_pos:
        if args.experiment and args.experiment != args.experiment_pos:
            return _fail("CONFIG", "conflicting experiment arguments", 2)
        flags["experiment"] = args.experiment_pos
    try:
        cfg = parse_config(args.config, flags)
        workers = args.workers if args.workers is not None else default_workers()
        report = run(cfg, workers=workers)
        if cfg.output:
            write_report(report, cfg.output, cfg.format)
        else:
            sys.stdout.write(format_csv(report) if cfg.format == "csv" else format_json(report))
        if cfg.plot_data:
            emit_plot_data(report, cfg.plot_data)
            if cfg.experiment == "changepoint":
                plot = Path(cfg.plot_data)
                emit_plot_data(report.plot["series"], plot.with_name(plot.stem + "_series.csv"))
    except ConfigError as exc:
        return _fail("CONFIG", exc, 2)
    except DataError as exc:
        return _fail("DATA", exc)
    except (DegeneratePoolError, ReplicateError) as exc:
        return _fail("POOL", f"{cfg.experiment}: {exc}")
    except ParameterError as exc:
        return _fail("PARAMETER", exc)
    except OSError as exc:
        return _fail("IO", exc)
    except (ValueError, RuntimeError) as exc:
        return _fail("RUNTIME", exc)
    return 0


if __name__ == "__main__":
    sys.exit(main())
