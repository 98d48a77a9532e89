"""Shared helpers for the experiment scripts."""
import argparse

from resir.config import RunConfig
from resir.experiments import run
from resir.report import write_report


def parser(description: str, K: int, seed: int = 7) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(description=description)
    p.add_argument("--K", type=int, default=K, help="replications")
    p.add_argument("--seed", type=int, default=seed)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--output", help="also write the report to this CSV file")
    return p


def execute(cfg: RunConfig, workers, output, columns):
    report = run(cfg, workers)
    if output:
        write_report(report, output, "csv")
    widths = [max(len(c), 12) for c in columns]
    print("  ".join(c.rjust(w) for c, w in zip(columns, widths)))
    for row in report.rows:
        cells = []
        for c, w in zip(columns, widths):
            v = row[c]
            cells.append((f"{v:.4g}" if isinstance(v, float) else str(v)).rjust(w))
        print("  ".join(cells))
    return report
