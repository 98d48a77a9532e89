"""Report files (CSV and JSON) and plot-data series.

Report bodies are deterministic functions of the config. Timestamps and
wall-clock timings live in the metadata block only: the ``#`` comment lines
of a CSV file, or the ``metadata`` object of a JSON file.
"""
from __future__ import annotations

import json
import math
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

SCHEMA_VERSION = 1


@dataclass
class ReportFile:
    experiment: str
    columns: list[str]
    rows: list[dict]
    metadata: dict = field(default_factory=dict)
    plot: dict = field(default_factory=dict)


def _csv_value(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".6g")
    if v is None:
        return ""
    text = str(v)
    if any(c in text for c in ',"\n'):
        text = '"' + text.replace('"', '""') + '"'
    return text


def _json_value(v, indent: int = 0) -> str:
    pad = "  " * (indent + 1)
    end = "  " * indent
    if v is None:
        return "null"
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        x = float(v)
        if math.isnan(x) or math.isinf(x):
            return "null"
        return format(x, ".17g")
    if isinstance(v, str):
        return json.dumps(v)
    if isinstance(v, dict):
        if not v:
            return "{}"
        items = [f"{pad}{_json_value(str(k))}: {_json_value(x, indent + 1)}" for k, x in v.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(v, (list, tuple, np.ndarray)):
        if len(v) == 0:
            return "[]"
        items = [f"{pad}{_json_value(x, indent + 1)}" for x in v]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    return _json_value(str(v), indent)


def format_csv(report: ReportFile, with_metadata: bool = True) -> str:
    lines = []
    if with_metadata:
        for key, value in report.metadata.items():
            if isinstance(value, str) and "\n" not in value:
                flat = value
            elif isinstance(value, str):
                flat = json.dumps(value)
            else:
                flat = " ".join(_json_value(value).split())
            lines.append(f"# {key}: {flat}")
    lines.append(",".join(report.columns))
    for row in report.rows:
        lines.append(",".join(_csv_value(row.get(c)) for c in report.columns))
    return "\n".join(lines) + "\n"


def format_json(report: ReportFile) -> str:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "experiment": report.experiment,
        "metadata": report.metadata,
        "columns": report.columns,
        "rows": report.rows,
    }
    return _json_value(doc) + "\n"


def report_body(text: str, fmt: str) -> str:
    """The reproducible part of a formatted report."""
    if fmt == "csv":
        return "".join(line for line in text.splitlines(keepends=True) if not line.startswith("#"))
    doc = json.loads(text)
    doc.pop("metadata", None)
    return json.dumps(doc, sort_keys=True)


def atomic_write(path: str | Path, text: str) -> None:
    path = Path(path)
    directory = path.parent if str(path.parent) else Path(".")
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_report(report: ReportFile, path: str | Path, fmt: str = "csv") -> None:
    atomic_write(path, format_csv(report) if fmt == "csv" else format_json(report))


def write_xy_csv(path: str | Path, header: tuple[str, str], rows) -> None:
    lines = [",".join(header)]
    for x, y in rows:
        lines.append(f"{_csv_value(x)},{_csv_value(y)}")
    atomic_write(path, "\n".join(lines) + "\n")


def theta_histogram(theta) -> list[tuple[int, float]]:
    values, counts = np.unique(np.asarray(theta, dtype=np.int64), return_counts=True)
    freqs = counts / counts.sum()
    return [(int(v), float(f)) for v, f in zip(values, freqs)]


def emit_plot_data(obj, path: str | Path) -> None:
    """Write an x,y CSV series for external plotting.

    ``obj`` may be a :class:`~resir.changepoint.DisasterSeries` (year,count),
    a bench report (label,value bars of OMSE) or a changepoint report
    (value,frequency histogram of posterior theta draws).
    """
    from .changepoint import DisasterSeries

    if isinstance(obj, DisasterSeries):
        write_xy_csv(path, ("year", "count"), zip(obj.years.tolist(), obj.counts.tolist()))
        return
    if not isinstance(obj, ReportFile):
        raise TypeError(f"cannot emit plot data for {type(obj).__name__}")
    if obj.experiment in ("bench-univariate", "bench-kotz"):
        cells = {(r["target"], r["proposal"]) for r in obj.rows}
        bars = []
        for r in obj.rows:
            label = r["scheme"] if len(cells) == 1 else f"{r['target']}|{r['proposal']}|{r['scheme']}"
            bars.append((label, r["omse"]))
        write_xy_csv(path, ("label", "value"), bars)
    elif obj.experiment == "changepoint":
        write_xy_csv(path, ("value", "frequency"), obj.plot["theta_histogram"])
    elif obj.experiment == "convergence-check":
        bars = [(f"{r['scheme']}|N={r['N']}", r["ks"]) for r in obj.rows]
        write_xy_csv(path, ("label", "value"), bars)
    else:
        raise ValueError(f"no plot data for experiment {obj.experiment!r}")
