"""Loading the yearly disaster-count series."""
from __future__ import annotations

import csv
from importlib import resources
from pathlib import Path

from .changepoint import DisasterSeries

EXPECTED_YEARS = 112
EXPECTED_FIRST_YEAR = 1851


class DataError(ValueError):
    pass


def default_data_path() -> Path:
    return Path(str(resources.files("resir") / "data" / "coal_disasters.csv"))


def load_disaster_data(path: str | Path | None = None, expected_years: int = EXPECTED_YEARS,
                       first_year: int = EXPECTED_FIRST_YEAR) -> DisasterSeries:
    """Read a ``year,count`` file; ``None`` loads the bundled series.

    Errors carry the 1-based file line of the offending row.
    """
    path = default_data_path() if path is None else Path(path)
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip().lower() for h in header] != ["year", "count"]:
            raise DataError(f"{path}: line 1: expected header 'year,count', got {header}")
        years, counts = [], []
        for row in reader:
            line = reader.line_num
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 2:
                raise DataError(f"{path}: line {line}: expected 2 columns, got {len(row)}")
            try:
                year, count = int(row[0]), int(row[1])
            except ValueError:
                raise DataError(f"{path}: line {line}: non-integer field in {row}") from None
            if count < 0:
                raise DataError(f"{path}: line {line}: negative count {count}")
            expected = (years[-1] + 1) if years else first_year
            if year != expected:
                raise DataError(f"{path}: line {line}: expected year {expected}, got {year}")
            years.append(year)
            counts.append(count)
    if len(counts) != expected_years:
        raise DataError(f"{path}: expected {expected_years} years, found {len(counts)}")
    return DisasterSeries(counts, first_year)
