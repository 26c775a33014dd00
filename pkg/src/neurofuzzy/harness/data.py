"""Reading and writing monthly series, basket files, and a synthetic CPI-like generator."""

from __future__ import annotations

import csv
import math
import re
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from ..cpi import BasketGroup, group_cpi
from ..errors import DataError
from ..timeseries import SeriesPoint, as_month

SERIES_HEADER = ("date", "cpi")
BASKET_HEADER = ("group", "cost_current", "cost_base", "weight")


def _rows(path) -> Iterable[tuple[int, list[str]]]:
    path = Path(path)
    if not path.is_file():
        raise DataError(f"no such data file: {path}")
    with path.open(newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or all(not cell.strip() for cell in row):
                continue
            yield lineno, [cell.strip() for cell in row]


STAMP = re.compile(r"\d{4}-\d{2}(-\d{2})?")


def parse_series(lines: Iterable[tuple[int, list[str]]], source: str = "<series>") -> list[SeriesPoint]:
    points: list[SeriesPoint] = []
    header_seen = False
    for lineno, row in lines:
        if not header_seen:
            header_seen = True
            if tuple(c.lower() for c in row) == SERIES_HEADER:
                continue
        if len(row) != 2:
            raise DataError(f"{source}:{lineno}: expected 'YYYY-MM,value', got {','.join(row)!r}")
        stamp, value = row
        try:
            if not STAMP.fullmatch(stamp):
                raise ValueError
            # a day part is validated, then dropped
            month = np.datetime64(np.datetime64(stamp), "M")
            level = float(value)
        except ValueError:
            raise DataError(f"{source}:{lineno}: malformed row {','.join(row)!r}") from None
        if not math.isfinite(level):
            raise DataError(f"{source}:{lineno}: non-finite value {value!r}")
        if points:
            prev = points[-1].stamp
            if month <= prev:
                raise DataError(
                    f"{source}:{lineno}: stamp {month} does not follow {prev} (out of order or duplicate)"
                )
            if month - prev != np.timedelta64(1, "M"):
                raise DataError(f"{source}:{lineno}: missing months between {prev} and {month}")
        points.append(SeriesPoint(month, level))
    if not points:
        raise DataError(f"{source}: no data rows")
    return points


def ingest_series(path) -> list[SeriesPoint]:
    """Read a ``date,cpi`` CSV with ``YYYY-MM`` (or ``YYYY-MM-DD``) stamps and no gaps."""
    return parse_series(_rows(path), source=str(path))


def write_series(path, series: Sequence[SeriesPoint]) -> None:
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SERIES_HEADER)
        for p in series:
            writer.writerow([str(p.stamp), repr(p.value)])


def synthetic_series(
    n_points: int = 192,
    start: str = "2000-01",
    seed: int = 0,
    level: float = 100.0,
    trend: float = 0.32,
    seasonal: float = 0.6,
    noise: float = 0.15,
) -> list[SeriesPoint]:
    """Linear trend plus a 12-month cycle plus Gaussian noise, rounded to 2 decimals."""
    rng = np.random.default_rng(seed)
    t = np.arange(n_points)
    values = level + trend * t + seasonal * np.sin(2.0 * np.pi * t / 12.0)
    values = np.round(values + rng.normal(0.0, noise, n_points), 2)
    first = as_month(start)
    return [SeriesPoint(first + np.timedelta64(int(i), "M"), float(v)) for i, v in zip(t, values)]


def ingest_basket(path) -> list[BasketGroup]:
    """Read ``group,cost_current,cost_base,weight`` rows into basket groups."""
    groups = []
    for lineno, row in _rows(path):
        if tuple(c.lower() for c in row) == BASKET_HEADER:
            continue
        if len(row) != 4:
            raise DataError(f"{path}:{lineno}: expected 4 columns, got {len(row)}")
        try:
            current, base, weight = (float(v) for v in row[1:])
        except ValueError:
            raise DataError(f"{path}:{lineno}: malformed row {','.join(row)!r}") from None
        groups.append(BasketGroup(row[0], group_cpi(current, base), weight))
    if not groups:
        raise DataError(f"{path}: no basket rows")
    return groups
