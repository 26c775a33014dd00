"""Lag-window datasets for one-step-ahead forecasting of a monthly series."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConfigurationError, DataError, InsufficientDataError, ShapeError


def as_month(stamp) -> np.datetime64:
    """Coerce ``'2015-04'``, a date, or a datetime64 to month resolution."""
    try:
        return np.datetime64(stamp, "M")
    except (ValueError, TypeError) as exc:
        raise DataError(f"not a year-month stamp: {stamp!r}") from exc


@dataclass(frozen=True)
class SeriesPoint:
    stamp: np.datetime64
    value: float

    def __post_init__(self):
        object.__setattr__(self, "stamp", as_month(self.stamp))
        object.__setattr__(self, "value", float(self.value))
        if not math.isfinite(self.value):
            raise DataError(f"non-finite value at {self.stamp}")


def check_series(series: Sequence[SeriesPoint]) -> None:
    for prev, cur in zip(series, series[1:]):
        if cur.stamp <= prev.stamp:
            raise DataError(f"stamps not strictly increasing: {prev.stamp} then {cur.stamp}")


@dataclass(frozen=True)
class Dataset:
    """Input rows (oldest lag first) paired with one-step-ahead targets.

    ``stamps`` holds the month of each target, or is ``None`` for data that
    has no calendar (synthetic function-approximation sets).
    """

    rows: np.ndarray
    targets: np.ndarray
    stamps: np.ndarray | None = None

    def __post_init__(self):
        rows = np.atleast_2d(np.asarray(self.rows, dtype=float))
        targets = np.asarray(self.targets, dtype=float).reshape(-1)
        if rows.shape[0] != targets.shape[0]:
            raise ShapeError(f"{rows.shape[0]} rows but {targets.shape[0]} targets")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "targets", targets)
        if self.stamps is not None:
            stamps = np.asarray(self.stamps, dtype="datetime64[M]").reshape(-1)
            if stamps.shape[0] != targets.shape[0]:
                raise ShapeError(f"{stamps.shape[0]} stamps for {targets.shape[0]} targets")
            if np.any(np.diff(stamps) <= np.timedelta64(0, "M")):
                raise DataError("dataset stamps must be strictly increasing")
            object.__setattr__(self, "stamps", stamps)

    @property
    def arity(self) -> int:
        return self.rows.shape[1]

    def __len__(self) -> int:
        return self.targets.shape[0]

    def subset(self, index) -> Dataset:
        stamps = None if self.stamps is None else self.stamps[index]
        return Dataset(self.rows[index], self.targets[index], stamps)

    def since(self, stamp) -> Dataset:
        """Rows whose target month is ``stamp`` or later."""
        if self.stamps is None:
            raise DataError("dataset has no stamps")
        return self.subset(self.stamps >= as_month(stamp))


def lag_embed(series: Sequence[SeriesPoint], lags: int) -> Dataset:
    """Each row holds ``lags`` consecutive values; the target is the next value."""
    if int(lags) != lags or lags < 1:
        raise ConfigurationError(f"lags must be a positive integer, got {lags!r}")
    lags = int(lags)
    if len(series) <= lags:
        raise InsufficientDataError(
            f"{len(series)} points cannot feed a {lags}-lag window; need at least {lags + 1}"
        )
    check_series(series)
    values = np.array([p.value for p in series])
    stamps = np.array([p.stamp for p in series], dtype="datetime64[M]")
    windows = np.lib.stride_tricks.sliding_window_view(values[:-1], lags)
    return Dataset(windows.copy(), values[lags:], stamps[lags:])


def split(ds: Dataset, train_fraction: float | None = None, at=None) -> tuple[Dataset, Dataset]:
    """Chronological prefix/suffix split.

    ``at`` (a month) wins over ``train_fraction``: the test part starts at the
    first row whose target month is ``at`` or later. Otherwise the training
    part gets ``floor(train_fraction * N)`` rows.
    """
    n = len(ds)
    if n == 0:
        raise DataError("cannot split an empty dataset")
    if at is not None:
        if ds.stamps is None:
            raise ConfigurationError("split by stamp needs a stamped dataset")
        cut = int(np.searchsorted(ds.stamps, as_month(at), side="left"))
    elif train_fraction is not None:
        if not 0.0 < train_fraction < 1.0:
            raise ConfigurationError(f"train_fraction must lie in (0, 1), got {train_fraction}")
        cut = math.floor(train_fraction * n)
    else:
        raise ConfigurationError("give either train_fraction or a split stamp")
    if cut <= 0 or cut >= n:
        raise ConfigurationError(f"split leaves an empty side ({cut} train / {n - cut} test rows)")
    return ds.subset(slice(0, cut)), ds.subset(slice(cut, n))


def forecast_one_step(fis, ds: Dataset) -> np.ndarray:
    """Predict every row from its actual lagged values (no recursion)."""
    from .anfis import predict

    if fis.arity != ds.arity:
        raise ShapeError(f"model takes {fis.arity} inputs, dataset rows have {ds.arity}")
    return predict(fis, ds.rows)
