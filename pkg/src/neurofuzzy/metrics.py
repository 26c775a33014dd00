"""Forecast accuracy: root mean square error and mean absolute percentage error."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DataError, ShapeError


def _pair(targets, predictions) -> tuple[np.ndarray, np.ndarray]:
    t = np.asarray(targets, dtype=float).reshape(-1)
    p = np.asarray(predictions, dtype=float).reshape(-1)
    if t.shape != p.shape:
        raise ShapeError(f"{t.size} targets vs {p.size} predictions")
    if t.size == 0:
        raise ShapeError("metrics need at least one observation")
    if not (np.all(np.isfinite(t)) and np.all(np.isfinite(p))):
        raise DataError("metrics need finite values")
    return t, p


def rmse(targets, predictions) -> float:
    """sqrt(mean((target - prediction)^2))."""
    t, p = _pair(targets, predictions)
    return math.sqrt(float(np.mean((t - p) ** 2)))


def mape(targets, predictions) -> float:
    """Mean absolute percentage error, in percent."""
    t, p = _pair(targets, predictions)
    zero = np.flatnonzero(t == 0.0)
    if zero.size:
        raise DataError(f"MAPE undefined: target at index {int(zero[0])} is zero")
    return float(np.mean(np.abs((t - p) / t)) * 100.0)


@dataclass(frozen=True)
class EvalReport:
    rmse: float
    mape: float
    n: int
    errors: np.ndarray  # target - predicted


def evaluate(targets, predictions) -> EvalReport:
    t, p = _pair(targets, predictions)
    return EvalReport(rmse(t, p), mape(t, p), int(t.size), t - p)
