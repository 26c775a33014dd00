"""Single experiments (generate FIS, train, score) and grid sweeps over them."""

from __future__ import annotations

import itertools
import logging
import math
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .. import metrics
from ..anfis import TrainConfig, TrainHistory, train
from ..errors import ConfigurationError, NeuroFuzzyError
from ..fis import SugenoFis, architecture_string, grid_partition, subtractive_clustering
from ..membership import resolve_family
from ..timeseries import SeriesPoint, as_month, forecast_one_step, lag_embed, split
from .data import ingest_series, synthetic_series

log = logging.getLogger(__name__)

LAG_RANGE = (2, 6)
MF_COUNT_RANGE = (2, 4)
EPOCH_RANGE = (30, 5000)
GENERATORS = ("grid", "cluster")
SYNTHETIC = "synthetic"


@dataclass(frozen=True)
class ExperimentConfig:
    """One point of the hyperparameter grid.

    ``mf_counts`` may be a single integer, broadcast over ``lags`` inputs;
    ``lags`` left as ``None`` is taken from the length of ``mf_counts``.
    ``data`` is a CSV path or ``"synthetic"`` (series drawn from ``seed``).
    """

    mf_type: str = "gaussian"
    mf_counts: Any = 2
    lags: int | None = 5
    epochs: int = 650
    method: str = "hybrid"
    generator: str = "grid"
    radius: float = 0.5
    train_fraction: float | None = 0.95
    split_date: str | None = None
    data: str | None = SYNTHETIC
    seed: int = 0

    def __post_init__(self):
        set_ = lambda k, v: object.__setattr__(self, k, v)  # noqa: E731
        set_("mf_type", resolve_family(self.mf_type).kind)
        counts = self.mf_counts
        if isinstance(counts, str):
            counts = [c for c in counts.replace(",", " ").split()]
        if np.ndim(counts) == 0:
            if self.lags is None:
                raise ConfigurationError("lags is required when mf_counts is a single number")
            counts = [counts] * int(self.lags)
        try:
            counts = tuple(int(c) for c in counts)
        except (TypeError, ValueError):
            raise ConfigurationError(f"mf_counts must be integers, got {self.mf_counts!r}") from None
        set_("mf_counts", counts)
        lags = len(counts) if self.lags is None else self.lags
        if int(lags) != lags:
            raise ConfigurationError(f"lags must be an integer, got {lags!r}")
        set_("lags", int(lags))
        if not LAG_RANGE[0] <= self.lags <= LAG_RANGE[1]:
            raise ConfigurationError(f"lags must lie in {LAG_RANGE}, got {self.lags}")
        if int(self.epochs) != self.epochs or not EPOCH_RANGE[0] <= self.epochs <= EPOCH_RANGE[1]:
            raise ConfigurationError(f"epochs must be an integer in {EPOCH_RANGE}, got {self.epochs}")
        set_("epochs", int(self.epochs))
        set_("method", TrainConfig(method=self.method).method)
        gen = str(self.generator).lower()
        gen = {"genfis1": "grid", "genfis2": "cluster", "clustering": "cluster"}.get(gen, gen)
        if gen not in GENERATORS:
            raise ConfigurationError(f"generator must be one of {GENERATORS}, got {self.generator!r}")
        set_("generator", gen)
        if gen == "grid":
            if len(counts) != self.lags:
                raise ConfigurationError(f"{len(counts)} MF counts for {self.lags} lags")
            if not all(MF_COUNT_RANGE[0] <= c <= MF_COUNT_RANGE[1] for c in counts):
                raise ConfigurationError(f"MF counts must lie in {MF_COUNT_RANGE}, got {counts}")
        elif not 0.0 < self.radius <= 1.0:
            raise ConfigurationError(f"cluster radius must lie in (0, 1], got {self.radius}")
        if self.split_date is not None:
            set_("split_date", str(as_month(self.split_date)))
        elif self.train_fraction is None or not 0.0 < self.train_fraction < 1.0:
            raise ConfigurationError("need a split_date or a train_fraction in (0, 1)")
        set_("seed", int(self.seed))

    def sort_key(self) -> tuple:
        return (
            self.data or "",
            self.generator,
            self.mf_type,
            self.lags,
            self.mf_counts,
            self.method,
            self.radius if self.generator == "cluster" else 0.0,
            self.split_date or "",
            self.train_fraction or 0.0,
            self.seed,
            self.epochs,
        )

    def family_key(self) -> tuple:
        """Everything except ``epochs``; runs sharing it differ only in training length."""
        return self.sort_key()[:-1]

    def train_config(self) -> TrainConfig:
        return TrainConfig(epochs=self.epochs, method=self.method)


@dataclass
class SweepRecord:
    """One row of a sweep. ``config`` is ``None`` when the grid point was rejected."""

    config: ExperimentConfig | None
    architecture: str = ""
    mfs_per_input: tuple[int, ...] = ()
    n_rules: int = 0
    train_rmse: float = math.nan
    test_rmse: float = math.nan
    test_mape: float = math.nan
    wall_time: float = 0.0
    overfit: bool = False
    best: bool = False
    error: str | None = None
    raw: dict | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


@dataclass
class SweepReport:
    records: list[SweepRecord] = field(default_factory=list)

    @property
    def best(self) -> SweepRecord | None:
        return next((r for r in self.records if r.best), None)


@dataclass
class ExperimentResult:
    record: SweepRecord
    fis: SugenoFis
    history: TrainHistory
    test_predictions: np.ndarray
    test_targets: np.ndarray
    test_stamps: np.ndarray | None


def load_series(config: ExperimentConfig, base_dir: Path | None = None) -> list[SeriesPoint]:
    if config.data in (None, SYNTHETIC):
        return synthetic_series(seed=config.seed)
    path = Path(config.data)
    if base_dir is not None and not path.is_absolute():
        path = base_dir / path
    return ingest_series(path)


def run_experiment(
    config: ExperimentConfig, series: Sequence[SeriesPoint] | None = None
) -> ExperimentResult:
    """Generate the initial FIS, train it, and score train and test parts."""
    start = time.perf_counter()
    if series is None:
        series = load_series(config)
    ds = lag_embed(series, config.lags)
    if config.split_date is not None:
        train_ds, test_ds = split(ds, at=config.split_date)
    else:
        train_ds, test_ds = split(ds, train_fraction=config.train_fraction)
    if config.generator == "grid":
        fis = grid_partition(train_ds, config.mf_counts, config.mf_type)
    else:
        fis = subtractive_clustering(train_ds, config.radius)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        fis, history = train(fis, train_ds, config.train_config())
    train_pred = forecast_one_step(fis, train_ds)
    test_pred = forecast_one_step(fis, test_ds)
    scored = metrics.evaluate(test_ds.targets, test_pred)
    record = SweepRecord(
        config=config,
        architecture=architecture_string(fis),
        mfs_per_input=fis.mf_counts,
        n_rules=fis.n_rules,
        train_rmse=metrics.rmse(train_ds.targets, train_pred),
        test_rmse=scored.rmse,
        test_mape=scored.mape,
        wall_time=time.perf_counter() - start,
    )
    return ExperimentResult(record, fis, history, test_pred, test_ds.targets, test_ds.stamps)


def _run_one(args) -> SweepRecord:
    config, series = args
    try:
        return run_experiment(config, series).record
    except NeuroFuzzyError as exc:
        return SweepRecord(config=config, error=f"{type(exc).__name__}: {exc}")
    except (ArithmeticError, ValueError, np.linalg.LinAlgError) as exc:
        return SweepRecord(config=config, error=f"{type(exc).__name__}: {exc}")


_CONFIG_FIELDS = {f.name for f in fields(ExperimentConfig)}


def expand_grid(grid: dict[str, Any]) -> list[dict[str, Any]]:
    """Cartesian product of the grid; list values are dimensions, anything else is fixed."""
    unknown = set(grid) - _CONFIG_FIELDS
    if unknown:
        raise ConfigurationError(f"unknown sweep keys: {sorted(unknown)}")
    keys = list(grid)
    values = []
    for k in keys:
        v = grid[k] if isinstance(grid[k], list) else [grid[k]]
        if not v:
            raise ConfigurationError(f"sweep dimension {k!r} is empty")
        values.append(v)
    return [dict(zip(keys, combo)) for combo in itertools.product(*values)]


def _flag_overfit(records: list[SweepRecord]) -> None:
    families: dict[tuple, list[SweepRecord]] = {}
    for r in records:
        if r.ok:
            families.setdefault(r.config.family_key(), []).append(r)
    for group in families.values():
        group.sort(key=lambda r: r.config.epochs)
        for prev, cur in zip(group, group[1:]):
            cur.overfit = cur.test_rmse > prev.test_rmse


def _flag_best(records: list[SweepRecord]) -> None:
    ok = [r for r in records if r.ok and math.isfinite(r.test_rmse)]
    if ok:
        min(ok, key=lambda r: (r.test_rmse, r.test_mape, r.n_rules)).best = True


def sweep(
    grid: dict[str, Any],
    series: Sequence[SeriesPoint] | None = None,
    workers: int = 1,
    base_dir: Path | None = None,
) -> SweepReport:
    """Run every combination; failed runs become error rows, never abort the sweep."""
    combos = expand_grid(grid)
    jobs: list[tuple[ExperimentConfig, Any]] = []
    records: list[SweepRecord] = []
    rejected: list[SweepRecord] = []
    cache: dict[tuple, list[SeriesPoint]] = {}
    for combo in combos:
        try:
            config = ExperimentConfig(**combo)
        except NeuroFuzzyError as exc:
            rejected.append(SweepRecord(config=None, raw=combo, error=f"{type(exc).__name__}: {exc}"))
            continue
        data = series
        if data is None:
            key = (config.data, config.seed if config.data in (None, SYNTHETIC) else None)
            if key not in cache:
                try:
                    cache[key] = load_series(config, base_dir)
                except NeuroFuzzyError as exc:
                    records.append(SweepRecord(config=config, error=f"{type(exc).__name__}: {exc}"))
                    continue
            data = cache[key]
        jobs.append((config, data))
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records.extend(pool.map(_run_one, jobs))
    else:
        records.extend(_run_one(job) for job in jobs)
    records.sort(key=lambda r: r.config.sort_key())
    _flag_overfit(records)
    _flag_best(records)
    return SweepReport(records + rejected)


def config_summary(config: ExperimentConfig) -> dict:
    out = asdict(config)
    out["mf_counts"] = list(config.mf_counts)
    return out
