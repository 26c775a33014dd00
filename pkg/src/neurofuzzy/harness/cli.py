"""Command-line entry point: ``neurofuzzy {train,forecast,evaluate,sweep,cpi,synth}``.

Exit codes: 0 success, 2 configuration error, 3 data error, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from .. import metrics
from ..cpi import national_cpi
from ..errors import ConfigurationError, NeuroFuzzyError
from ..fis import architecture_string, describe_rules
from ..timeseries import forecast_one_step, lag_embed
from .data import ingest_basket, ingest_series, synthetic_series, write_series
from .experiment import SweepReport, ExperimentConfig, config_summary, run_experiment, sweep
from .modelio import load_model, save_model
from .report import render
from .sweepfile import load_sweep_config

log = logging.getLogger("neurofuzzy")


def _counts(text: str):
    parts = text.replace(",", " ").split()
    return int(parts[0]) if len(parts) == 1 else tuple(int(p) for p in parts)


def cmd_train(args) -> int:
    config = ExperimentConfig(
        mf_type=args.mf,
        mf_counts=_counts(args.mf_counts),
        lags=args.lags,
        epochs=args.epochs,
        method=args.method,
        generator=args.gen,
        radius=args.radius,
        train_fraction=args.split if args.split_date is None else None,
        split_date=args.split_date,
        data=args.data,
        seed=args.seed,
    )
    series = ingest_series(args.data) if args.data != "synthetic" else None
    result = run_experiment(config, series)
    rec = result.record
    meta = {
        "config": config_summary(config),
        "architecture": rec.architecture,
        "train_rmse": rec.train_rmse,
        "test_rmse": rec.test_rmse,
        "test_mape": rec.test_mape,
        "epochs_run": result.history.epochs_run,
        "stop_reason": result.history.stop_reason,
    }
    if args.out:
        save_model(args.out, result.fis, lags=config.lags, metadata=meta)
    print(render(SweepReport([rec]), args.out_format), end="")
    if args.rules:
        print("\n".join(describe_rules(result.fis)))
    return 0


def _model_dataset(args):
    fis, meta = load_model(args.model)
    ds = lag_embed(ingest_series(args.data), meta["lags"])
    return fis, meta, ds


def cmd_forecast(args) -> int:
    fis, _, ds = _model_dataset(args)
    if args.from_date:
        ds = ds.since(args.from_date)
    pred = forecast_one_step(fis, ds)
    print("month,target,predicted")
    # full precision, so forecasts can be compared exactly across runs
    for stamp, target, p in zip(ds.stamps, ds.targets, pred):
        print(f"{stamp},{float(target)!r},{float(p)!r}")
    return 0


def cmd_evaluate(args) -> int:
    fis, _, ds = _model_dataset(args)
    if args.from_date:
        ds = ds.since(args.from_date)
    if len(ds) == 0:
        raise ConfigurationError(f"no rows on or after {args.from_date}")
    pred = forecast_one_step(fis, ds)
    scored = metrics.evaluate(ds.targets, pred)
    print(f"architecture {architecture_string(fis)}")
    print("month,target,predicted,error")
    for stamp, t, p, e in zip(ds.stamps, ds.targets, pred, scored.errors):
        print(f"{stamp},{t:.10g},{p:.10g},{e:.10g}")
    print(f"n={scored.n} rmse={scored.rmse:.10g} mape={scored.mape:.10g}")
    return 0


def cmd_sweep(args) -> int:
    grid, options = load_sweep_config(args.config)
    workers = args.workers or options.get("workers", 1)
    result = sweep(grid, workers=workers, base_dir=Path(args.config).resolve().parent)
    text = render(result, args.out_format, timing=args.timing)
    if args.out:
        Path(args.out).write_text(text)
    else:
        print(text, end="")
    return 0 if any(r.ok for r in result.records) else 4


def cmd_cpi(args) -> int:
    groups = ingest_basket(args.basket)
    print("group,cpi,weight")
    for g in groups:
        print(f"{g.name},{g.group_cpi:.10g},{g.weight:.10g}")
    print(f"NCPI,{national_cpi(groups):.10g},1")
    return 0


def cmd_synth(args) -> int:
    series = synthetic_series(args.points, args.start, args.seed)
    write_series(args.out, series)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="neurofuzzy", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="generate, train and score one model")
    p.add_argument("--data", required=True, help="date,cpi CSV, or 'synthetic'")
    p.add_argument("--lags", type=int, default=5)
    p.add_argument("--mf", default="gaussian", help="gaussian | gbell | triangular | trapezoidal")
    p.add_argument("--mf-counts", default="2", help="e.g. '2,2,2,2,2' or a single count")
    p.add_argument("--method", default="hybrid", choices=["hybrid", "backprop"])
    p.add_argument("--epochs", type=int, default=650)
    split = p.add_mutually_exclusive_group()
    split.add_argument("--split", type=float, default=0.95, help="training fraction")
    split.add_argument("--split-date", help="first test month, YYYY-MM")
    p.add_argument("--gen", default="grid", choices=["grid", "cluster"])
    p.add_argument("--radius", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="write the trained model here")
    p.add_argument("--out-format", default="markdown", choices=["markdown", "csv"])
    p.add_argument("--rules", action="store_true", help="print the trained rule base")
    p.set_defaults(func=cmd_train)

    for name, func, hlp in (
        ("forecast", cmd_forecast, "one-step-ahead predictions"),
        ("evaluate", cmd_evaluate, "RMSE and MAPE against actual values"),
    ):
        p = sub.add_parser(name, help=hlp)
        p.add_argument("--model", required=True)
        p.add_argument("--data", required=True)
        p.add_argument("--from-date", help="only rows whose target month is on/after YYYY-MM")
        p.set_defaults(func=func)

    p = sub.add_parser("sweep", help="run a hyperparameter grid")
    p.add_argument("--config", required=True)
    p.add_argument("--out-format", default="markdown", choices=["markdown", "csv"])
    p.add_argument("--out")
    p.add_argument("--workers", type=int)
    p.add_argument("--timing", action="store_true", help="add a wall-time column")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("cpi", help="group and national CPI from a basket CSV")
    p.add_argument("--basket", required=True)
    p.set_defaults(func=cmd_cpi)

    p = sub.add_parser("synth", help="write a synthetic monthly series")
    p.add_argument("--out", required=True)
    p.add_argument("--points", type=int, default=192)
    p.add_argument("--start", default="2000-01")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    np.seterr(over="ignore", under="ignore")
    try:
        return args.func(args)
    except NeuroFuzzyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
