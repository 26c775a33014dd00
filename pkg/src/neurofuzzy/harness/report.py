"""Render sweep reports as CSV or Markdown tables."""

from __future__ import annotations

import csv
import io

from ..errors import ConfigurationError
from .experiment import SweepRecord, SweepReport

COLUMNS = (
    "Sn",
    "MF",
    "MFs per input",
    "Epochs",
    "Architecture",
    "RMSE Training",
    "RMSE Testing",
    "MAPE Testing",
    "Method",
    "Generator",
    "Overfit",
    "Best",
    "Status",
)

_MF_LABELS = {
    "gaussian": "Gaussian",
    "gbell": "Generalized bell",
    "triangular": "Triangular",
    "trapezoidal": "Trapezoidal",
}


def _num(value: float) -> str:
    return "" if value != value else format(value, ".10g")


def _row(sn: int, rec: SweepRecord, timing: bool) -> list[str]:
    cfg = rec.config
    if cfg is None:
        raw = rec.raw or {}
        mf, epochs, method, gen = (str(raw.get(k, "")) for k in ("mf_type", "epochs", "method", "generator"))
        counts = str(raw.get("mf_counts", ""))
    else:
        mf = _MF_LABELS.get(cfg.mf_type, cfg.mf_type)
        epochs, method, gen = str(cfg.epochs), cfg.method, cfg.generator
        counts = ",".join(str(c) for c in (rec.mfs_per_input or cfg.mf_counts))
    row = [
        str(sn),
        mf,
        counts,
        epochs,
        rec.architecture,
        _num(rec.train_rmse),
        _num(rec.test_rmse),
        _num(rec.test_mape),
        method,
        gen,
        "yes" if rec.overfit else "",
        "*" if rec.best else "",
        "ok" if rec.ok else rec.error,
    ]
    if timing:
        row.append(f"{rec.wall_time:.3f}")
    return row


def table(report: SweepReport, timing: bool = False) -> tuple[list[str], list[list[str]]]:
    header = list(COLUMNS) + (["Seconds"] if timing else [])
    return header, [_row(i, rec, timing) for i, rec in enumerate(report.records, start=1)]


def render(report: SweepReport, fmt: str = "markdown", timing: bool = False) -> str:
    """Table-2-style text. Wall time is left out unless ``timing`` so output is reproducible."""
    if not report.records:
        raise ConfigurationError("cannot render an empty sweep report")
    header, rows = table(report, timing)
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
        return buf.getvalue()
    if fmt == "markdown":
        lines = ["| " + " | ".join(header) + " |", "|" + "|".join("---" for _ in header) + "|"]
        lines += ["| " + " | ".join(c.replace("|", "/") for c in row) + " |" for row in rows]
        return "\n".join(lines) + "\n"
    raise ConfigurationError(f"unknown report format {fmt!r}; use csv or markdown")


def parse(text: str, fmt: str) -> list[dict[str, str]]:
    """Read a rendered report back into one dict per row."""
    if fmt == "csv":
        return list(csv.DictReader(io.StringIO(text)))
    if fmt == "markdown":
        lines = [ln.strip() for ln in text.strip().splitlines()]
        split = lambda ln: [c.strip() for c in ln.strip("|").split("|")]  # noqa: E731
        header = split(lines[0])
        return [dict(zip(header, split(ln))) for ln in lines[2:]]
    raise ConfigurationError(f"unknown report format {fmt!r}")
