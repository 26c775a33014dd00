"""Parser for the flat sweep configuration format.

One ``key = value`` per line, ``#`` starts a comment. A value holding ``|``
is a list of alternatives (a sweep dimension). MF-count tuples are written
with commas or spaces::

    data      = cpi.csv          # or "synthetic"
    mf        = gaussian | gbell
    mf_counts = 2,2,2,2,2 | 3,3,2,3,2
    epochs    = 650 | 1000
    method    = hybrid
    gen       = grid
    split_date = 2015-04
"""

from __future__ import annotations

from pathlib import Path
from typing import Any

from ..errors import ConfigurationError

KEYS = {
    "data": ("data", str),
    "mf": ("mf_type", str),
    "mf_type": ("mf_type", str),
    "mf_counts": ("mf_counts", str),
    "lags": ("lags", int),
    "epochs": ("epochs", int),
    "method": ("method", str),
    "gen": ("generator", str),
    "generator": ("generator", str),
    "radius": ("radius", float),
    "split": ("train_fraction", float),
    "train_fraction": ("train_fraction", float),
    "split_date": ("split_date", str),
    "seed": ("seed", int),
}
OPTIONS = {"workers": int}


def parse_sweep_config(text: str, source: str = "<config>") -> tuple[dict[str, Any], dict[str, Any]]:
    """Return ``(grid, options)``; ``grid`` feeds :func:`sweep` directly."""
    grid: dict[str, Any] = {}
    options: dict[str, Any] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"{source}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.lower()
        items = [v.strip() for v in value.split("|")]
        if any(not v for v in items):
            raise ConfigurationError(f"{source}:{lineno}: empty value for {key!r}")
        if key in OPTIONS:
            options[key] = OPTIONS[key](items[0])
            continue
        if key not in KEYS:
            raise ConfigurationError(f"{source}:{lineno}: unknown key {key!r}")
        name, kind = KEYS[key]
        if name in grid:
            raise ConfigurationError(f"{source}:{lineno}: {key!r} given twice")
        try:
            grid[name] = [kind(v) for v in items]
        except ValueError:
            raise ConfigurationError(f"{source}:{lineno}: bad value for {key!r}: {value!r}") from None
    if not grid:
        raise ConfigurationError(f"{source}: no sweep keys")
    if "split_date" in grid and "train_fraction" not in grid:
        grid["train_fraction"] = [None]
    if "mf_counts" in grid and "lags" not in grid:
        grid["lags"] = [None]
    return grid, options


def load_sweep_config(path) -> tuple[dict[str, Any], dict[str, Any]]:
    path = Path(path)
    try:
        text = path.read_text()
    except FileNotFoundError:
        raise ConfigurationError(f"no such sweep config: {path}") from None
    return parse_sweep_config(text, str(path))
