"""Versioned JSON model files.

Floats are written with ``repr`` precision by the json module, so a round
trip is exact. A SHA-256 checksum over the canonical body guards against
edits and truncation.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

from ..errors import ModelFormatError, NeuroFuzzyError
from ..fis import FuzzyVariable, SugenoFis
from ..membership import from_dict

FORMAT_NAME = "neurofuzzy-model"
FORMAT_VERSION = 1
LAG_ORDER = "oldest-first"


def _canonical(body: dict) -> str:
    return json.dumps(body, sort_keys=True, separators=(",", ":"), allow_nan=False)


def model_to_dict(fis: SugenoFis, lags: int | None = None, metadata: dict | None = None) -> dict:
    body = {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "lag_order": LAG_ORDER,
        "lags": fis.arity if lags is None else int(lags),
        "inputs": [
            {"name": v.name, "range": list(v.range), "mfs": [mf.to_dict() for mf in v.mfs]}
            for v in fis.inputs
        ],
        "rules": [
            {"antecedent": list(r.antecedent), "consequent": list(r.consequent)} for r in fis.rules
        ],
        "metadata": metadata or {},
    }
    body["checksum"] = "sha256:" + hashlib.sha256(_canonical(body).encode()).hexdigest()
    return body


def model_from_dict(doc: dict) -> tuple[SugenoFis, dict]:
    if not isinstance(doc, dict):
        raise ModelFormatError("model file must hold a JSON object")
    if doc.get("format") != FORMAT_NAME:
        raise ModelFormatError(f"not a {FORMAT_NAME} file")
    if doc.get("version") != FORMAT_VERSION:
        raise ModelFormatError(
            f"model format version {doc.get('version')!r} is not supported (expected {FORMAT_VERSION})"
        )
    body = {k: v for k, v in doc.items() if k != "checksum"}
    expected = "sha256:" + hashlib.sha256(_canonical(body).encode()).hexdigest()
    if doc.get("checksum") != expected:
        raise ModelFormatError("model checksum mismatch")
    if doc.get("lag_order") != LAG_ORDER:
        raise ModelFormatError(f"unsupported lag order {doc.get('lag_order')!r}")
    try:
        inputs = tuple(
            FuzzyVariable(v["name"], tuple(v["range"]), tuple(from_dict(m) for m in v["mfs"]))
            for v in doc["inputs"]
        )
        rules = doc["rules"]
        fis = SugenoFis(
            inputs,
            np.array([r["antecedent"] for r in rules], dtype=int),
            np.array([r["consequent"] for r in rules], dtype=float),
        )
        meta = dict(doc["metadata"])
        meta["lags"] = int(doc["lags"])
    except (KeyError, TypeError, ValueError, NeuroFuzzyError) as exc:
        raise ModelFormatError(f"malformed model section: {exc}") from exc
    return fis, meta


def save_model(path, fis: SugenoFis, lags: int | None = None, metadata: dict | None = None) -> None:
    text = json.dumps(model_to_dict(fis, lags, metadata), indent=1, allow_nan=False)
    Path(path).write_text(text + "\n")


def load_model(path) -> tuple[SugenoFis, dict]:
    """Return the model and its metadata (``lags`` always included)."""
    try:
        doc = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise ModelFormatError(f"no such model file: {path}") from None
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"malformed model file {path}: {exc}") from exc
    return model_from_dict(doc)
