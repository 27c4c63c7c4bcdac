"""Serialization of certificates and summability tables, plus a validator.

Floats are written with 17 significant digits so every value round-trips
exactly.  JSON keys keep insertion order; non-finite floats are written as the
tokens ``Infinity`` / ``-Infinity`` / ``NaN`` that :mod:`json` reads back.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from enum import Enum
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

__all__ = [
    "format_float",
    "to_json",
    "write_text_atomic",
    "write_json",
    "csv_text",
    "write_csv",
    "SUMMABILITY_HEADER",
    "summability_rows",
    "validate_path",
    "validate_paths",
]

SUMMABILITY_HEADER = ("n", "T_n", "dT_n", "alpha_n", "increment", "partial", "Tn1", "Tn2", "Tn3", "Tn4")

CERTIFICATE_KEYS = ("id", "params", "N", "M", "samples", "sup_ratio", "slope", "verdict", "notes")
VERDICTS = ("supported", "violated", "inconclusive")


def format_float(x: float) -> str:
    x = float(x)
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    if x == int(x) and abs(x) < 1e17:
        return repr(x)           # keeps "1.0", "-0.0"
    return "%.17g" % x


def _emit(obj: Any, indent: int, level: int, out: list[str]) -> None:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, Enum):
        obj = obj.value
    if obj is None or isinstance(obj, bool):
        out.append(json.dumps(obj))
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(format_float(obj))
    elif isinstance(obj, str):
        out.append(json.dumps(obj, ensure_ascii=False))
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        items = list(obj.items())
        for i, (key, val) in enumerate(items):
            out.append(pad + json.dumps(str(key), ensure_ascii=False) + ": ")
            _emit(val, indent, level + 1, out)
            out.append(",\n" if i < len(items) - 1 else "\n")
        out.append(end + "}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            out.append("[]")
            return
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in seq):
            parts: list[str] = []
            for v in seq:
                _emit(v, indent, level + 1, parts)
                parts.append(", ")
            out.append("[" + "".join(parts[:-1]) + "]")
            return
        out.append("[\n")
        for i, v in enumerate(seq):
            out.append(pad)
            _emit(v, indent, level + 1, out)
            out.append(",\n" if i < len(seq) - 1 else "\n")
        out.append(end + "]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def to_json(obj: Any, indent: int = 2) -> str:
    out: list[str] = []
    _emit(obj, indent, 0, out)
    return "".join(out) + "\n"


def write_text_atomic(path: str | os.PathLike, text: str) -> Path:
    """Write via a temporary file in the same directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def write_json(path, obj: Any) -> Path:
    return write_text_atomic(path, to_json(obj))


def csv_text(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([str(int(v)) if isinstance(v, (int, np.integer)) else format_float(v) for v in row])
    return buf.getvalue()


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    return write_text_atomic(path, csv_text(header, rows))


def summability_rows(report, decomposition: np.ndarray | None = None):
    """Rows of the summability CSV for ``n = 0..N-1``."""
    N = report.N
    parts = decomposition if decomposition is not None else np.full((N, 4), math.nan)
    for n in range(N):
        yield (n, report.T[n], report.dT[n], report.alpha[n], report.increments[n],
               report.partials[n], *parts[n])


# --------------------------------------------------------------------------
# validation


def _parse_constant(tok: str):
    return {"Infinity": math.inf, "-Infinity": -math.inf, "NaN": math.nan}[tok]


def _validate_certificate(doc: dict, where: str) -> list[str]:
    diags = []
    missing = [k for k in CERTIFICATE_KEYS if k not in doc]
    if missing:
        return [f"{where}: missing keys {missing}"]
    if list(doc)[: len(CERTIFICATE_KEYS)] != list(CERTIFICATE_KEYS):
        diags.append(f"{where}: keys out of order")
    if doc["verdict"] not in VERDICTS:
        diags.append(f"{where}: unknown verdict {doc['verdict']!r}")
    samples = doc["samples"]
    if not isinstance(samples, list) or any(not isinstance(s, list) or len(s) != 2 for s in samples):
        diags.append(f"{where}: samples must be [index, value] pairs")
    elif samples:
        vals = [float(s[1]) for s in samples]
        finite = [v for v in vals if math.isfinite(v)]
        sup = float(doc["sup_ratio"])
        if finite and math.isfinite(sup) and sup < max(finite) * (1 - 1e-12) - 1e-300:
            diags.append(f"{where}: sup_ratio below the largest sample")
    if not isinstance(doc["N"], int) or doc["N"] < 1:
        diags.append(f"{where}: N must be a positive integer")
    return diags


def _validate_json(path: Path) -> list[str]:
    try:
        doc = json.loads(path.read_text(encoding="utf-8"), parse_constant=_parse_constant)
    except (ValueError, UnicodeDecodeError) as exc:
        return [f"{path}: invalid JSON ({exc})"]
    if isinstance(doc, dict) and "id" in doc and "verdict" in doc:
        return _validate_certificate(doc, str(path))
    if isinstance(doc, dict) and "certificates" in doc:
        diags = []
        for i, c in enumerate(doc["certificates"]):
            if isinstance(c, dict) and "id" in c:
                diags += _validate_certificate(c, f"{path}[certificates][{i}]")
        if "verdict" in doc and doc["verdict"] not in VERDICTS + ("flat", "growing"):
            diags.append(f"{path}: unknown verdict {doc['verdict']!r}")
        return diags
    if not isinstance(doc, dict):
        return [f"{path}: top-level JSON value must be an object"]
    return []


def _validate_csv(path: Path) -> list[str]:
    raw = path.read_bytes()
    diags = []
    if b"\r" in raw:
        diags.append(f"{path}: carriage returns found; lines must end with \\n")
    rows = list(csv.reader(io.StringIO(raw.decode("utf-8"))))
    if not rows:
        return diags + [f"{path}: empty file"]
    header, body = rows[0], rows[1:]
    for i, row in enumerate(body, start=2):
        if len(row) != len(header):
            diags.append(f"{path}:{i}: expected {len(header)} fields, found {len(row)}")
            continue
        for name, cell in zip(header, row):
            try:
                float(cell)
            except ValueError:
                diags.append(f"{path}:{i}: column {name} is not numeric ({cell!r})")
    if tuple(header) == SUMMABILITY_HEADER and body and not diags:
        idx = header.index("partial")
        parts = [float(r[idx]) for r in body]
        if any(b < a for a, b in zip(parts, parts[1:])):
            diags.append(f"{path}: partial column decreases")
        ns = [int(r[0]) for r in body]
        if ns != list(range(len(ns))):
            diags.append(f"{path}: n column is not 0..N-1")
    return diags


def validate_path(path: str | os.PathLike) -> list[str]:
    """Diagnostics for one CSV or JSON file written by this package."""
    path = Path(path)
    if not path.is_file():
        return [f"{path}: no such file"]
    if path.suffix.lower() == ".json":
        return _validate_json(path)
    if path.suffix.lower() == ".csv":
        return _validate_csv(path)
    return [f"{path}: unsupported file type"]


def validate_paths(paths: Iterable[str | os.PathLike]) -> list[str]:
    """Validate files; directories are searched for ``*.csv`` and ``*.json``."""
    diags = []
    for p in paths:
        p = Path(p)
        if p.is_dir():
            files = sorted(q for q in p.rglob("*") if q.suffix.lower() in (".csv", ".json"))
            for q in files:
                diags += validate_path(q)
        else:
            diags += validate_path(p)
    return diags
