"""Deterministic CSV/JSON text and atomic file output."""
from __future__ import annotations

import json
import math
import os
import tempfile
from typing import Any, Iterable, Sequence

import numpy as np

CSV_DIGITS = 12


def clean(obj: Any) -> Any:
    """Recursively convert numpy scalars/arrays to plain Python; non-finite floats become None."""
    if isinstance(obj, dict):
        return {str(k): clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return clean(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    return obj


def json_text(obj: Any) -> str:
    return json.dumps(clean(obj), indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def csv_cell(v: Any) -> str:
    if isinstance(v, (float, np.floating)):
        return format(float(v), f".{CSV_DIGITS}g")
    if v is None:
        return ""
    return str(v)


def csv_text(header: Sequence[str], rows: Iterable[Sequence[Any]], meta: dict | None = None) -> str:
    lines = []
    if meta is not None:
        lines.append("# " + json.dumps(clean(meta), ensure_ascii=False, allow_nan=False))
    lines.append(",".join(header))
    lines.extend(",".join(csv_cell(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def write_atomic(path: str, text: str) -> None:
    """Write ``text`` to ``path`` via a temporary file in the same directory."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
