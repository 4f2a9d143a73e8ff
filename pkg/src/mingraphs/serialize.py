"""Deterministic text output: fixed float formatting, JSON, atomic writes.

Identical inputs must produce byte-identical CSV/JSON artifacts, so floats
are always rendered with 17 significant digits (enough to round-trip IEEE
doubles) and dict fields are emitted in insertion order, never re-sorted by
a serializer.
"""

from __future__ import annotations

import math
import os
import tempfile
from pathlib import Path


def fmt_float(x: float) -> str:
    """Render a float with 17 significant digits ('nan' for missing values)."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def to_json(obj, indent: int = 0) -> str:
    """Small JSON emitter with fmt_float for every float and stable field order."""
    pad = " " * indent
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        value = fmt_float(obj)
        # bare NaN/Inf are not JSON; quote them so every parser survives
        return f'"{value}"' if value in ("nan", "inf", "-inf") else value
    if isinstance(obj, str):
        escaped = obj.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")
        return f'"{escaped}"'
    if isinstance(obj, (list, tuple)):
        inner = ", ".join(to_json(v) for v in obj)
        return f"[{inner}]"
    if isinstance(obj, dict):
        items = [f'{pad}  "{key}": {to_json(value)}' for key, value in obj.items()]
        if indent:
            return "{\n" + ",\n".join(items) + "\n" + pad + "}"
        return "{" + ", ".join(item.strip() for item in items) + "}"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def atomic_write(path: str | Path, text: str) -> Path:
    """Write text to path via a temp file + rename so readers never see partials."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path
