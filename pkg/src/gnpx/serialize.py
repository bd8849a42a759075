"""JSON and CSV output with fixed 17-significant-digit floats."""

from __future__ import annotations

import json
import math
from typing import Any


def format_float(x: float) -> str:
    return format(x, ".17g")


def dumps(obj: Any, indent: int | None = 2) -> str:
    """Serialize to JSON; floats use 17 significant digits, non-finite become null."""
    return _encode(obj, indent, 0) + ("\n" if indent is not None else "")


def _encode(obj: Any, indent: int | None, level: int) -> str:
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(int(obj))
    if isinstance(obj, float):
        return format_float(obj) if math.isfinite(obj) else "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        items = [f"{json.dumps(str(k))}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return _wrap("{", "}", items, indent, level)
    if isinstance(obj, (list, tuple)):
        return _wrap("[", "]", [_encode(v, indent, level + 1) for v in obj], indent, level)
    if hasattr(obj, "item"):
        # numpy scalars
        return _encode(obj.item(), indent, level)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _wrap(open_: str, close: str, items: list[str], indent: int | None, level: int) -> str:
    if not items:
        return open_ + close
    if indent is None:
        return open_ + ", ".join(items) + close
    pad = " " * (indent * (level + 1))
    return open_ + "\n" + ",\n".join(pad + it for it in items) + "\n" + " " * (indent * level) + close


def csv_cell(x: Any) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return format_float(x) if math.isfinite(x) else ""
    return str(x)


def csv_text(header: list[str], rows: list[list[Any]]) -> str:
    lines = [",".join(header)] + [",".join(csv_cell(c) for c in row) for row in rows]
    return "\n".join(lines) + "\n"
