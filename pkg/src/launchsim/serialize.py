"""Deterministic JSON/CSV emission.

Floats carry 17 significant digits in JSON (full double round-trip) and 10
in CSV (readability); dict keys are emitted sorted, so equal objects always
produce identical bytes.  Non-finite floats, which standard JSON cannot
represent, are emitted as the strings "inf", "-inf", "nan".
"""

from __future__ import annotations

import json
import math
from typing import Any, Iterable, Sequence


def _float_repr(x: float, digits: int) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return format(x, f".{digits}g")


def emit_json(obj: Any, *, indent: int = 0, _level: int = 0) -> str:
    """Canonical JSON: sorted keys, 17-significant-digit floats."""
    pad = " " * (indent * (_level + 1)) if indent else ""
    end_pad = " " * (indent * _level) if indent else ""
    sep = ",\n" if indent else ", "
    nl = "\n" if indent else ""
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _float_repr(obj, 17)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [
            f"{pad}{json.dumps(str(k))}: {emit_json(v, indent=indent, _level=_level + 1)}"
            for k, v in sorted(obj.items(), key=lambda kv: str(kv[0]))
        ]
        return "{" + nl + sep.join(items) + nl + end_pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [f"{pad}{emit_json(v, indent=indent, _level=_level + 1)}" for v in obj]
        return "[" + nl + sep.join(items) + nl + end_pad + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def csv_cell(value: Any) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return format(value, ".10g")
    if value is None:
        return ""
    return str(value)


def emit_csv(
    schema: str,
    header: Sequence[str],
    rows: Iterable[Sequence[Any]],
    *,
    config_hash: str | None = None,
    comments: Sequence[str] = (),
) -> str:
    """CSV with a '#schema=name:version' first line and optional extra
    comment lines, newline-terminated."""
    lines = [f"#schema={schema}"]
    if config_hash is not None:
        lines.append(f"#config_sha256={config_hash}")
    lines.extend(f"#{c}" for c in comments)
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(csv_cell(v) for v in row))
    return "\n".join(lines) + "\n"
