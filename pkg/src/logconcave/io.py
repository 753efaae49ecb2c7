"""Grid-function files and run reports.

File grammar (UTF-8 text, one item per line)::

    # optional comment lines, anywhere before "values:"
    kind: logconcave            (or: convex-extended)
    dim: 2
    axis0: <lo> <hi> <count>
    axis1: <lo> <hi> <count>
    values:
    <v_0>
    <v_1>
    ...

Header keys may come in any order but each must appear exactly once, with
one ``axisK`` line per axis.  Values follow in C (axis-major) order, the
last axis varying fastest, and there must be exactly ``prod(count)`` of
them.  Floats are written with ``repr``, Python's shortest round-trip
form, so reading a written file gives back the same bits.  ``+infinity``
is spelled ``inf`` and is only legal for ``convex-extended`` files.
Blank lines are ignored.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .core import ConvexFnGrid, GridSpec, LogConcaveFnGrid
from .exceptions import GridCapExceeded, ParseError

__all__ = [
    "KINDS",
    "format_grid",
    "parse_grid",
    "read_grid",
    "write_grid",
    "write_json",
    "write_csv",
]

KINDS = ("logconcave", "convex-extended")


def _kind_of(fn) -> str:
    if isinstance(fn, LogConcaveFnGrid):
        return "logconcave"
    if isinstance(fn, ConvexFnGrid):
        return "convex-extended"
    raise TypeError(f"expected a grid function, got {type(fn).__name__}")


def _fmt(v: float) -> str:
    return "inf" if v == math.inf else repr(float(v))


def format_grid(fn) -> str:
    spec = fn.spec
    lines = [f"kind: {_kind_of(fn)}", f"dim: {spec.dim}"]
    for k in range(spec.dim):
        lines.append(f"axis{k}: {spec.lo[k]!r} {spec.hi[k]!r} {spec.count[k]}")
    lines.append("values:")
    lines.extend(_fmt(v) for v in fn.values.ravel().tolist())
    return "\n".join(lines) + "\n"


def _float(token: str, lineno: int, what: str) -> float:
    try:
        return float(token)
    except ValueError:
        raise ParseError(f"{what}: cannot read {token!r} as a number", lineno) from None


def _header(lines):
    fields: dict[str, tuple[str, int]] = {}
    for lineno, raw in lines:
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line == "values:":
            return fields, lineno
        key, sep, rest = line.partition(":")
        if not sep:
            raise ParseError(f"expected 'key: value', got {line!r}", lineno)
        key = key.strip()
        if key in fields:
            raise ParseError(f"duplicate header key {key!r}", lineno)
        fields[key] = (rest.strip(), lineno)
    raise ParseError("missing 'values:' line")


def parse_grid(text: str):
    """Parse the file format above into a grid function."""
    numbered = enumerate(text.splitlines(), start=1)
    fields, values_line = _header(numbered)

    kind, kl = fields.pop("kind", (None, None))
    if kind is None:
        raise ParseError("missing 'kind' header")
    if kind not in KINDS:
        raise ParseError(f"kind must be one of {KINDS}, got {kind!r}", kl)
    dim_text, dl = fields.pop("dim", (None, None))
    if dim_text is None:
        raise ParseError("missing 'dim' header")
    if dim_text not in ("1", "2", "3"):
        raise ParseError(f"dim must be 1, 2 or 3, got {dim_text!r}", dl)
    dim = int(dim_text)

    lo, hi, count = [], [], []
    for k in range(dim):
        text_k, al = fields.pop(f"axis{k}", (None, None))
        if text_k is None:
            raise ParseError(f"missing 'axis{k}' header")
        parts = text_k.split()
        if len(parts) != 3:
            raise ParseError(f"axis{k} needs 'lo hi count', got {text_k!r}", al)
        lo.append(_float(parts[0], al, f"axis{k} lo"))
        hi.append(_float(parts[1], al, f"axis{k} hi"))
        if not parts[2].isdigit():
            raise ParseError(f"axis{k} count must be a positive integer, got {parts[2]!r}", al)
        count.append(int(parts[2]))
    if fields:
        key, (_, line) = next(iter(fields.items()))
        raise ParseError(f"unexpected header key {key!r}", line)
    try:
        spec = GridSpec(tuple(lo), tuple(hi), tuple(count))
    except GridCapExceeded:
        raise
    except ValueError as exc:
        raise ParseError(str(exc), values_line) from None

    values = []
    for lineno, raw in enumerate(text.splitlines()[values_line:], start=values_line + 1):
        token = raw.strip()
        if not token:
            continue
        v = _float(token, lineno, "value")
        if math.isnan(v):
            raise ParseError("NaN is not a valid value", lineno)
        if v == math.inf and kind == "logconcave":
            raise ParseError("'inf' only allowed in convex-extended files", lineno)
        values.append(v)
    if len(values) != spec.size:
        raise ParseError(f"expected {spec.size} values, found {len(values)}")
    arr = np.array(values, dtype=float).reshape(spec.shape)
    return LogConcaveFnGrid(spec, arr) if kind == "logconcave" else ConvexFnGrid(spec, arr)


def read_grid(path):
    return parse_grid(Path(path).read_text(encoding="utf-8"))


def write_grid(fn, path) -> None:
    Path(path).write_text(format_grid(fn), encoding="utf-8")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def write_json(record, path) -> None:
    """One structured record; non-finite floats become the strings 'inf'/'nan'."""
    Path(path).write_text(json.dumps(_jsonable(record), indent=2) + "\n", encoding="utf-8")


def write_csv(rows, path, columns=None) -> None:
    rows = list(rows)
    columns = list(columns or (rows[0].keys() if rows else []))
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, fieldnames=columns, extrasaction="ignore")
        w.writeheader()
        for row in rows:
            w.writerow({k: _fmt(v) if isinstance(v, float) else v for k, v in row.items()})
