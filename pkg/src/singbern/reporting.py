"""Deterministic CSV/JSON emission for experiment reports.

All floating-point output is printed with 17 significant digits so that
values round-trip exactly; CSV always uses '.' as the decimal mark and
',' as the field separator regardless of locale.
"""

from __future__ import annotations

import math
from typing import IO, Iterable, Mapping, Sequence

SCHEMA_VERSION = 1


def format_float(v: float) -> str:
    if not math.isfinite(v):
        return "inf" if v > 0 else ("-inf" if v < 0 else "nan")
    return format(float(v), ".17g")


def format_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format_float(v)
    if isinstance(v, (list, tuple)):
        return ";".join(format_cell(x) for x in v)
    return str(v)


def json_dumps(obj, indent: int = 2) -> str:
    """JSON text with deterministic key order and 17-digit floats."""

    def emit(o, depth):
        pad = " " * (indent * depth)
        pad_in = " " * (indent * (depth + 1))
        if o is None:
            return "null"
        if isinstance(o, bool):
            return "true" if o else "false"
        if isinstance(o, (int,)):
            return str(o)
        if isinstance(o, float):
            if not math.isfinite(o):
                return "null"
            return format_float(o)
        if isinstance(o, str):
            return '"' + o.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n") + '"'
        if isinstance(o, Mapping):
            if not o:
                return "{}"
            items = (
                f'{pad_in}"{k}": {emit(o[k], depth + 1)}' for k in sorted(map(str, o.keys()))
            )
            return "{\n" + ",\n".join(items) + "\n" + pad + "}"
        if isinstance(o, (list, tuple)):
            if not len(o):
                return "[]"
            items = (f"{pad_in}{emit(x, depth + 1)}" for x in o)
            return "[\n" + ",\n".join(items) + "\n" + pad + "]"
        raise TypeError(f"cannot serialize {type(o).__name__}")

    return emit(obj, 0) + "\n"


def write_csv(stream: IO[str], header: Sequence[str], rows: Iterable[Mapping]) -> None:
    stream.write(",".join(header) + "\n")
    for row in rows:
        stream.write(",".join(format_cell(row.get(col)) for col in header) + "\n")


def table_header(rows: Sequence[Mapping], lead: Sequence[str]) -> list:
    """Deterministic column order: the lead columns, then the sorted rest."""
    seen = set(lead)
    rest = sorted({k for row in rows for k in row.keys()} - seen)
    return list(lead) + rest


SCHEMAS = {
    "schema_version": SCHEMA_VERSION,
    "eval": {
        "format": "csv or json",
        "csv_columns": ["x", "f", "bbar", "weighted_error"],
        "notes": "weighted_error = weight(x) * |f(x) - operator(x)|; the weighted "
                 "product is 0 by convention at the singular point",
    },
    "modulus": {
        "csv_columns": ["t", "omega2", "omega2_mainpart"],
        "notes": "both moduli use a shared geometric step ladder below t",
    },
    "check": {
        "csv_columns": ["check", "function", "row_kind", "..."],
        "row_kinds": ["data", "summary"],
        "json": "list of reports: {name, header, params, rows, slope, residual, "
                "spread, passed, trivial, notes}",
    },
    "sweep": {
        "json": "{schema_version, timestamp, config, results: [{function, direct, "
                "inverse, consistency_delta, passed}], passed}",
        "determinism": "byte-identical across runs except the timestamp field",
    },
    "floats": "printed with 17 significant digits (round-trip safe)",
}
