"""JSON and CSV reports.

Reals are written with 13 significant digits (12 after the leading one) and
rationals as ``"p/q"``, so repeated runs give byte-identical files apart from
``meta.runtime_ms``.
"""

from __future__ import annotations

import csv
import io
import json
import math
import numbers
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable, Mapping

from . import __version__
from .functional import BoundResult

REAL_FORMAT = ".13g"


def fmt_real(x: float) -> str:
    x = float(x)
    if math.isnan(x) or math.isinf(x):
        return str(x)
    return format(x, REAL_FORMAT)


def fmt_rational(q: Fraction | int) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def _clean(value: Any) -> Any:
    """Round reals for JSON output; rationals become strings."""
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if isinstance(value, numbers.Integral):
        return int(value)
    if isinstance(value, Fraction):
        return fmt_rational(value)
    if isinstance(value, numbers.Real):
        x = float(value)
        if math.isfinite(x):
            return float(fmt_real(x))
        return None
    if isinstance(value, Mapping):
        return {k: _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    return value


def bound_record(result: BoundResult) -> dict[str, Any]:
    record: dict[str, Any] = {
        "kappa": result.kappa,
        "nu": result.nu,
        "theta": result.theta,
        "r": result.r,
        "degree": result.degree,
        "coeffs": list(result.coefficients),
        "h": result.h,
        "c0": result.c0_value,
        "c1": result.c1_value,
    }
    if result.kappa_input is not None:
        record["kappa_input"] = result.kappa_input
    return record


def make_meta(runtime_ms: float, seed: int | None = None, samples: int | None = None) -> dict:
    meta: dict[str, Any] = {}
    if seed is not None:
        meta["seed"] = seed
    if samples is not None:
        meta["samples"] = samples
    meta["runtime_ms"] = int(round(runtime_ms))
    meta["version"] = __version__
    return meta


def _csv_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, numbers.Integral):
        return str(int(value))
    if isinstance(value, Fraction):
        return fmt_rational(value)
    if isinstance(value, str):
        return value
    if isinstance(value, (list, tuple)):
        return ";".join(_csv_cell(v) for v in value)
    return fmt_real(value)


def render(
    records: Iterable[Mapping[str, Any]] | Mapping[str, Any],
    fmt: str = "json",
    meta: Mapping[str, Any] | None = None,
) -> str:
    single = isinstance(records, Mapping)
    rows = [records] if single else list(records)
    if fmt == "json":
        if single:
            payload = dict(rows[0])
            if meta is not None:
                payload["meta"] = dict(meta)
        else:
            payload = {"records": rows}
            if meta is not None:
                payload["meta"] = dict(meta)
        return json.dumps(_clean(payload), indent=2) + "\n"
    if fmt == "csv":
        header: list[str] = []
        for row in rows:
            header.extend(k for k in row if k not in header)
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_csv_cell(row.get(k)) for k in header])
        return buf.getvalue()
    raise ValueError(f"unknown format {fmt!r}")


def emit_report(
    records: Iterable[Mapping[str, Any]] | Mapping[str, Any] | BoundResult,
    fmt: str = "json",
    path: str | Path | None = None,
    meta: Mapping[str, Any] | None = None,
) -> str:
    """Render records and write them to ``path`` (stdout when None)."""
    if isinstance(records, BoundResult):
        records = bound_record(records)
    text = render(records, fmt, meta)
    if path is None or str(path) == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")
    return text
