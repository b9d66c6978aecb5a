"""JSON records and per-order coefficient tables.

Every rational is written as a ``"p/q"`` string.  A coefficient table has
one row per nonzero coefficient, with columns ``order, key, re, im``; keys are
comma-separated modes or exponents, prefixed by ``component:`` on
transformation groupoids and suffixed by ``@exponent`` for strict phases.
Tables convert to and from CSV and JSON without loss.
"""
from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Mapping

from .functions import PolyFn, PolySpace, TrigFn, TrigSpace
from .groupoid import (
    GroupoidError,
    GroupoidFunction,
    TorusPairGroupoidModel,
    TransformationGroupoidModel,
)
from .rieffel import CrossedElement, RieffelAlgebra, RieffelElement
from .scalars import GaussRational, HbarSeries, PhaseScalar, format_rational, parse_rational

__all__ = [
    "SchemaError",
    "TABLE_COLUMNS",
    "load_json",
    "dumps",
    "series_to_json",
    "series_from_json",
    "coefficient_table",
    "table_to_csv",
    "table_from_csv",
    "table_to_json",
    "table_from_json",
    "from_table",
]

TABLE_COLUMNS = ("order", "key", "re", "im")


class SchemaError(ValueError):
    """Input that is not valid JSON or does not match the expected record shape."""


def load_json(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


# base function series

_KINDS = {"poly": (PolyFn, PolySpace), "trig": (TrigFn, TrigSpace)}


def _fn_kind(fn) -> str:
    return "poly" if isinstance(fn, PolyFn) else "trig"


def series_to_json(f: HbarSeries) -> dict:
    coeffs = list(f.coeffs)
    while coeffs and not coeffs[-1]:
        coeffs.pop()
    sample = f.zero if not coeffs else coeffs[0]
    return {
        "kind": _fn_kind(sample),
        "dim": sample.dim,
        "order": f.order,
        "series": [c.to_json() for c in coeffs],
    }


def series_from_json(obj, order: int | None = None) -> HbarSeries:
    """Read ``{kind, dim, order?, series: [[records], ...]}`` or ``{kind, dim, terms: [records]}``.

    Without an ``order`` field (and no override) the series is read at its
    own length, so its truncation is set by whatever it is combined with.
    """
    if not isinstance(obj, Mapping):
        raise SchemaError("a function record must be a JSON object")
    try:
        fn_type, _ = _KINDS[obj.get("kind", "trig")]
        dim = int(obj["dim"])
        if "series" in obj:
            rows = obj["series"]
        elif "terms" in obj:
            rows = [obj["terms"]]
        else:
            raise SchemaError("function record needs 'series' or 'terms'")
        fns = [fn_type.from_json(dim, r) for r in rows]
        for fn in fns:
            for key in fn.terms:
                if len(key) != dim:
                    raise SchemaError("exponent or mode has the wrong length")
        K = order if order is not None else int(obj.get("order", 0 if not fns else len(fns) - 1))
    except KeyError as exc:
        raise SchemaError(f"unknown or missing field {exc}") from exc
    except (TypeError, ValueError) as exc:
        if isinstance(exc, SchemaError):
            raise
        raise SchemaError(str(exc)) from exc
    if K < 0:
        raise SchemaError("order must be non-negative")
    return HbarSeries(fns, K, fn_type.zero(dim))


def space_of(obj):
    fn_type, space = _KINDS[obj.get("kind", "trig")]
    return space(int(obj["dim"]))


# coefficient tables

def _ints(key) -> str:
    return ",".join(str(int(x)) for x in key)


def _parse_ints(text: str) -> tuple:
    return tuple(int(x) for x in text.split(",")) if text else ()


def _row(order, key, c: GaussRational) -> dict:
    return {"order": order, "key": key, "re": format_rational(c.re), "im": format_rational(c.im)}


def coefficient_table(result) -> list:
    """One row per nonzero coefficient, ordered by hbar power then key."""
    rows: list = []
    if isinstance(result, (PolyFn, TrigFn)):
        result = HbarSeries([result], 0, type(result).zero(result.dim))
    if isinstance(result, HbarSeries):
        for k, fn in enumerate(result.coeffs):
            for key, c in fn.items():
                rows.append(_row(k, _ints(key), c))
        return rows
    if isinstance(result, GroupoidFunction):
        model = result.model
        for (k, key), c in result.sorted_terms():
            rows.append(_row(k, _groupoid_label(model, key), c))
        return rows
    if isinstance(result, RieffelElement):
        strict = result.algebra.strict
        for p in sorted(result.terms):
            c = result.terms[p]
            if strict:
                for r, v in sorted(c.terms.items()):
                    rows.append(_row(0, f"{_ints(p)}@{format_rational(r)}", v))
            else:
                for k, v in enumerate(c.coeffs):
                    if v:
                        rows.append(_row(k, _ints(p), v))
        rows.sort(key=lambda r: r["order"])
        return rows
    if isinstance(result, CrossedElement):
        for m, p in sorted(result.terms):
            for r, v in sorted(result.terms[(m, p)].terms.items()):
                rows.append(_row(0, f"{_ints(m)}|{_ints(p)}@{format_rational(r)}", v))
        return rows
    raise TypeError(f"no coefficient table for {type(result).__name__}")


def _groupoid_label(model, key) -> str:
    if isinstance(model, TransformationGroupoidModel):
        return f"{key[0]}:{_ints(key[1])}"
    if isinstance(model, TorusPairGroupoidModel):
        return _ints(key)
    return str(key)


def _groupoid_key(model, label: str):
    if isinstance(model, TransformationGroupoidModel):
        g, _, mode = label.partition(":")
        return model.check_key((g, _parse_ints(mode)))
    if isinstance(model, TorusPairGroupoidModel):
        return model.check_key(_parse_ints(label))
    return model.check_key(label)


def table_to_csv(rows: list) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=TABLE_COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow(r)
    return buf.getvalue()


def table_from_csv(text: str) -> list:
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != TABLE_COLUMNS:
        raise SchemaError(f"coefficient table columns must be {', '.join(TABLE_COLUMNS)}")
    rows = []
    for r in reader:
        try:
            rows.append({"order": int(r["order"]), "key": r["key"], "re": r["re"], "im": r["im"]})
        except (TypeError, ValueError) as exc:
            raise SchemaError(f"bad table row {r!r}") from exc
    return rows


def table_to_json(rows: list) -> dict:
    return {"columns": list(TABLE_COLUMNS), "rows": [dict(r) for r in rows]}


def table_from_json(obj) -> list:
    try:
        if list(obj["columns"]) != list(TABLE_COLUMNS):
            raise SchemaError("unexpected table columns")
        return [{c: (int(r[c]) if c == "order" else str(r[c])) for c in TABLE_COLUMNS} for r in obj["rows"]]
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"malformed coefficient table: {exc}") from exc


def from_table(rows: list, like):
    """Rebuild a value from its table; ``like`` supplies the shape.

    ``like`` is an example value (series, groupoid function, Rieffel or
    crossed element); for series only its kind, dimension and order are used.
    """
    try:
        coeffs = [(r["order"], r["key"], GaussRational(parse_rational(r["re"]), parse_rational(r["im"]))) for r in rows]
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"bad table row: {exc}") from exc
    if isinstance(like, HbarSeries):
        zero = like.zero
        fn_type = type(zero)
        K = like.order
        by_k: list = [dict() for _ in range(K + 1)]
        for k, key, c in coeffs:
            if k > K:
                raise SchemaError("table row above the truncation order")
            by_k[k][_parse_ints(key)] = c
        return HbarSeries([fn_type(zero.dim, t) for t in by_k], K, zero)
    if isinstance(like, GroupoidFunction):
        model = like.model
        terms = {}
        try:
            for k, key, c in coeffs:
                terms[(k, _groupoid_key(model, key))] = c
        except GroupoidError as exc:
            raise SchemaError(str(exc)) from exc
        return GroupoidFunction(model, terms, like.order)
    if isinstance(like, RieffelElement):
        A: RieffelAlgebra = like.algebra
        data: dict = {}
        for k, key, c in coeffs:
            if A.strict:
                mode, _, r = key.partition("@")
                p = _parse_ints(mode)
                data[p] = data.get(p, PhaseScalar()) + PhaseScalar.phase(parse_rational(r), c)
            else:
                p = _parse_ints(key)
                row = [GaussRational(0)] * (k + 1)
                row[k] = c
                data[p] = data[p] + HbarSeries(row, A.order) if p in data else HbarSeries(row, A.order)
        return RieffelElement(A, data)
    if isinstance(like, CrossedElement):
        data = {}
        for _, key, c in coeffs:
            head, _, r = key.partition("@")
            m, _, p = head.partition("|")
            kk = (_parse_ints(m), _parse_ints(p))
            data[kk] = data.get(kk, PhaseScalar()) + PhaseScalar.phase(parse_rational(r), c)
        return CrossedElement(like.algebra, data)
    raise TypeError(f"cannot rebuild {type(like).__name__} from a table")
