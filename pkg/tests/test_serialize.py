import json
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from starfield import fixtures, sampling
from starfield.fedosov import base_star, build_abelian_connection
from starfield.functions import PolyFn, TrigFn
from starfield.groupoid import GroupoidFunction
from starfield.scalars import HbarSeries
from starfield.serialize import (
    TABLE_COLUMNS,
    SchemaError,
    coefficient_table,
    dumps,
    from_table,
    load_json,
    series_from_json,
    series_to_json,
    table_from_csv,
    table_from_json,
    table_to_csv,
    table_to_json,
)

seeds = st.integers(0, 2**32 - 1)


def test_moyal_coordinates_table():
    D = build_abelian_connection(fixtures.get("flat-R2"), 6)
    h = base_star(PolyFn.variable(2, 0), PolyFn.variable(2, 1), D)
    rows = coefficient_table(h)
    assert {r["order"] for r in rows} == {0, 1}
    assert rows == [
        {"order": 0, "key": "1,1", "re": "1/1", "im": "0/1"},
        {"order": 1, "key": "0,0", "re": "0/1", "im": "1/2"},
    ]


def test_empty_table_has_header():
    assert table_to_csv(coefficient_table(TrigFn.zero(2))) == ",".join(TABLE_COLUMNS) + "\n"


@pytest.mark.parametrize("kind", ["series", "transformation", "torus-pair", "finite", "strict", "formal", "crossed"])
@given(seed=seeds)
def test_table_round_trip(kind, seed):
    rng = random.Random(seed)
    if kind == "series":
        x = sampling.base_series(rng, fixtures.get("flat-T2").space(), 3, 3)
    elif kind in ("transformation", "torus-pair", "finite"):
        name = {"transformation": "z4-rotation", "torus-pair": "torus-pair-T2", "finite": "pair3"}[kind]
        x = sampling.groupoid_function(rng, fixtures.get(name), 4, 2, 2, True)
    elif kind == "strict":
        x = sampling.rieffel_element(rng, fixtures.get("rieffel-T2"))
    elif kind == "formal":
        x = sampling.rieffel_element(rng, fixtures.get("rieffel-T2-formal"))
    else:
        x = sampling.crossed_element(rng, fixtures.get("crossed-dirac-k1"))
    rows = coefficient_table(x)
    assert table_from_csv(table_to_csv(rows)) == rows
    assert table_from_json(json.loads(dumps(table_to_json(rows)))) == rows
    assert from_table(rows, x) == x


@given(seed=seeds)
def test_series_json_round_trip(seed):
    s = sampling.base_series(random.Random(seed), fixtures.get("curved-R2").space(), 3, 3)
    back = series_from_json(json.loads(dumps(series_to_json(s))))
    assert back == s


def test_series_json_without_order():
    obj = {"kind": "trig", "dim": 2, "terms": [{"mode": [1, 0], "coeff": {"re": "1", "im": "0"}}]}
    s = series_from_json(obj)
    assert s.order == 0 and s[0] == TrigFn.mode((1, 0))
    assert series_from_json(obj, 3).order == 3


@pytest.mark.parametrize("obj", [
    [],
    {"kind": "trig", "dim": 2},
    {"kind": "trig", "dim": 2, "terms": [{"mode": [1], "coeff": {"re": "1", "im": "0"}}]},
    {"kind": "trig", "dim": 2, "terms": [{"mode": [1, 0], "coeff": {"re": "x", "im": "0"}}]},
    {"kind": "cubic", "dim": 2, "terms": []},
])
def test_series_schema_errors(obj):
    with pytest.raises(SchemaError):
        series_from_json(obj)


def test_load_json_errors(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{nope")
    with pytest.raises(SchemaError):
        load_json(p)
    with pytest.raises(SchemaError):
        load_json(tmp_path / "missing.json")


def test_csv_header_checked():
    with pytest.raises(SchemaError):
        table_from_csv("a,b\n1,2\n")


def test_table_row_above_order():
    like = HbarSeries([TrigFn.zero(2)], 1, TrigFn.zero(2))
    with pytest.raises(SchemaError):
        from_table([{"order": 2, "key": "0,0", "re": "1/1", "im": "0/1"}], like)


def test_groupoid_table_keys():
    m = fixtures.get("z2-flip")
    f = GroupoidFunction.basis(m, ("f", (1, -2)))
    assert coefficient_table(f)[0]["key"] == "f:1,-2"
