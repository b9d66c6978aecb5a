import json
import subprocess
import sys

import pytest

from starfield import fixtures
from starfield.cli import main, run_command
from starfield.fedosov import AbelianConnection, base_star, build_abelian_connection
from starfield.functions import PolyFn, TrigFn
from starfield.gpdstar import QuantizedGroupoidAlgebra, gpd_star
from starfield.groupoid import GroupoidFunction
from starfield.scalars import GaussRational, HbarSeries
from starfield.serialize import dumps, series_from_json, series_to_json, table_from_csv


def _write(path, obj):
    path.write_text(dumps(obj))
    return str(path)


@pytest.fixture
def trig_inputs(tmp_path):
    one = HbarSeries([TrigFn.constant(2, GaussRational(1))], 3, TrigFn.zero(2))
    h = HbarSeries([TrigFn.mode((1, 0)) + TrigFn.mode((0, -1)) * GaussRational(0, 2)], 3, TrigFn.zero(2))
    return _write(tmp_path / "one.json", series_to_json(one)), _write(tmp_path / "h.json", series_to_json(h))


def test_unit_law_is_byte_identical(tmp_path, trig_inputs):
    one, h = trig_inputs
    out = tmp_path / "out.json"
    assert main(["star", "--f", one, "--g", h, "--connection", "flat-T2", "--out", str(out)]) == 0
    assert out.read_bytes() == (tmp_path / "h.json").read_bytes()


def test_star_matches_library(tmp_path):
    D = build_abelian_connection(fixtures.get("flat-R2"), 6)
    x, y = PolyFn.variable(2, 0), PolyFn.variable(2, 1)
    z = PolyFn.zero(2)
    f = _write(tmp_path / "x.json", series_to_json(HbarSeries([x], 3, z)))
    g = _write(tmp_path / "y.json", series_to_json(HbarSeries([y], 3, z)))
    status, text, _ = run_command(["star", "--f", f, "--g", g, "--connection", "flat-R2"])
    assert status == 0
    assert series_from_json(json.loads(text)) == base_star(x, y, D).truncate(3)


def test_star_csv(tmp_path):
    z = PolyFn.zero(2)
    f = _write(tmp_path / "x.json", series_to_json(HbarSeries([PolyFn.variable(2, 0)], 3, z)))
    g = _write(tmp_path / "y.json", series_to_json(HbarSeries([PolyFn.variable(2, 1)], 3, z)))
    status, text, _ = run_command(["star", "--f", f, "--g", g, "--connection", "flat-R2", "--format", "csv"])
    assert status == 0
    assert table_from_csv(text) == [
        {"order": 0, "key": "1,1", "re": "1/1", "im": "0/1"},
        {"order": 1, "key": "0,0", "re": "0/1", "im": "1/2"},
    ]


def test_malformed_json_writes_nothing(tmp_path, trig_inputs, capsys):
    one, _ = trig_inputs
    bad = tmp_path / "bad.json"
    bad.write_text("{\"kind\": \"trig\",")
    out = tmp_path / "out.json"
    assert main(["star", "--f", one, "--g", str(bad), "--connection", "flat-T2", "--out", str(out)]) == 2
    assert not out.exists()
    assert "error" in capsys.readouterr().err


def test_kind_mismatch_is_schema_error(tmp_path, trig_inputs):
    one, _ = trig_inputs
    status, _, _ = run_command(["star", "--f", one, "--g", one, "--connection", "flat-R2"])
    assert status == 2


def test_fedosov_emit_round_trip(tmp_path):
    out = tmp_path / "conn.json"
    assert main(["fedosov", "--symplectic", "curved-R2", "--order", "4", "--emit", str(out)]) == 0
    D = AbelianConnection.from_json(json.loads(out.read_text()))
    assert D.to_json() == build_abelian_connection(fixtures.get("curved-R2"), 4).to_json()
    # a saved connection feeds the star command
    z = PolyFn.zero(2)
    f = _write(tmp_path / "x.json", series_to_json(HbarSeries([PolyFn.variable(2, 0)], 2, z)))
    status, _, _ = run_command(["star", "--f", f, "--g", f, "--connection", str(out)])
    assert status == 0
    assert run_command(["star", "--f", f, "--g", f, "--connection", str(out), "--order", "6"])[0] == 2


def test_fedosov_csv_rejected():
    assert run_command(["fedosov", "--symplectic", "flat-R2", "--format", "csv"])[0] == 2


def test_gpd_star(tmp_path):
    m = fixtures.get("z2-flip")
    f = GroupoidFunction.basis(m, ("f", (1, 0)), order=3)
    g = GroupoidFunction.basis(m, ("f", (0, 1)), order=3)
    fp = _write(tmp_path / "f.json", f.to_json())
    gp = _write(tmp_path / "g.json", g.to_json())
    status, text, _ = run_command(["gpd-star", "--model", "z2-flip", "--f", fp, "--g", gp, "--order", "6"])
    assert status == 0
    rec = json.loads(text)
    assert rec["order"] == 3
    A = QuantizedGroupoidAlgebra(m, 6)
    assert GroupoidFunction.from_json(rec, m) == gpd_star(f, g, A)


def test_verify_assoc_seed(capsys):
    assert main(["verify", "assoc", "--model", "trivial-T2", "--order", "6", "--seed", "7", "--samples", "20"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["status"] == "pass" and rep["config"]["seed"] == 7


def test_verify_poisson_report(capsys):
    assert main(["verify", "poisson", "--model", "trivial-T2", "--window", "1", "--samples", "5"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["cocycle"] == "pass" and rep["coboundarySign"] == 1 and rep["witnesses"] == []


def test_verify_poisson_bad_pi(tmp_path, capsys):
    pi = _write(tmp_path / "pi.json", {"pi": [["0", "1"], ["1", "0"]]})
    assert main(["verify", "poisson", "--model", "trivial-T2", "--pi", pi]) == 2


def test_verify_trace_csv(capsys):
    assert main(["verify", "trace", "--model", "z2-group", "--format", "csv"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "suite,name,status"
    assert all(line.endswith(",pass") for line in lines[1:])


def test_rieffel_strict_and_formal(tmp_path):
    f = _write(tmp_path / "u.json", [{"mode": [1, 0], "coeff": {"re": "1", "im": "0"}}])
    g = _write(tmp_path / "v.json", [{"mode": [0, 1], "coeff": {"re": "1", "im": "0"}}])
    status, text, _ = run_command(["rieffel", "--n", "2", "--J", "rieffel-T2", "--hbar", "1/3", "--f", f, "--g", g])
    assert status == 0
    rows = json.loads(text)
    assert [r["mode"] for r in rows] == [[1, 1]]
    status, text, _ = run_command(["rieffel", "--n", "2", "--J", "rieffel-T2", "--hbar", "formal", "--order", "3",
                                   "--f", f, "--g", g, "--format", "csv"])
    assert status == 0
    assert [r["order"] for r in table_from_csv(text)] == [0, 1, 2, 3]


def test_rieffel_dimension_mismatch(tmp_path):
    f = _write(tmp_path / "u.json", [])
    assert run_command(["rieffel", "--n", "3", "--J", "rieffel-T2", "--f", f, "--g", f])[0] == 2


def test_report_small_suite(capsys):
    assert main(["report", "--suite", "crossed-dirac", "--seed", "3"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["status"] == "pass"
    assert [r["suite"] for r in rep["suites"]] == ["crossed-dirac"]


def test_bad_arguments_exit_two():
    with pytest.raises(SystemExit) as exc:
        main(["report", "--order", "1"])
    assert exc.value.code == 2


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "starfield", "verify", "trace", "--model", "pair3"],
                         capture_output=True, text=True)
    assert res.returncode == 0
    assert json.loads(res.stdout)["status"] == "pass"
