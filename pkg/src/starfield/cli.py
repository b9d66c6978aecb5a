"""Command-line driver.

    starfield fedosov --symplectic curved-R2 --order 6 --emit r.json
    starfield star --f f.json --g g.json --connection r.json
    starfield gpd-star --model z2-flip --f f.json --g g.json --order 6 --out h.json
    starfield verify poisson|trace|assoc --model m.json [--pi pi.json]
    starfield rieffel --n 2 --J J.json --hbar 1/3 --f f.json --g g.json
    starfield report --seed 0

Wherever a file is expected, the name of an embedded fixture may be given
instead.  Exit status is 0 when everything passes, 1 when a check fails (the
report carries a witness) and 2 on unreadable or malformed input; in the last
case nothing is written.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import fixtures, verify
from .fedosov import AbelianConnection, base_star, build_abelian_connection
from .gpdstar import QuantizedGroupoidAlgebra, gpd_star
from .groupoid import FiniteGroupoid, GroupoidError, GroupoidFunction, model_from_json
from .poisson import PoissonTensor
from .rieffel import RieffelAlgebra, RieffelElement, rieffel_star
from .scalars import parse_rational
from .serialize import (
    SchemaError,
    coefficient_table,
    dumps,
    load_json,
    series_from_json,
    series_to_json,
    space_of,
    table_to_csv,
)
from .weyl import SymplecticData

__all__ = ["main", "build_parser", "run_command"]

EXIT_OK, EXIT_FAIL, EXIT_SCHEMA = 0, 1, 2


class _Output:
    """A fully rendered result: text plus exit status."""

    def __init__(self, text: str, status: int = EXIT_OK):
        self.text = text
        self.status = status


# input resolution ------------------------------------------------------------

def _fixture_or_file(arg: str, kind: str):
    """(fixture object, None) for a fixture name, (None, parsed json) otherwise."""
    if arg in fixtures.FIXTURES and not Path(arg).exists():
        if fixtures.kind_of(arg) != kind:
            raise SchemaError(f"fixture {arg!r} is a {fixtures.kind_of(arg)} fixture, expected {kind}")
        return fixtures.get(arg), None
    return None, load_json(arg)


def _symplectic(arg: str) -> SymplecticData:
    obj, data = _fixture_or_file(arg, "symplectic")
    if obj is not None:
        return obj
    try:
        return SymplecticData.from_json(data)
    except (ValueError, TypeError) as exc:
        raise SchemaError(f"{arg}: {exc}") from exc


def _connection(arg: str, order: int | None) -> AbelianConnection:
    if arg in fixtures.FIXTURES and not Path(arg).exists():
        return build_abelian_connection(_symplectic(arg), order or 6)
    data = load_json(arg)
    try:
        D = AbelianConnection.from_json(data)
    except (ValueError, TypeError) as exc:
        raise SchemaError(f"{arg}: {exc}") from exc
    if order is not None and order != D.order:
        raise SchemaError(f"connection has order {D.order}, --order asks for {order}")
    return D


def _model(arg: str):
    obj, data = _fixture_or_file(arg, "model")
    if obj is not None:
        return obj
    try:
        return model_from_json(data)
    except (ValueError, TypeError, KeyError) as exc:
        raise SchemaError(f"{arg}: {exc}") from exc


def _label(arg: str) -> str:
    return arg if arg in fixtures.FIXTURES else Path(arg).stem


def _series(arg: str, N: int):
    """(series, space); without an ``order`` field the series is rounded up to N // 2."""
    data = load_json(arg)
    if not isinstance(data, dict):
        raise SchemaError(f"{arg}: a function record must be a JSON object")
    explicit = "order" in data
    f = series_from_json(data, None if explicit else N // 2)
    return f, space_of(data), explicit


def _matrix(arg: str, field: str) -> list:
    data = load_json(arg)
    rows = data.get(field, data.get("matrix")) if isinstance(data, dict) else data
    try:
        return [[parse_rational(x) if isinstance(x, str) else parse_rational(str(x)) for x in row] for row in rows]
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"{arg}: malformed matrix ({exc})") from exc


def _render(result, fmt: str) -> str:
    if fmt == "csv":
        return table_to_csv(coefficient_table(result))
    return dumps(_result_json(result))


def _result_json(result):
    from .scalars import HbarSeries

    if isinstance(result, HbarSeries):
        return series_to_json(result)
    return result.to_json()


def _report_text(report: dict, fmt: str) -> str:
    if fmt == "json":
        return dumps(report)
    import csv
    import io

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["suite", "name", "status"])
    suites = report["suites"] if "suites" in report else [report]
    for s in suites:
        for c in s["checks"]:
            w.writerow([s["suite"], c["name"], c["status"]])
    return buf.getvalue()


def _status(report: dict) -> int:
    return EXIT_OK if report["status"] == "pass" else EXIT_FAIL


# commands --------------------------------------------------------------------

def cmd_fedosov(a) -> _Output:
    s = _symplectic(a.symplectic)
    D = build_abelian_connection(s, a.order)
    if a.format == "csv":
        raise SchemaError("fedosov writes a JSON connection record; --format csv applies to products and reports")
    return _Output(dumps(D.to_json()))


def cmd_star(a) -> _Output:
    D = _connection(a.connection, a.order)
    N = D.order
    f, fs, fe = _series(a.f, N)
    g, gs, ge = _series(a.g, N)
    if type(fs) is not type(D.space) or fs.leaf_dim != D.space.leaf_dim or type(gs) is not type(fs) \
            or gs.leaf_dim != fs.leaf_dim:
        raise SchemaError("function kind or dimension does not match the connection")
    K = min([N // 2] + [x.order for x, e in ((f, fe), (g, ge)) if e])
    h = base_star(f, g, D).truncate(K)
    return _Output(_render(h, a.format))


def _algebra(model, connection_arg: str | None, order: int) -> QuantizedGroupoidAlgebra:
    if connection_arg is None:
        return QuantizedGroupoidAlgebra(model, order)
    D = _connection(connection_arg, None)
    if isinstance(model, FiniteGroupoid):
        raise SchemaError("finite groupoids have zero-dimensional leaves and take no connection")
    if order != D.order:
        raise SchemaError(f"connection has order {D.order}, --order asks for {order}")
    return QuantizedGroupoidAlgebra(model, order, D.symplectic)


def _gfun(arg: str, model, K: int) -> GroupoidFunction:
    data = load_json(arg)
    try:
        explicit = isinstance(data, dict) and "order" in data
        return GroupoidFunction.from_json(data, model, None if explicit else K)
    except (ValueError, TypeError) as exc:
        raise SchemaError(f"{arg}: {exc}") from exc


def cmd_gpd_star(a) -> _Output:
    model = _model(a.model)
    A = _algebra(model, a.connection, a.order)
    K = A.hbar_order
    f, g = _gfun(a.f, model, K), _gfun(a.g, model, K)
    h = gpd_star(f, g, A)
    return _Output(_render(h, a.format))


def _cfg(a, **extra) -> verify.RunConfig:
    return verify.RunConfig(
        seed=a.seed,
        order=getattr(a, "order", 6),
        window=getattr(a, "window", 2),
        samples=getattr(a, "samples", None),
        timing=getattr(a, "timing", False),
        **extra,
    )


def cmd_verify(a) -> _Output:
    model = _model(a.model)
    label = _label(a.model)
    cfg = _cfg(a)
    if a.check == "poisson":
        if isinstance(model, FiniteGroupoid):
            raise SchemaError("the Poisson check needs leaves of positive dimension")
        if a.pi is not None:
            P = PoissonTensor(_matrix(a.pi, "pi"), model)
        else:
            P = QuantizedGroupoidAlgebra(model, 2).poisson
        name = f"poisson.{label}"
        rng = verify.seeded_stream(cfg, name)
        items = [(name, lambda: verify.poisson_check(model, P, cfg, rng, default=200))]
        rep = verify.run_custom("poisson", items, cfg, ("groupoid", "poisson", "gerstenhaber", "p2"))
        rec = rep["checks"][0]
        rep["cocycle"] = "pass" if rec["status"] == "pass" or "d Pi" not in rec["details"].get("reason", "") else "fail"
        rep["coboundarySign"] = rec["details"].get("coboundarySign")
        rep["witnesses"] = [rec["witness"]] if "witness" in rec else []
    elif a.check == "trace":
        rep = verify.run_custom("trace", verify.trace_checks(model, cfg, label), cfg, ("trace", "groupoid", "torus"))
    else:
        rep = verify.run_custom("assoc", verify.assoc_checks(model, cfg, label), cfg, ("groupoid", "kernel", "degree"))
    return _Output(_report_text(rep, a.format), _status(rep))


def _rieffel_algebra(a) -> RieffelAlgebra:
    J = _matrix(a.J, "J") if a.J not in fixtures.FIXTURES else fixtures.get(a.J).J
    if len(J) != a.n:
        raise SchemaError(f"J is {len(J)}x{len(J)}, --n is {a.n}")
    hbar = None if a.hbar == "formal" else parse_rational(a.hbar)
    return RieffelAlgebra(a.n, J, hbar, a.order)


def _relement(arg: str, A: RieffelAlgebra) -> RieffelElement:
    data = load_json(arg)
    try:
        return RieffelElement.from_json(A, data)
    except (ValueError, TypeError) as exc:
        raise SchemaError(f"{arg}: {exc}") from exc


def cmd_rieffel(a) -> _Output:
    A = _rieffel_algebra(a)
    h = rieffel_star(_relement(a.f, A), _relement(a.g, A))
    return _Output(_render(h, a.format))


def cmd_report(a) -> _Output:
    cfg = _cfg(a, threads=a.threads)
    rep = verify.run_report(cfg, a.suite or None)
    return _Output(_report_text(rep, a.format), _status(rep))


# parser ----------------------------------------------------------------------

def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _order(text: str) -> int:
    v = int(text)
    if v < 2:
        raise argparse.ArgumentTypeError("truncation order must be at least 2")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--out", help="output path (default: standard output)")

    p = argparse.ArgumentParser(prog="starfield", description="Exact deformation quantization toolkit.")
    sub = p.add_subparsers(dest="command", required=True)

    f = sub.add_parser("fedosov", parents=[common], help="build the abelian connection r")
    f.add_argument("--symplectic", required=True, help="symplectic JSON or fixture name")
    f.add_argument("--order", type=_order, default=6)
    f.add_argument("--emit", dest="out_emit", help="same as --out")
    f.set_defaults(run=cmd_fedosov)

    s = sub.add_parser("star", parents=[common], help="base star product f * g")
    s.add_argument("--f", required=True)
    s.add_argument("--g", required=True)
    s.add_argument("--connection", required=True, help="connection JSON, or a symplectic fixture name")
    s.add_argument("--order", type=_order, default=None)
    s.set_defaults(run=cmd_star)

    g = sub.add_parser("gpd-star", parents=[common], help="deformed groupoid product")
    g.add_argument("--model", required=True)
    g.add_argument("--connection")
    g.add_argument("--f", required=True)
    g.add_argument("--g", required=True)
    g.add_argument("--order", type=_order, default=6)
    g.set_defaults(run=cmd_gpd_star)

    v = sub.add_parser("verify", parents=[common], help="run one verification on a model")
    v.add_argument("check", choices=("poisson", "trace", "assoc"))
    v.add_argument("--model", required=True)
    v.add_argument("--pi")
    v.add_argument("--window", type=_positive, default=2)
    v.add_argument("--samples", type=_positive, default=None)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--order", type=_order, default=6)
    v.add_argument("--timing", action="store_true")
    v.set_defaults(run=cmd_verify)

    r = sub.add_parser("rieffel", parents=[common], help="Rieffel product on a torus")
    r.add_argument("--n", type=_positive, required=True)
    r.add_argument("--J", required=True, help="JSON matrix, {\"J\": matrix}, or a rieffel fixture name")
    r.add_argument("--hbar", default="formal", help="rational value, or 'formal'")
    r.add_argument("--order", type=int, default=3, help="truncation order in formal mode")
    r.add_argument("--f", required=True)
    r.add_argument("--g", required=True)
    r.set_defaults(run=cmd_rieffel)

    rp = sub.add_parser("report", parents=[common], help="run the verification suites")
    rp.add_argument("--suite", action="append", choices=verify.SUITES)
    rp.add_argument("--seed", type=int, default=0)
    rp.add_argument("--order", type=_order, default=6)
    rp.add_argument("--window", type=_positive, default=2)
    rp.add_argument("--samples", type=_positive, default=None)
    rp.add_argument("--threads", type=_positive, default=None, help="worker processes (default STARFIELD_THREADS or 1)")
    rp.add_argument("--timing", action="store_true", help="include wall-clock seconds (breaks byte identity)")
    rp.set_defaults(run=cmd_report)
    return p


def run_command(argv=None) -> tuple:
    """(exit status, rendered text, output path or None); nothing is written."""
    args = build_parser().parse_args(argv)
    out = getattr(args, "out_emit", None) or args.out
    try:
        res = args.run(args)
    except (SchemaError, GroupoidError, ValueError, KeyError, TypeError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        return EXIT_SCHEMA, f"starfield: error: {msg}\n", None
    return res.status, res.text, out


def main(argv=None) -> int:
    status, text, out = run_command(argv)
    if status == EXIT_SCHEMA:
        sys.stderr.write(text)
        return status
    if out:
        try:
            Path(out).write_text(text)
        except OSError as exc:
            sys.stderr.write(f"starfield: error: cannot write {out}: {exc.strerror}\n")
            return EXIT_SCHEMA
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
