import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from conftest import gauss, modes
from starfield.functions import PolyFn, TrigFn, trig_average, trig_derive
from starfield.scalars import GaussRational, Q

polys = st.dictionaries(st.tuples(st.integers(0, 3), st.integers(0, 3)), gauss, max_size=4).map(lambda d: PolyFn(2, d))
trigs = st.dictionaries(modes(2), gauss, max_size=4).map(lambda d: TrigFn(2, d))

X = sp.symbols("x1 x2")


def to_sympy(f: PolyFn):
    return sp.expand(sum(
        (sp.Rational(int(c.re.numerator), int(c.re.denominator)) + sp.I * sp.Rational(int(c.im.numerator), int(c.im.denominator)))
        * X[0] ** a * X[1] ** b
        for (a, b), c in f.terms.items()
    ))


@given(polys, polys)
def test_poly_product_matches_sympy(f, g):
    assert sp.expand(to_sympy(f * g) - to_sympy(f) * to_sympy(g)) == 0


@given(polys, st.integers(0, 1))
def test_poly_derivative_matches_sympy(f, j):
    assert sp.expand(to_sympy(f.derive(j)) - sp.diff(to_sympy(f), X[j])) == 0


@given(trigs, trigs, st.integers(0, 1))
def test_trig_leibniz(f, g, j):
    assert (f * g).derive(j) == f.derive(j) * g + f * g.derive(j)


def test_trig_derive_counts_axes_from_one():
    f = TrigFn.mode((2, -1), 3)
    assert trig_derive(f, 1) == TrigFn.mode((2, -1), GaussRational(0, 6))
    assert trig_derive(f, 2) == TrigFn.mode((2, -1), GaussRational(0, -3))
    with pytest.raises(ValueError):
        trig_derive(f, 0)


def test_average_is_constant_mode():
    f = TrigFn(2, {(0, 0): Q(1, 3), (1, 0): 5})
    assert trig_average(f) == GaussRational(Q(1, 3))
    assert trig_average(f * f.conj()) == GaussRational(Q(1, 9) + 25)


def test_mode_product_adds_modes():
    assert TrigFn.mode((1, 2)) * TrigFn.mode((-1, 1)) == TrigFn.mode((0, 3))


def test_cancellation_drops_terms():
    f = PolyFn.variable(2, 0)
    assert not (f - f).terms


def test_wrong_key_length():
    with pytest.raises(ValueError):
        TrigFn(2, {(1,): 1})


@given(trigs)
def test_json_round_trip(f):
    assert TrigFn.from_json(2, f.to_json()) == f


def test_malformed_record():
    with pytest.raises(ValueError):
        PolyFn.from_json(2, [{"exp": [1, 0]}])
