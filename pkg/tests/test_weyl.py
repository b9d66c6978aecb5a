import random

import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from starfield import fixtures, sampling
from starfield.functions import PolySpace, TrigSpace
from starfield.scalars import GaussRational, Q
from starfield.weyl import (
    DivisibilityError,
    SymplecticData,
    WeylSection,
    circ,
    connection,
    curvature,
    delta,
    delta_inv,
    delta_star,
    divide_hbar,
    fedosov_degree,
    gamma_section,
    graded_bracket,
    i_over_hbar_bracket,
    standard_omega,
)

H = sp.Symbol("hbar")
seeds = st.integers(0, 2**32 - 1)


def _c(q):
    return sp.Rational(int(q.numerator), int(q.denominator))


def fiber_sympy(a: WeylSection, ys):
    """A section with no dx and constant base coefficients as a sympy polynomial in hbar, y."""
    out = 0
    for (k, alpha, tau, base), c in a.terms.items():
        assert not tau and not any(base)
        mono = H ** k
        for y, e in zip(ys, alpha):
            mono *= y ** e
        out += (_c(c.re) + sp.I * _c(c.im)) * mono
    return sp.expand(out)


def moyal_sympy(A, B, ys, W, K=8):
    """sum_k (1/k!) (-i hbar/2)^k W^{i1 j1}..W^{ik jk} d^k A d^k B, by repeated differentiation."""
    total, cur = 0, [(A, B, sp.Integer(1))]
    for k in range(K + 1):
        total += sum(w * a * b for a, b, w in cur) * (-sp.I * H / 2) ** k / sp.factorial(k)
        nxt = []
        for a, b, w in cur:
            for i, row in enumerate(W):
                for j, x in enumerate(row):
                    if x:
                        da, db = sp.diff(a, ys[i]), sp.diff(b, ys[j])
                        if da != 0 and db != 0:
                            nxt.append((da, db, w * _c(Q(x))))
        cur = nxt
    return sp.expand(total)


def fiber_section(rng, dim, space, terms=3, max_degree=5):
    s = sampling.weyl_section(rng, dim, space, max_degree, terms, max_form=0)
    return WeylSection(dim, space, {(k, a, t, space.unit_key()): c for (k, a, t, _), c in s.terms.items()})


@pytest.mark.parametrize("dim", [2, 4])
@given(seed=seeds)
def test_circ_matches_sympy_moyal(dim, seed):
    rng = random.Random(seed)
    s = SymplecticData(standard_omega(dim))
    sp_ = TrigSpace(dim)
    ys = sp.symbols(f"y1:{dim + 1}")
    a, b = fiber_section(rng, dim, sp_), fiber_section(rng, dim, sp_)
    want = moyal_sympy(fiber_sympy(a, ys), fiber_sympy(b, ys), ys, s.omega_inv)
    assert sp.expand(fiber_sympy(circ(a, b, s), ys) - want) == 0


def test_y_commutator_is_i_hbar_w():
    s = SymplecticData(standard_omega(2))
    sp_ = TrigSpace(2)
    y1, y2 = WeylSection.y(2, sp_, 0), WeylSection.y(2, sp_, 1)
    comm = graded_bracket(y1, y2, s)
    W12 = s.omega_inv[0][1]
    assert comm == WeylSection.monomial(2, sp_, k=1, coeff=GaussRational(0, -W12))


def test_dx_anticommute():
    s = SymplecticData(standard_omega(2))
    sp_ = TrigSpace(2)
    d1, d2 = WeylSection.dx(2, sp_, 0), WeylSection.dx(2, sp_, 1)
    assert circ(d1, d2, s) == -circ(d2, d1, s)
    assert not circ(d1, d1, s)


def test_fedosov_degree():
    assert fedosov_degree((2, (1, 0), (0,), (0, 0))) == 5


def test_delta_on_generators():
    sp_ = PolySpace(2)
    assert delta(WeylSection.y(2, sp_, 1)) == WeylSection.dx(2, sp_, 1)
    assert delta_inv(WeylSection.dx(2, sp_, 0)) == WeylSection.y(2, sp_, 0)
    assert not delta_inv(WeylSection.y(2, sp_, 0))


def test_delta_inv_normalization():
    # delta^{-1}(y1 dx2) = y1 y2 / 2
    sp_ = PolySpace(2)
    a = WeylSection.monomial(2, sp_, alpha=(1, 0), tau=(1,))
    assert delta_inv(a) == WeylSection.monomial(2, sp_, alpha=(1, 1), coeff=Q(1, 2))


@pytest.mark.parametrize("name", ["curved-R2", "curved-R4", "flat-T2"])
@given(seed=seeds)
def test_delta_laws(name, seed):
    s = fixtures.get(name)
    rng = random.Random(seed)
    a = sampling.weyl_section(rng, s.dim, s.space(), 6, 4)
    assert not delta(delta(a))
    assert not delta_star(delta_star(a))
    assert not delta_inv(delta_inv(a))
    assert delta(delta_inv(a)) + delta_inv(delta(a)) + a.bidegree_part(0, 0) == a


@pytest.mark.parametrize("name", ["curved-R2", "curved-R4"])
@given(seed=seeds)
def test_connection_laws(name, seed):
    s = fixtures.get(name)
    rng = random.Random(seed)
    G = gamma_section(s, s.space())
    a = sampling.weyl_section(rng, s.dim, s.space(), 5, 3)
    assert not (connection(delta(a), s, G) + delta(connection(a, s, G)))
    assert connection(connection(a, s, G), s, G) == i_over_hbar_bracket(curvature(s, s.space()), a, s)


@given(seed=seeds)
def test_circ_associative_curved_r4(seed):
    s = fixtures.get("curved-R4")
    rng = random.Random(seed)
    a, b, c = (sampling.weyl_section(rng, 4, s.space(), 5, 3) for _ in range(3))
    assert circ(circ(a, b, s), c, s) == circ(a, circ(b, c, s), s)


def test_truncation_drops_high_degree():
    sp_ = PolySpace(2)
    a = WeylSection.monomial(2, sp_, k=1, alpha=(2, 1), order=4)
    assert not a
    assert WeylSection.monomial(2, sp_, k=1, alpha=(2, 0), order=4)


def test_divide_hbar_requires_divisibility():
    sp_ = PolySpace(2)
    with pytest.raises(DivisibilityError):
        divide_hbar(WeylSection.y(2, sp_, 0))


def test_curvature_of_flat_connection_vanishes():
    assert not curvature(fixtures.get("flat-R4"))
    assert curvature(fixtures.get("curved-R2"))


def test_symplectic_validation():
    with pytest.raises(ValueError):
        SymplecticData([[0, 1], [1, 0]])
    with pytest.raises(ValueError):
        standard_omega(3)
    with pytest.raises(ValueError):
        SymplecticData(standard_omega(2), {(0, 0, 1): 1, (1, 0, 0): 2}, "poly")


def test_symplectic_json_round_trip():
    s = fixtures.get("curved-R4")
    t = SymplecticData.from_json(s.to_json())
    assert t.to_json() == s.to_json()


def test_section_json_round_trip():
    s = fixtures.get("curved-R2")
    a = sampling.weyl_section(random.Random(3), 2, s.space(), 6, 5)
    assert WeylSection.from_json(a.to_json(), 2, s.space()) == a
