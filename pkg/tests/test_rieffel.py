import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import modes
from starfield import fixtures, sampling
from starfield.rieffel import (
    CrossedDiracAlgebra,
    RieffelAlgebra,
    RieffelElement,
    crossed_dirac_star,
    l1_surrogate,
    pointwise_product,
    rieffel_involution,
    rieffel_star,
    semiclassical_slope,
)
from starfield.scalars import ONE, GaussRational, HbarSeries, PhaseScalar, Q

seeds = st.integers(0, 2**32 - 1)
T2 = fixtures.get("rieffel-T2")
T2F = fixtures.get("rieffel-T2-formal")


def test_example_product():
    got = rieffel_star(T2.mode((1, 0)), T2.mode((0, 1)))
    assert got == T2.mode((1, 1), PhaseScalar.phase(Q(-1, 6)))


def test_zero_mode_is_unit():
    f = sampling.rieffel_element(random.Random(1), T2)
    assert rieffel_star(T2.mode((0, 0)), f) == f == rieffel_star(f, T2.mode((0, 0)))


@given(modes(2, 3), modes(2, 3))
def test_commutator_phases_are_opposite(p, q):
    assert T2.phase_exponent(p, q) == -T2.phase_exponent(q, p)
    pq = rieffel_star(T2.mode(p), T2.mode(q))
    qp = rieffel_star(T2.mode(q), T2.mode(p))
    assert pq == qp.scale(PhaseScalar.phase(-T2.hbar * T2.form(p, q)))


def _characterized(p, q, A):
    """The antisymmetric-exponent bicharacter with slope -<p,Jq>/2 at hbar = A.hbar."""
    return -A.hbar * A.form(p, q) / 2


@given(modes(2, 3), modes(2, 3), modes(2, 3))
def test_bicharacter_characterization(p, q, r):
    # unit, 2-cocycle (equivalent to associativity on modes), antisymmetry, slope
    add = lambda a, b: tuple(x + y for x, y in zip(a, b))  # noqa: E731
    c = T2.phase_exponent
    assert c((0, 0), p) == 0
    assert c(p, q) + c(add(p, q), r) == c(p, add(q, r)) + c(q, r)
    assert c(p, q) == _characterized(p, q, T2)


@pytest.mark.parametrize("A", [T2, T2F, fixtures.get("rieffel-T3")], ids=["strict", "formal", "T3"])
@given(seed=seeds)
def test_associative_and_involutive(A, seed):
    rng = random.Random(seed)
    f, g, h = (sampling.rieffel_element(rng, A) for _ in range(3))
    assert rieffel_star(rieffel_star(f, g), h) == rieffel_star(f, rieffel_star(g, h))
    inv = rieffel_involution
    assert inv(rieffel_star(f, g)) == rieffel_star(inv(g), inv(f))
    assert inv(inv(f)) == f


def test_involution_on_modes():
    f = T2.mode((2, -1), PhaseScalar.phase(Q(1, 4), GaussRational(1, 2)))
    assert rieffel_involution(f) == T2.mode((-2, 1), PhaseScalar.phase(Q(-1, 4), GaussRational(1, -2)))


def test_slope_examples():
    assert semiclassical_slope((1, 0), (0, 1), T2F) == Q(-1, 2)
    assert semiclassical_slope((0, 0), (3, -2), T2F) == 0
    J0 = RieffelAlgebra(2, [[0, 0], [0, 0]], None, 3)
    assert semiclassical_slope((1, 2), (2, 1), J0) == 0
    with pytest.raises(ValueError):
        semiclassical_slope((1, 0), (0, 1), T2)


def test_formal_expansion_of_the_example():
    got = rieffel_star(T2F.mode((1, 0)), T2F.mode((0, 1)))
    # exp(-i hbar / 2) through hbar^3
    want = HbarSeries([ONE, GaussRational(0, Q(-1, 2)), GaussRational(Q(-1, 8)), GaussRational(0, Q(1, 48))], 3)
    assert got == T2F.mode((1, 1), want)


def test_hbar_zero_is_pointwise():
    A0 = RieffelAlgebra(2, T2.J, Q(0))
    rng = random.Random(4)
    f, g = (sampling.rieffel_element(rng, A0) for _ in range(2))
    assert rieffel_star(f, g) == pointwise_product(f, g) == rieffel_star(g, f)


def test_validation():
    with pytest.raises(ValueError):
        RieffelAlgebra(2, [[0, 1], [1, 0]], Q(1))
    with pytest.raises(TypeError):
        RieffelAlgebra(2, T2.J, 0.5)
    with pytest.raises(ValueError):
        RieffelElement(T2, {(1, 2, 3): 1})


def test_l1_surrogate():
    f = T2.mode((1, 0), PhaseScalar({Q(1, 3): GaussRational(1, -1)})) + T2.mode((0, 1), 2)
    assert l1_surrogate(f) == 4


def test_json_round_trip():
    for A in (T2, T2F):
        f = sampling.rieffel_element(random.Random(7), A, 4)
        assert RieffelElement.from_json(A, f.to_json()) == f


C = fixtures.get("crossed-dirac-k1")


def test_crossed_generator_relation():
    u = C.basis((1,), (0, 0))
    for l, th in enumerate((Q(1, 2), Q(1, 5))):
        v = C.basis((0,), tuple(int(i == l) for i in range(2)))
        # v * u picks up e^{i theta}; so u * v = e^{-i theta} v * u
        assert crossed_dirac_star(v, u) == crossed_dirac_star(u, v).scale(PhaseScalar.phase(th))


@given(seed=seeds)
def test_crossed_associative(seed):
    rng = random.Random(seed)
    f, g, h = (sampling.crossed_element(rng, C) for _ in range(3))
    assert crossed_dirac_star(crossed_dirac_star(f, g), h) == crossed_dirac_star(f, crossed_dirac_star(g, h))


def test_crossed_grading():
    f = C.basis((2,), (1, 0))
    g = C.basis((-2,), (0, 3))
    assert crossed_dirac_star(f, g).support() == [(0,)]


def test_crossed_trivial_component_is_rieffel():
    f, g = T2.mode((1, 0)), T2.mode((0, 1))
    F, G = C.basis((0,), (1, 0)), C.basis((0,), (0, 1))
    h = rieffel_star(f, g)
    assert crossed_dirac_star(F, G) == C.element({((0,), p): c for p, c in h.terms.items()})


def test_crossed_needs_commuting_action():
    with pytest.raises(ValueError):
        CrossedDiracAlgebra(T2, 1, [[Q(1, 2)], [0]], linear=[[[0, 1], [1, 0]]])
    with pytest.raises(ValueError):
        CrossedDiracAlgebra(T2F, 1, [[1], [1]])
