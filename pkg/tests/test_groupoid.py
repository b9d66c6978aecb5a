import random

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import gauss
from starfield import fixtures, sampling
from starfield.groupoid import (
    FiniteGroup,
    FiniteGroupoid,
    GroupoidError,
    GroupoidFunction,
    TorusPairGroupoidModel,
    TransformationGroupoidModel,
    convolve,
    leaf_differential,
    model_from_json,
    pullback_by_arrow_inverse,
    reframe,
    restrict_to_units,
    unit_function,
)
from starfield.scalars import ONE, GaussRational, Q

seeds = st.integers(0, 2**32 - 1)
mpmath.mp.dps = 40


def brute_convolve(model: FiniteGroupoid, f: dict, g: dict) -> dict:
    """(f <> g)(alpha) = sum over beta in G^{t(alpha)} of f(beta) g(beta^{-1} alpha) lambda(beta)."""
    out = {}
    for alpha in model.arrows:
        acc = GaussRational(0)
        for beta in model.t_fiber(model.t(alpha)):
            rest = model.compose(model.inverse(beta), alpha)
            acc = acc + f.get(beta, GaussRational(0)) * g.get(rest, GaussRational(0)) * GaussRational(model.haar[beta])
        if acc:
            out[alpha] = acc
    return out


def to_fn(model, d):
    return GroupoidFunction(model, {(0, a): c for a, c in d.items()})


@pytest.mark.parametrize("name", ["pair3", "z2-group"])
@given(data=st.data())
def test_finite_convolution_matches_definition(name, data):
    m = fixtures.get(name)
    arrows = sorted(m.arrows)
    f = data.draw(st.dictionaries(st.sampled_from(arrows), gauss, max_size=5))
    g = data.draw(st.dictionaries(st.sampled_from(arrows), gauss, max_size=5))
    assert convolve(to_fn(m, f), to_fn(m, g)) == to_fn(m, brute_convolve(m, f, g))


def test_z2_idempotent_pair():
    m = fixtures.get("z2-group")
    e, g = GroupoidFunction.basis(m, "e"), GroupoidFunction.basis(m, "g")
    assert not convolve(e + g, e - g)
    assert convolve(g, g) == e


def test_haar_axiom():
    assert not fixtures.get("pair3").haar_violations()
    assert not fixtures.get("z2-group").haar_violations()
    bad = fixtures.get("pair3-skewed").haar_violations()
    assert bad and {"arrow", "f"} <= set(bad[0])


def test_finite_validation():
    with pytest.raises(GroupoidError):
        FiniteGroupoid(["a"], [{"id": "u", "s": "a", "t": "b"}], [])
    with pytest.raises(GroupoidError):
        FiniteGroupoid(["a"], [{"id": "u", "s": "a", "t": "a"}], [], [{"arrow": "u", "weight": 0}])
    with pytest.raises(GroupoidError):
        # missing composition u.u
        FiniteGroupoid(["a"], [{"id": "u", "s": "a", "t": "a"}], [])


def test_finite_unit():
    m = fixtures.get("pair3")
    u = unit_function(m)
    f = to_fn(m, {"a<-b": GaussRational(2, 1), "c<-c": GaussRational(Q(1, 3))})
    assert convolve(u, f) == f and convolve(f, u) == f


def test_torus_pair_matrix_units():
    m = TorusPairGroupoidModel(1)

    def E(a, b):
        return GroupoidFunction.basis(m, (a, -b))

    assert convolve(E(1, 2), E(2, -1)) == E(1, -1)
    assert not convolve(E(1, 2), E(3, 0))


def test_torus_pair_diagonal_derivative():
    m = TorusPairGroupoidModel(1)
    f = GroupoidFunction.basis(m, (3, -5))
    assert leaf_differential(f, 0, "s") == f.scale(GaussRational(0, -2))
    assert leaf_differential(f, 0, "t") == leaf_differential(f, 0, "s")


def test_torus_pair_has_no_unit():
    with pytest.raises(GroupoidError):
        unit_function(fixtures.get("torus-pair-T2"))


def _act(model, g, x):
    A, t = model.A[g], model.T[g]
    return [sum(A[i][j] * x[j] for j in range(model.n)) + mpmath.pi * t[i] / 2 for i in range(model.n)]


def evaluate(f: GroupoidFunction, x, comp):
    """f at the arrow (x, comp), directly from the Fourier modes."""
    total = mpmath.mpc(0)
    for (k, (g, p)), c in f.terms.items():
        if g == comp and k == 0:
            z = mpmath.mpc(mpmath.mpf(int(c.re.numerator)) / int(c.re.denominator),
                            mpmath.mpf(int(c.im.numerator)) / int(c.im.denominator))
            total += z * mpmath.expj(sum(pi * xi for pi, xi in zip(p, x)))
    return total


@pytest.mark.parametrize("name", ["z2-flip", "z4-rotation"])
@given(seed=seeds)
def test_transformation_convolution_pointwise(name, seed):
    # (f <> g)(x, c) = sum_{ab = c} f(b.x, a) g(x, b), evaluated numerically
    m = fixtures.get(name)
    rng = random.Random(seed)
    f, g = (sampling.groupoid_function(rng, m, 3, 2) for _ in range(2))
    h = convolve(f, g)
    x = [mpmath.mpf(rng.random()) * 7 for _ in range(m.n)]
    G = m.group
    for c in G.elements:
        want = sum((evaluate(f, _act(m, b, x), G.mul(c, G.inv(b))) * evaluate(g, x, b) for b in G.elements), mpmath.mpc(0))
        assert abs(evaluate(h, x, c) - want) < mpmath.mpf(10) ** -25


@given(seed=seeds)
def test_pullback_by_inverse_pointwise(seed):
    # f~(x, g) = f(g.x, g^{-1})
    m = fixtures.get("z4-rotation")
    rng = random.Random(seed)
    f = sampling.groupoid_function(rng, m, 3, 2)
    ft = pullback_by_arrow_inverse(f)
    x = [mpmath.mpf(rng.random()) * 7 for _ in range(2)]
    for g in m.group.elements:
        assert abs(evaluate(ft, x, g) - evaluate(f, _act(m, g, x), m.group.inv(g))) < mpmath.mpf(10) ** -25


@pytest.mark.parametrize("name", ["trivial-T2", "z2-flip", "z4-rotation", "torus-pair-T2"])
@given(seed=seeds)
def test_leibniz(name, seed):
    m = fixtures.get(name)
    rng = random.Random(seed)
    f, g = (sampling.groupoid_function(rng, m, 3, 2) for _ in range(2))
    n = m.leaf_dim
    lhs = [leaf_differential(convolve(f, g), j, "s") for j in range(n)]
    first = reframe([convolve(leaf_differential(f, j, "t"), g) for j in range(n)], "s")
    assert lhs == [a + convolve(f, leaf_differential(g, j, "s")) for j, a in enumerate(first)]
    lhs_t = [leaf_differential(convolve(f, g), j, "t") for j in range(n)]
    second = reframe([convolve(f, leaf_differential(g, j, "s")) for j in range(n)], "t")
    assert lhs_t == [convolve(leaf_differential(f, j, "t"), g) + b for j, b in enumerate(second)]


@pytest.mark.parametrize("name", ["trivial-T2", "z2-flip", "z4-rotation", "torus-pair-T2", "pair3", "z2-group"])
@given(seed=seeds)
def test_convolution_associative(name, seed):
    m = fixtures.get(name)
    rng = random.Random(seed)
    f, g, h = (sampling.groupoid_function(rng, m, 3, 2) for _ in range(3))
    assert convolve(convolve(f, g), h) == convolve(f, convolve(g, h))


def test_transformation_action_must_compose():
    G = FiniteGroup.cyclic(2, ["e", "f"])
    with pytest.raises(GroupoidError):
        TransformationGroupoidModel(2, G, {"f": ([[0, 1], [1, 1]], (0, 0))})
    with pytest.raises(GroupoidError):
        TransformationGroupoidModel(1, G, {"f": ([[1]], (1,))})


def test_restrict_to_units():
    m = fixtures.get("z2-flip")
    f = GroupoidFunction.basis(m, ("e", (1, 0))) + GroupoidFunction.basis(m, ("f", (0, 1)))
    r = restrict_to_units(f)
    assert r[0].terms == {(1, 0): ONE}


@pytest.mark.parametrize("name", ["z4-rotation", "pair3", "torus-pair-T2"])
def test_model_and_function_json(name):
    m = fixtures.get(name)
    back = model_from_json(m.to_json())
    assert back.to_json() == m.to_json()
    f = sampling.groupoid_function(random.Random(1), m, 4, 2, order=2, hbar_terms=True)
    g = GroupoidFunction.from_json(f.to_json(), back)
    assert g.to_json() == f.to_json()


def test_functions_on_different_models_do_not_mix():
    a, b = fixtures.get("z2-flip"), fixtures.get("z2-flip")
    with pytest.raises(GroupoidError):
        convolve(GroupoidFunction.basis(a, ("e", (0, 0))), GroupoidFunction.basis(b, ("e", (0, 0))))
