"""Seeded random inputs for the verification suites.

All generators take a ``random.Random`` and draw small exact coefficients,
so every sample is reproducible from the seed and cheap to multiply.
"""
from __future__ import annotations

import random
from itertools import product

from .functions import BaseSpace, PolySpace, TrigSpace
from .groupoid import FiniteGroupoid, GroupoidFunction, TorusPairGroupoidModel, TransformationGroupoidModel
from .poisson import window_basis
from .rieffel import CrossedDiracAlgebra, CrossedElement, RieffelAlgebra, RieffelElement
from .scalars import GaussRational, HbarSeries, PhaseScalar, Q

__all__ = [
    "rational",
    "gauss",
    "base_key",
    "base_function",
    "base_series",
    "weyl_section",
    "groupoid_function",
    "rieffel_element",
    "crossed_element",
    "seeded",
]


def seeded(seed, name: str) -> random.Random:
    """An independent stream per (seed, check name); string seeding is stable across runs."""
    return random.Random(f"{seed}:{name}")


def rational(rng: random.Random, top: int = 4, den: int = 3):
    return Q(rng.randint(-top, top), rng.randint(1, den))


def gauss(rng: random.Random, top: int = 4, den: int = 3) -> GaussRational:
    return GaussRational(rational(rng, top, den), rational(rng, top, den))


def base_key(rng: random.Random, space: BaseSpace, size: int = 1) -> tuple:
    if isinstance(space, PolySpace):
        return tuple(rng.randint(0, size) for _ in range(space.key_dim))
    return tuple(rng.randint(-size, size) for _ in range(space.key_dim))


def base_function(rng: random.Random, space: BaseSpace, terms: int = 2, size: int = 1):
    return space.to_fn({base_key(rng, space, size): gauss(rng) for _ in range(terms)})


def base_series(rng: random.Random, space: BaseSpace, order: int, terms: int = 2, size: int = 1) -> HbarSeries:
    """Random hbar^0 part plus, with probability 1/2 per order, a higher term."""
    coeffs = [base_function(rng, space, terms, size)]
    for _ in range(order):
        coeffs.append(base_function(rng, space, 1, size) if rng.random() < 0.5 else space.to_fn({}))
    return HbarSeries(coeffs, order, space.to_fn({}))


def weyl_section(rng: random.Random, dim: int, space: BaseSpace, max_degree: int = 6, terms: int = 3,
                 max_form: int = 2, size: int = 1, order=None):
    """A random section of the Weyl bundle, each monomial of Fedosov degree <= max_degree."""
    from .weyl import WeylSection

    data: dict = {}
    for _ in range(terms):
        deg = rng.randint(0, max_degree)
        k = rng.randint(0, deg // 2)
        ydeg = deg - 2 * k
        alpha = [0] * dim
        for _ in range(ydeg):
            alpha[rng.randrange(dim)] += 1
        q = rng.randint(0, min(max_form, dim))
        tau = tuple(sorted(rng.sample(range(dim), q)))
        key = (k, tuple(alpha), tau, base_key(rng, space, size))
        data[key] = gauss(rng)
    return WeylSection(dim, space, data, order)


def _torus_pair_keys(model: TorusPairGroupoidModel, window: int) -> list:
    # outer modes range over the window, inner ones over {-1, 0, 1} so that
    # products of random functions are frequently nonzero
    k = model.k
    outer = list(product(range(-window, window + 1), repeat=k))
    inner = list(product((-1, 0, 1), repeat=k))
    return [a + b for a in outer for b in inner]


def groupoid_function(rng: random.Random, model, terms: int = 3, window: int = 2, order: int = 0,
                      hbar_terms: bool = False) -> GroupoidFunction:
    if isinstance(model, TorusPairGroupoidModel):
        keys = _torus_pair_keys(model, window)
    elif isinstance(model, (FiniteGroupoid, TransformationGroupoidModel)):
        keys = window_basis(model, window)
    else:
        raise TypeError("unknown model")
    data: dict = {}
    for _ in range(terms):
        k = rng.randint(0, order) if hbar_terms and order else 0
        key = (k, rng.choice(keys))
        data[key] = data.get(key, GaussRational(0)) + gauss(rng)
    return GroupoidFunction(model, data, order)


def rieffel_element(rng: random.Random, A: RieffelAlgebra, terms: int = 3, window: int = 2) -> RieffelElement:
    data: dict = {}
    for _ in range(terms):
        p = tuple(rng.randint(-window, window) for _ in range(A.n))
        if A.strict:
            c = PhaseScalar({rational(rng, 2, 5): gauss(rng)})
            if rng.random() < 0.3:
                c = c + PhaseScalar.constant(gauss(rng))
        else:
            c = HbarSeries([gauss(rng)] + [gauss(rng) if rng.random() < 0.5 else GaussRational(0)
                                           for _ in range(A.order)], A.order)
        data[p] = data[p] + c if p in data else c
    return RieffelElement(A, data)


def crossed_element(rng: random.Random, A: CrossedDiracAlgebra, terms: int = 3, window: int = 2) -> CrossedElement:
    data: dict = {}
    for _ in range(terms):
        m = tuple(rng.randint(-window, window) for _ in range(A.k))
        p = tuple(rng.randint(-window, window) for _ in range(A.base.n))
        c = PhaseScalar({rational(rng, 2, 5): gauss(rng)})
        key = (m, p)
        data[key] = data[key] + c if key in data else c
    return CrossedElement(A, data)


def space_for(kind: str, dim: int) -> BaseSpace:
    return PolySpace(dim) if kind == "poly" else TrigSpace(dim)
