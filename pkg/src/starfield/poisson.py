"""The noncommutative Poisson cochain Pi, its second-order companion P2 and
the Hochschild / Gerstenhaber calculus over the convolution algebra.

For modes, a leaf gradient is an eigenvalue: d e_u = i u e_u.  With u and v the
transported gradients of the two factors (see ``groupoid.basis_pairs``),

    Pi(e_u, e_v) = pi^{ij} (i u_i)(i v_j) = -pi(u, v),
    P2(e_u, e_v) = pi^{ij} pi^{kl} (-u_i u_k)(-v_j v_l) = pi(u, v)^2.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import product
from typing import Callable

from .groupoid import (
    FiniteGroupoid,
    GroupoidError,
    GroupoidFunction,
    TorusPairGroupoidModel,
    TransformationGroupoidModel,
    bilinear,
    convolve,
)
from .scalars import ZERO, GaussRational, Q, format_rational

__all__ = [
    "PoissonTensor",
    "Cochain",
    "nc_poisson",
    "p2_hat",
    "hochschild_coboundary",
    "gerstenhaber_square",
    "multiplication_cochain",
    "poisson_cochain",
    "p2_cochain",
    "verify_poisson_structure",
    "window_basis",
    "random_function",
]


@dataclass(eq=False)
class PoissonTensor:
    """Constant antisymmetric bivector pi^{ij} on the unit space (leaf directions).

    With a model given, invariance A_g pi A_g^T = pi under the action is
    enforced at construction.
    """

    pi: list
    model: object = None
    _form: tuple = field(init=False, repr=False)

    def __post_init__(self):
        P = [[Q(x) for x in row] for row in self.pi]
        n = len(P)
        if any(len(row) != n for row in P):
            raise ValueError("pi must be square")
        for i in range(n):
            for j in range(n):
                if P[i][j] != -P[j][i]:
                    raise ValueError("pi must be antisymmetric")
        self.pi = P
        self._form = tuple(tuple(row) for row in P)
        if self.model is not None:
            if self.model.leaf_dim != n and not isinstance(self.model, FiniteGroupoid):
                raise ValueError("pi has the wrong size for the model's leaves")
            inv = getattr(self.model, "pi_invariant", None)
            if inv is not None and not inv(P):
                raise GroupoidError("pi is not invariant under the group action")

    @property
    def n(self) -> int:
        return len(self.pi)

    def pair(self, u, v):
        """pi(u, v) = sum pi^{ij} u_i v_j."""
        if not u:
            return Q(0)
        P = self._form
        return sum((P[i][j] * u[i] * v[j] for i in range(len(u)) for j in range(len(v)) if P[i][j]), Q(0))

    def to_json(self):
        return {"pi": [[format_rational(x) for x in row] for row in self.pi]}

    @classmethod
    def from_json(cls, obj, model=None):
        from .scalars import parse_rational

        try:
            rows = obj["pi"] if isinstance(obj, dict) else obj
            return cls([[parse_rational(x) if isinstance(x, str) else Q(x) for x in row] for row in rows], model)
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed Poisson tensor: {exc}") from exc


def nc_poisson(f: GroupoidFunction, g: GroupoidFunction, P: PoissonTensor) -> GroupoidFunction:
    """Pi(f, g)(gamma) = sum over gamma = alpha beta of pi(d f(alpha), d g(beta))."""

    def weight(u, v):
        return ((0, GaussRational(-P.pair(u, v))),)

    return bilinear(f, g, weight)


def p2_hat(f: GroupoidFunction, g: GroupoidFunction, P: PoissonTensor) -> GroupoidFunction:
    """P2^(f, g)(gamma) = sum over gamma = alpha beta of pi^{ij} pi^{kl} H(f)_{ik} H(g)_{jl}."""

    def weight(u, v):
        w = P.pair(u, v)
        return ((0, GaussRational(w * w)),)

    return bilinear(f, g, weight)


@dataclass(eq=False)
class Cochain:
    arity: int
    evaluate: Callable
    name: str = "C"

    def __post_init__(self):
        if self.arity not in (1, 2, 3):
            raise ValueError("only cochains of arity 1, 2 or 3 are supported")

    def __call__(self, *args):
        if len(args) != self.arity:
            raise TypeError(f"{self.name} takes {self.arity} arguments")
        return self.evaluate(*args)

    def __add__(self, other):
        if other.arity != self.arity:
            raise ValueError("arity mismatch")
        return Cochain(self.arity, lambda *xs: self(*xs) + other(*xs), f"({self.name}+{other.name})")

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c):
        return Cochain(self.arity, lambda *xs: self(*xs).scale(c), f"{c}*{self.name}")


def multiplication_cochain(mult: Callable = convolve) -> Cochain:
    return Cochain(2, mult, "m")


def poisson_cochain(P: PoissonTensor) -> Cochain:
    return Cochain(2, lambda f, g: nc_poisson(f, g, P), "Pi")


def p2_cochain(P: PoissonTensor) -> Cochain:
    return Cochain(2, lambda f, g: p2_hat(f, g, P), "P2")


def hochschild_coboundary(C: Cochain, mult: Callable = convolve) -> Cochain:
    """(dC)(f1..f_{k+1}) = f1 C(f2..) + sum (-1)^i C(.., f_i f_{i+1}, ..) + (-1)^{k+1} C(f1..f_k) f_{k+1}."""
    k = C.arity
    if k == 1:
        def d1(f, g):
            return mult(f, C(g)) - C(mult(f, g)) + mult(C(f), g)

        return Cochain(2, d1, f"d{C.name}")
    if k == 2:
        def d2(f, g, h):
            return mult(f, C(g, h)) - C(mult(f, g), h) + C(f, mult(g, h)) - mult(C(f, g), h)

        return Cochain(3, d2, f"d{C.name}")
    raise ValueError("the coboundary of a 3-cochain is not implemented")


def gerstenhaber_square(C: Cochain) -> Cochain:
    """[C, C](f, g, h) = 2 (C(C(f, g), h) - C(f, C(g, h)))."""
    if C.arity != 2:
        raise ValueError("the Gerstenhaber square is implemented for 2-cochains")

    def sq(f, g, h):
        return (C(C(f, g), h) - C(f, C(g, h))).scale(2)

    return Cochain(3, sq, f"[{C.name},{C.name}]")


def window_basis(model, window: int) -> list:
    """Basis keys with every mode entry in [-window, window]."""
    if isinstance(model, FiniteGroupoid):
        return sorted(model.arrows)
    if isinstance(model, TransformationGroupoidModel):
        modes = list(product(range(-window, window + 1), repeat=model.n))
        return [(g, m) for g in model.group.elements for m in modes]
    if isinstance(model, TorusPairGroupoidModel):
        return list(product(range(-window, window + 1), repeat=2 * model.k))
    raise GroupoidError("unknown model")


def random_function(model, rng: random.Random, terms: int = 3, window: int = 2, order: int = 0, hbar_terms=0):
    """A random finitely supported function with small rational coefficients."""
    keys = window_basis(model, window)
    data: dict = {}
    for _ in range(terms):
        key = rng.choice(keys)
        k = rng.randint(0, hbar_terms) if hbar_terms else 0
        if k > order:
            k = order
        c = GaussRational(Q(rng.randint(-4, 4), rng.randint(1, 3)), Q(rng.randint(-4, 4), rng.randint(1, 3)))
        data[(k, key)] = data.get((k, key), GaussRational(0)) + c
    return GroupoidFunction(model, data, order)


class _KeyCalculus:
    """Cached bilinear operations on basis keys.

    On basis elements every operation used here returns a short list of
    ``(coeff, key)`` terms, so the exhaustive part of the verification runs
    on key pairs instead of full function objects.
    """

    def __init__(self, model, P: PoissonTensor):
        self.model = model
        self.P = P
        self._m: dict = {}
        self._pi: dict = {}
        self._p2: dict = {}

    def _op(self, cache, kl, kr, weight):
        hit = cache.get((kl, kr))
        if hit is None:
            out: dict = {}
            for coeff, key, u, v in self.model.basis_pairs(kl, kr):
                w = coeff if weight is None else coeff * weight(u, v)
                if w:
                    out[key] = out.get(key, ZERO) + w
            hit = tuple((k, c) for k, c in out.items() if c)
            cache[(kl, kr)] = hit
        return hit

    def m(self, kl, kr):
        return self._op(self._m, kl, kr, None)

    def pi(self, kl, kr):
        return self._op(self._pi, kl, kr, lambda u, v: GaussRational(-self.P.pair(u, v)))

    def p2(self, kl, kr):
        return self._op(self._p2, kl, kr, lambda u, v: GaussRational(self.P.pair(u, v) ** 2))

    @staticmethod
    def _left(op, terms, k3, out, sign):
        # sum_k c * op(k, k3), accumulated into out with the given sign
        for k, c in terms:
            for kk, w in op(k, k3):
                v = c * w
                out[kk] = out.get(kk, ZERO) + (v if sign > 0 else -v)

    @staticmethod
    def _right(op, k1, terms, out, sign):
        for k, c in terms:
            for kk, w in op(k1, k):
                v = c * w
                out[kk] = out.get(kk, ZERO) + (v if sign > 0 else -v)

    def basis_triple(self, k1, k2, k3):
        """(d Pi, d P2^, [Pi, Pi]) on the basis triple (k1, k2, k3)."""
        m, pi, p2 = self.m, self.pi, self.p2
        fg, gh = m(k1, k2), m(k2, k3)
        res = []
        for C in (pi, p2):
            out: dict = {}
            self._right(m, k1, C(k2, k3), out, 1)
            self._left(C, fg, k3, out, -1)
            self._right(C, k1, gh, out, 1)
            self._left(m, C(k1, k2), k3, out, -1)
            res.append({k: c for k, c in out.items() if c})
        out = {}
        self._left(pi, pi(k1, k2), k3, out, 1)
        self._right(pi, k1, pi(k2, k3), out, -1)
        res.append({k: c * 2 for k, c in out.items() if c})
        return res


def verify_poisson_structure(model, P: PoissonTensor, window: int = 2, samples: int = 200, seed: int = 0,
                             exhaustive: bool = True) -> dict:
    """Check d Pi = 0 and d P2^ = eps [Pi, Pi] for one global sign eps.

    Exhaustive over all basis triples in the mode window (which span every
    triple of functions supported there, the identities being trilinear),
    followed by ``samples`` random multi-term triples evaluated through the
    generic cochain calculus.
    """
    if P.model is not model:
        P = PoissonTensor(P.pi, model)
    Pi = poisson_cochain(P)
    dPi = hochschild_coboundary(Pi)
    dP2 = hochschild_coboundary(p2_cochain(P))
    sq = gerstenhaber_square(Pi)
    rng = random.Random(seed)
    calc = _KeyCalculus(model, P)

    cocycle_bad: list = []
    sign_bad: list = []
    state = {"eps": None, "zero": 0, "checked": 0}

    def judge(d_pi, lhs, rhs, witness):
        state["checked"] += 1
        if d_pi and len(cocycle_bad) < 5:
            cocycle_bad.append(witness())
        if not rhs:
            state["zero"] += 1
            if lhs and len(sign_bad) < 5:
                sign_bad.append(witness())
            return
        eps = state["eps"]
        if eps is None:
            if lhs == rhs:
                state["eps"] = 1
            elif lhs == _negate(rhs):
                state["eps"] = -1
            elif len(sign_bad) < 5:
                sign_bad.append(witness())
            return
        if lhs != (rhs if eps == 1 else _negate(rhs)) and len(sign_bad) < 5:
            sign_bad.append(witness())

    basis_keys = window_basis(model, window)
    if exhaustive:
        for k1, k2, k3 in product(basis_keys, repeat=3):
            d_pi, d_p2, square = calc.basis_triple(k1, k2, k3)
            judge(d_pi, d_p2, square, lambda: _witness(*(GroupoidFunction.basis(model, k) for k in (k1, k2, k3))))
    sym_nonzero = 0
    for i in range(samples):
        f, g, h = (random_function(model, rng, rng.randint(1, 3), window) for _ in range(3))
        judge(dPi(f, g, h), dP2(f, g, h), sq(f, g, h), lambda: _witness(f, g, h))
        if Pi(f, g) + Pi(g, f):
            sym_nonzero += 1
    if exhaustive:
        for k1, k2 in product(basis_keys, repeat=2):
            if any(c for _, c in _sum_terms(calc.pi(k1, k2), calc.pi(k2, k1))):
                sym_nonzero += 1
    eps = state["eps"]
    return {
        "cocycle": "pass" if not cocycle_bad else "fail",
        "coboundarySign": eps if eps is not None else 1,
        "coboundary": "pass" if not sign_bad else "fail",
        "triples": state["checked"],
        "triplesWithZeroSquare": state["zero"],
        "piSymmetricPartNonzero": sym_nonzero,
        "witnesses": cocycle_bad + sign_bad,
        "conventions": {
            "gerstenhaber": "[P,P](f,g,h) = 2(P(P(f,g),h) - P(f,P(g,h)))",
            "p2": "pi^{ij} pi^{kl} H(f)_{ik} H(g)_{jl} with flat leaf Hessians",
        },
    }


def _sum_terms(a, b):
    out: dict = {}
    for k, c in tuple(a) + tuple(b):
        out[k] = out.get(k, ZERO) + c
    return out.items()


def _negate(x):
    if isinstance(x, dict):
        return {k: -c for k, c in x.items()}
    return x.scale(-1)


def _witness(*fs) -> list:
    return [f.to_json() for f in fs]


