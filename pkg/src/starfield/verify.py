"""Verification suites over the shipped fixtures.

A check is a named function of a :class:`RunConfig` and a seeded random
stream.  Checks are grouped in suites; reports list them sorted by name and
carry no wall-clock data unless asked, so the same configuration always gives
byte-identical output.  ``STARFIELD_THREADS`` (or ``RunConfig.threads``)
caps the number of worker processes.
"""
from __future__ import annotations

import os
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from functools import lru_cache
from itertools import product
from math import factorial
from typing import Callable

from . import fixtures
from .fedosov import abelian_d, base_star, build_abelian_connection, poisson_matrix, quantize
from .functions import PolyFn, TrigFn
from .gpdstar import (
    QuantizedGroupoidAlgebra,
    crossed_star,
    flatness_defect,
    gpd_star,
    semiclassical_check,
    trace,
)
from .groupoid import (
    FiniteGroupoid,
    GroupoidFunction,
    TorusPairGroupoidModel,
    TransformationGroupoidModel,
    convolve,
    leaf_differential,
    reframe,
    unit_function,
)
from .poisson import PoissonTensor, verify_poisson_structure, window_basis
from .rieffel import (
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
from . import sampling
from .scalars import ONE, GaussRational, HbarSeries, PhaseScalar, Q, format_rational
from .weyl import (
    SymplecticData,
    WeylSection,
    circ,
    connection,
    curvature,
    delta,
    delta_inv,
    fedosov_degree,
    gamma_section,
    i_over_hbar_bracket,
)

__all__ = [
    "RunConfig",
    "Check",
    "CONVENTIONS",
    "SUITES",
    "checks",
    "run_checks",
    "run_suite",
    "run_report",
    "report_status",
    "moyal_oracle",
    "taylor_lift",
    "assoc_checks",
    "trace_checks",
    "poisson_check",
    "star_semiclassical",
    "algebra",
]

CONVENTIONS = {
    "kernel": "a o b = exp(-(i hbar/2) W^{ij} d/dy^i d/dz^j) with W = omega^{-1}",
    "poisson": "pi = -W, so f*g - g*f = i hbar pi(f,g) + O(hbar^2)",
    "degree": "deg y = 1, deg hbar = 2; order N keeps hbar^0 .. hbar^(N//2) in symbols",
    "torus": "T^n = R^n / 2pi Z^n, modes e^{i<k,x>}, averages have total mass 1",
    "groupoid": "arrows (x,g) with s = x, t = g.x and (g.x,h)(x,g) = (x,hg)",
    "gerstenhaber": "[P,P](f,g,h) = 2(P(P(f,g),h) - P(f,P(g,h)))",
    "p2": "pi^{ij} pi^{kl} H(f)_{ik} H(g)_{jl} with flat leaf Hessians",
    "trace": "normalized torus volume; on finite groupoids lambda(1_o) / #objects",
    "bicharacter": "e_p * e_q = exp(-(i hbar/2) <p,Jq>) e_{p+q}",
}


@dataclass(frozen=True)
class RunConfig:
    """Everything that determines a verification run.

    ``samples`` overrides every check's default sample count when given.
    """

    seed: int = 0
    order: int = 6
    window: int = 2
    samples: int | None = None
    threads: int | None = None
    timing: bool = False

    def __post_init__(self):
        if self.order < 2:
            raise ValueError("order must be at least 2")
        if self.window < 1:
            raise ValueError("window must be at least 1")
        if self.samples is not None and self.samples < 1:
            raise ValueError("samples must be positive")

    def count(self, default: int) -> int:
        return default if self.samples is None else self.samples

    def workers(self) -> int:
        if self.threads is not None:
            return max(1, self.threads)
        try:
            return max(1, int(os.environ.get("STARFIELD_THREADS", "1")))
        except ValueError:
            return 1

    def as_record(self) -> dict:
        rec = asdict(self)
        rec.pop("threads")
        rec.pop("timing")
        return rec


@dataclass(frozen=True)
class Check:
    name: str
    suite: str
    run: Callable
    conventions: tuple = ()


class _Failure(Exception):
    def __init__(self, reason: str, witness=None):
        super().__init__(reason)
        self.reason = reason
        self.witness = witness


def _require(ok, reason: str, witness=None):
    if not ok:
        raise _Failure(reason, witness)


def _js(*xs):
    out = []
    for x in xs:
        if isinstance(x, HbarSeries):
            out.append([c.to_json() for c in x.coeffs])
        elif hasattr(x, "to_json"):
            out.append(x.to_json())
        else:
            out.append(x)
    return out


# cached fixture objects (per process) ----------------------------------------

@lru_cache(maxsize=None)
def _fixture(name: str):
    return fixtures.get(name)


@lru_cache(maxsize=None)
def _connection(name: str, order: int):
    return build_abelian_connection(_fixture(name), order)


@lru_cache(maxsize=None)
def _algebra(name: str, order: int) -> QuantizedGroupoidAlgebra:
    return QuantizedGroupoidAlgebra(_fixture(name), order)


def algebra(name: str, order: int = 6) -> QuantizedGroupoidAlgebra:
    """The cached quantized algebra of a model fixture."""
    return _algebra(name, order)


# oracles ---------------------------------------------------------------------

def moyal_oracle(f, g, W, K: int) -> list:
    """sum_k (1/k!) (-i/2)^k W^{i1 j1}..W^{ik jk} d_{i1..ik} f d_{j1..jk} g, for k <= K.

    Evaluated on the base functions directly, without any Weyl-bundle code.
    """
    n = len(W)
    nz = [(i, j, W[i][j]) for i in range(n) for j in range(n) if W[i][j]]
    out = []
    for k in range(K + 1):
        acc = type(f).zero(f.dim)
        for combo in product(nz, repeat=k):
            df, dg, w = f, g, Q(1)
            for i, j, x in combo:
                df, dg, w = df.derive(i), dg.derive(j), w * x
            if df and dg:
                acc = acc + (df * dg) * GaussRational(w)
        pref = GaussRational(0, Q(-1, 2)) ** k * GaussRational(Q(1, factorial(k)))
        out.append(acc * pref)
    return out


def taylor_lift(f, dim: int, space, N: int) -> WeylSection:
    """sum_alpha (1/alpha!) d^alpha f y^alpha through y-degree N."""
    terms: dict = {}
    frontier = {(0,) * dim: f}
    for deg in range(N + 1):
        nxt: dict = {}
        for alpha, fa in frontier.items():
            w = Q(1)
            for a in alpha:
                w /= factorial(a)
            for b, c in fa.terms.items():
                key = (0, alpha, (), b)
                terms[key] = terms.get(key, GaussRational(0)) + c * GaussRational(w)
            for j in range(dim):
                beta = list(alpha)
                beta[j] += 1
                beta = tuple(beta)
                if beta not in nxt:
                    d = fa.derive(j)
                    # d^beta f is reached from any parent; the first one is enough
                    if d:
                        nxt[beta] = d
        frontier = nxt
    return WeylSection(dim, space, terms, N)


def _bracket(f, g, P) -> object:
    # pi(f, g) = pi^{ij} d_i f d_j g
    acc = type(f).zero(f.dim)
    for i, row in enumerate(P):
        for j, x in enumerate(row):
            if x:
                acc = acc + f.derive(i) * g.derive(j) * GaussRational(x)
    return acc


# weyl-bundle checks -------------------------------------------------------------

def _sections(rng, s, count, **kw):
    sp = s.space()
    for _ in range(count):
        yield sampling.weyl_section(rng, s.dim, sp, **kw)


def weyl_associativity(s: SymplecticData, cfg, rng, default=70):
    n = 0
    for _ in range(cfg.count(default)):
        a, b, c = (sampling.weyl_section(rng, s.dim, s.space(), 6, 2) for _ in range(3))
        _require(circ(circ(a, b, s), c, s) == circ(a, circ(b, c, s), s), "(ab)c != a(bc)", _js(a, b, c))
        n += 3
    return {"sections": n}


def weyl_delta(s: SymplecticData, cfg, rng, default=200):
    n = 0
    for a in _sections(rng, s, cfg.count(default), max_degree=6, terms=3):
        _require(not delta(delta(a)), "delta^2 a != 0", _js(a))
        _require(not delta_inv(delta_inv(a)), "(delta^-1)^2 a != 0", _js(a))
        hodge = delta(delta_inv(a)) + delta_inv(delta(a)) + a.bidegree_part(0, 0)
        _require(hodge == a, "Hodge decomposition fails", _js(a))
        n += 1
    return {"sections": n}


def weyl_leibniz(s: SymplecticData, cfg, rng, default=100):
    G = gamma_section(s, s.space())
    n = 0
    for _ in range(cfg.count(default)):
        a, b = (sampling.weyl_section(rng, s.dim, s.space(), 5, 2, max_form=1) for _ in range(2))
        lhs = connection(circ(a, b, s), s, G)
        rhs = WeylSection.zero(s.dim, s.space())
        for q in a.form_degrees():
            aq = a.form_part(q)
            term = circ(connection(aq, s, G), b, s)
            other = circ(aq, connection(b, s, G), s)
            rhs = rhs + term + (other if q % 2 == 0 else -other)
        _require(lhs == rhs, "nabla is not a graded derivation", _js(a, b))
        n += 2
    return {"sections": n}


def weyl_anticommute(s: SymplecticData, cfg, rng, default=200):
    G = gamma_section(s, s.space())
    n = 0
    for a in _sections(rng, s, cfg.count(default), max_degree=6, terms=3):
        _require(not (connection(delta(a), s, G) + delta(connection(a, s, G))), "nabla delta + delta nabla != 0", _js(a))
        n += 1
    return {"sections": n}


def weyl_curvature(s: SymplecticData, cfg, rng, default=200):
    G = gamma_section(s, s.space())
    R = curvature(s, s.space())
    n = 0
    for a in _sections(rng, s, cfg.count(default), max_degree=6, terms=3):
        lhs = connection(connection(a, s, G), s, G)
        rhs = i_over_hbar_bracket(R, a, s) if R else WeylSection.zero(s.dim, s.space())
        _require(lhs == rhs, "nabla^2 a != (i/hbar)[R, a]", _js(a))
        n += 1
    return {"sections": n, "flat": G is None}


def weyl_central(s: SymplecticData, cfg, rng, default=100):
    sp = s.space()
    n = 0
    for a in _sections(rng, s, cfg.count(default), max_degree=6, terms=3):
        c = WeylSection.from_function(s.dim, sp, sampling.base_function(rng, sp))
        _require(circ(c, a, s) == circ(a, c, s), "base functions are not central", _js(c, a))
        n += 1
    return {"sections": n}


# fedosov checks ------------------------------------------------------------------

def fedosov_flat(name: str, cfg, rng):
    D = _connection(name, cfg.order)
    _require(not D.r, "flat fixture produced r != 0", _js(D.r))
    return {"order": cfg.order, "iterations": D.iterations}


def _random_base(rng, space, size=1):
    return sampling.base_function(rng, space, rng.randint(1, 3), size)


def fedosov_moyal(name: str, cfg, rng, default=25):
    s = _fixture(name)
    D = _connection(name, cfg.order)
    K = cfg.order // 2
    n = 0
    for _ in range(cfg.count(default)):
        f, g = _random_base(rng, D.space, 2), _random_base(rng, D.space, 2)
        got = base_star(f, g, D)
        want = moyal_oracle(f, g, s.omega_inv, K)
        for k in range(K + 1):
            _require(got[k] == want[k], f"hbar^{k} differs from the closed-form Moyal product", _js(f, g))
        n += 1
    return {"pairs": n, "orders": K + 1}


def fedosov_taylor(name: str, cfg, rng, default=25):
    s = _fixture(name)
    D = _connection(name, cfg.order)
    n = 0
    for _ in range(cfg.count(default)):
        f = _random_base(rng, D.space, 3)
        got = quantize(f, D).value
        _require(got == taylor_lift(f, s.dim, D.space, cfg.order), "flat quantization is not the Taylor lift", _js(f))
        n += 1
    return {"functions": n}


def fedosov_d_squared(name: str, cfg, rng):
    """D^2 a vanishes in every degree the truncation determines, on a monomial basis."""
    s = _fixture(name)
    N = cfg.order
    D = _connection(name, N)
    sp = D.space
    forms = [t for q in range(s.dim + 1) for t in _subsets(s.dim, q)]
    bases = [sp.unit_key()] + [tuple(int(i == j) for i in range(s.dim)) for j in range(s.dim)]
    count = 0
    for p in range(N + 1):
        for k in range(p // 2 + 1):
            for alpha in _compositions(p - 2 * k, s.dim):
                for tau in forms:
                    for b in bases:
                        a = WeylSection.monomial(s.dim, sp, k, alpha, tau, b, order=p + N)
                        dd = abelian_d(abelian_d(a, D, p + N), D, p + N)
                        low = dd.min_degree()
                        _require(low is None or low >= p + N - 2, f"D^2 a has a component of degree {low}", _js(a))
                        count += 1
    return {"monomials": count, "maxDegree": N, "exactBelowDegree": "deg(a) + N - 2"}


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _subsets(n: int, q: int):
    from itertools import combinations

    return list(combinations(range(n), q))


def fedosov_uniqueness(name: str, cfg, rng, default=4):
    s = _fixture(name)
    D = _connection(name, cfg.order)
    sp = D.space
    n = 0
    for _ in range(cfg.count(default)):
        two = sampling.weyl_section(rng, s.dim, sp, cfg.order - 1, 4, max_form=2)
        two = WeylSection(s.dim, sp, {k: c for k, c in two.terms.items() if len(k[2]) == 2 and fedosov_degree(k) >= 2})
        start = delta_inv(two)
        again = build_abelian_connection(s, cfg.order, sp, start=start)
        _require(again.r == D.r, "perturbed iteration converged elsewhere", _js(start))
        n += 1
    return {"starts": n}


def fedosov_associativity(name: str, cfg, rng, default=100):
    D = _connection(name, cfg.order)
    K = cfg.order // 2
    n = 0
    for _ in range(cfg.count(default)):
        f, g, h = (sampling.base_series(rng, D.space, K, 2) for _ in range(3))
        lhs = base_star(base_star(f, g, D), h, D)
        rhs = base_star(f, base_star(g, h, D), D)
        _require(lhs == rhs, f"(f*g)*h != f*(g*h) mod hbar^{K + 1}", _js(f, g, h))
        n += 1
    return {"triples": n, "exactThrough": f"hbar^{K}"}


def fedosov_semiclassical(name: str, cfg, rng, default=25):
    s = _fixture(name)
    D = _connection(name, cfg.order)
    P = poisson_matrix(s)
    i = GaussRational(0, 1)
    sym_zero = True
    n = 0
    for _ in range(cfg.count(default)):
        f, g = _random_base(rng, D.space, 2), _random_base(rng, D.space, 2)
        fg, gf = base_star(f, g, D), base_star(g, f, D)
        _require(fg[0] == f * g, "hbar^0 term is not the pointwise product", _js(f, g))
        _require(fg[1] - gf[1] == _bracket(f, g, P) * i, "hbar^1 antisymmetric part is not i pi(f,g)", _js(f, g))
        sym_zero = sym_zero and not (fg[1] + gf[1])
        n += 1
    return {"pairs": n, "hbar1SymmetricPartVanishes": sym_zero}


def fedosov_derivation(name: str, cfg, rng, default=25):
    s = _fixture(name)
    D = _connection(name, cfg.order)
    sp = D.space
    n = 0
    for _ in range(cfg.count(default)):
        a, b = (sampling.weyl_section(rng, s.dim, sp, 4, 2, max_form=1) for _ in range(2))
        L = 2 * cfg.order + 4
        lhs = abelian_d(circ(a, b, s), D, L)
        Db = abelian_d(b, D, L)
        rhs = WeylSection.zero(s.dim, sp, L)
        for q in a.form_degrees():
            aq = a.form_part(q)
            other = circ(aq, Db, s, L)
            rhs = rhs + circ(abelian_d(aq, D, L), b, s, L) + (other if q % 2 == 0 else -other)
        _require(lhs == rhs, "D is not a graded derivation of o", _js(a, b))
        n += 1
    return {"pairs": n}


def fedosov_unit(name: str, cfg, rng, default=10):
    D = _connection(name, cfg.order)
    K = cfg.order // 2
    one = D.space.to_fn({D.space.unit_key(): ONE})
    for _ in range(cfg.count(default)):
        f = sampling.base_series(rng, D.space, K, 2)
        _require(base_star(f, one, D) == f and base_star(one, f, D) == f, "1 is not a two-sided unit", _js(f))
    return {}


# groupoid checks -----------------------------------------------------------------

def _gfun(rng, model, cfg, order=0, terms=3, hbar_terms=False):
    return sampling.groupoid_function(rng, model, terms, cfg.window, order, hbar_terms)


def convolution_associativity(model, cfg, rng, default=200):
    nonzero = 0
    for _ in range(cfg.count(default)):
        f, g, h = (_gfun(rng, model, cfg) for _ in range(3))
        lhs = convolve(convolve(f, g), h)
        _require(lhs == convolve(f, convolve(g, h)), "convolution is not associative", _js(f, g, h))
        nonzero += bool(lhs)
    return {"triples": cfg.count(default), "nonzeroProducts": nonzero}


def haar_invariance(model: FiniteGroupoid, cfg, rng):
    bad = model.haar_violations()
    _require(not bad, "Haar system is not left invariant", bad[:3])
    return {"arrows": len(model.arrows), "pointMasses": len(model.arrows)}


def convolution_unit(model, cfg, rng, default=50):
    u = unit_function(model)
    for _ in range(cfg.count(default)):
        f = _gfun(rng, model, cfg)
        _require(convolve(u, f) == f and convolve(f, u) == f, "unit function is not a two-sided identity", _js(f))
    return {}


def leibniz_law(model, cfg, rng, default=100):
    n = model.leaf_dim
    for _ in range(cfg.count(default)):
        f, g = (_gfun(rng, model, cfg) for _ in range(2))
        fg = convolve(f, g)
        lhs = [leaf_differential(fg, j, "s") for j in range(n)]
        first = reframe([convolve(leaf_differential(f, j, "t"), g) for j in range(n)], "s")
        rhs = [a + convolve(f, leaf_differential(g, j, "s")) for j, a in enumerate(first)]
        _require(lhs == rhs, "leaf differential is not a derivation of convolution", _js(f, g))
    return {"pairs": cfg.count(default), "charts": "d_s(f<>g) = reframe_s(d_t f <> g) + f <> d_s g"}


# poisson ---------------------------------------------------------------------------

def poisson_check(model, P: PoissonTensor, cfg, rng, window=None, default=50):
    w = cfg.window if window is None else window
    rep = verify_poisson_structure(model, P, w, cfg.count(default), rng.randrange(2**32))
    _require(rep["cocycle"] == "pass", "d Pi != 0", rep["witnesses"])
    _require(rep["coboundary"] == "pass", "d P2 != eps [Pi, Pi] for a single eps", rep["witnesses"])
    return {k: rep[k] for k in ("coboundarySign", "triples", "triplesWithZeroSquare", "piSymmetricPartNonzero")} | {
        "window": w
    }


def _model_poisson(name: str, cfg, rng, window=None):
    A = _algebra(name, 2)
    return poisson_check(A.model, A.poisson, cfg, rng, window)


# groupoid star product ------------------------------------------------------------

def star_associativity(A: QuantizedGroupoidAlgebra, cfg, rng, default=100):
    K = A.hbar_order
    nonzero = 0
    for _ in range(cfg.count(default)):
        f, g, h = (_gfun(rng, A.model, cfg, K, 2, True) for _ in range(3))
        lhs = gpd_star(gpd_star(f, g, A), h, A)
        _require(lhs == gpd_star(f, gpd_star(g, h, A), A), f"(f*g)*h != f*(g*h) mod hbar^{K + 1}", _js(f, g, h))
        nonzero += bool(lhs)
    return {"triples": cfg.count(default), "nonzeroProducts": nonzero, "exactThrough": f"hbar^{K}"}


def star_order0(A: QuantizedGroupoidAlgebra, cfg, rng, default=100):
    K = A.hbar_order
    for _ in range(cfg.count(default)):
        f, g = (_gfun(rng, A.model, cfg, K, 3, True) for _ in range(2))
        _require(
            gpd_star(f, g, A).hbar_part(0) == convolve(f.hbar_part(0), g.hbar_part(0)),
            "hbar^0 term is not the convolution",
            _js(f, g),
        )
    return {"pairs": cfg.count(default)}


def _semiclassical_window(model, cfg) -> int:
    # the basis-pair count grows like (#group * (2w+1)^2)^2; larger models use w = 1
    if isinstance(model, TorusPairGroupoidModel):
        return 1
    if isinstance(model, TransformationGroupoidModel) and len(model.group.elements) > 2:
        return 1
    return cfg.window


def star_semiclassical(A: QuantizedGroupoidAlgebra, cfg, rng, default=50, window=None):
    model = A.model
    w = _semiclassical_window(model, cfg) if window is None else window
    keys = window_basis(model, w)
    pairs = 0
    for kl, kr in product(keys, repeat=2):
        f, g = GroupoidFunction.basis(model, kl), GroupoidFunction.basis(model, kr)
        rep = semiclassical_check(f, g, A)
        _require(rep["status"] == "pass", "semiclassical limit fails on a basis pair", rep.get("witness"))
        pairs += 1
    for _ in range(cfg.count(default)):
        f, g = (_gfun(rng, model, cfg) for _ in range(2))
        rep = semiclassical_check(f, g, A)
        _require(rep["status"] == "pass", "semiclassical limit fails", rep.get("witness"))
        pairs += 1
    return {"pairs": pairs, "window": w}


def star_crossed(A: QuantizedGroupoidAlgebra, cfg, rng, default=100):
    K = A.hbar_order
    for _ in range(cfg.count(default)):
        f, g = (_gfun(rng, A.model, cfg, K, 2, True) for _ in range(2))
        _require(gpd_star(f, g, A) == crossed_star(f, g, A), "crossed-product path differs", _js(f, g))
    return {"pairs": cfg.count(default), "orders": K + 1}


def star_unit(A: QuantizedGroupoidAlgebra, cfg, rng, default=30):
    K = A.hbar_order
    u = unit_function(A.model, K)
    for _ in range(cfg.count(default)):
        f = _gfun(rng, A.model, cfg, K, 3, True)
        _require(gpd_star(u, f, A) == f and gpd_star(f, u, A) == f, "unit is not a star identity", _js(f))
    return {}


def star_flatness(A: QuantizedGroupoidAlgebra, cfg, rng, default=10):
    for _ in range(cfg.count(default)):
        f, g = (_gfun(rng, A.model, cfg, 0, 2) for _ in range(2))
        bad = flatness_defect(f, g, A)
        _require(not bad, "D(Q(f) # Q(g)) != 0", _js(f, g))
    return {"pairs": cfg.count(default)}


def star_base(A: QuantizedGroupoidAlgebra, cfg, rng, default=30):
    """Trivial group: the groupoid product is the base star product."""
    model: TransformationGroupoidModel = A.model
    e = model.group.identity
    K = A.hbar_order
    for _ in range(cfg.count(default)):
        f, g = (sampling.base_series(rng, model.space, K, 2, 2) for _ in range(2))
        F = GroupoidFunction(model, {(k, (e, p)): c for k, fk in enumerate(f.coeffs) for p, c in fk.terms.items()}, K)
        G = GroupoidFunction(model, {(k, (e, p)): c for k, gk in enumerate(g.coeffs) for p, c in gk.terms.items()}, K)
        want = base_star(f, g, A.connection)
        got = gpd_star(F, G, A)
        W = GroupoidFunction(model, {(k, (e, p)): c for k, w in enumerate(want.coeffs) for p, c in w.terms.items()}, K)
        _require(got == W, "groupoid product differs from the base star product", _js(f, g))
    return {"pairs": cfg.count(default)}


def assoc_checks(model, cfg: RunConfig, label: str) -> list:
    """Associativity of convolution and of the deformed product on one model."""
    A = QuantizedGroupoidAlgebra(model, cfg.order)
    conv, star = f"assoc.convolution.{label}", f"assoc.gpd-star.{label}"
    return [
        (conv, lambda: convolution_associativity(model, cfg, sampling.seeded(cfg.seed, conv))),
        (star, lambda: star_associativity(A, cfg, sampling.seeded(cfg.seed, star))),
    ]


# trace -----------------------------------------------------------------------------

def trace_property(A: QuantizedGroupoidAlgebra, cfg, rng, default=100):
    K = A.hbar_order
    model = A.model
    for _ in range(cfg.count(default)):
        f, g = (_gfun(rng, model, cfg, K, 3, True) for _ in range(2))
        _require(trace(gpd_star(f, g, A)) == trace(gpd_star(g, f, A)), "Tr(f*g) != Tr(g*f)", _js(f, g))
        _require(trace(convolve(f, g)) == trace(convolve(g, f)), "Tr(f<>g) != Tr(g<>f)", _js(f, g))
    details = {"pairs": cfg.count(default), "orders": K + 1}
    if not isinstance(model, TorusPairGroupoidModel):
        _require(trace(unit_function(model, K)) == HbarSeries([ONE], K), "Tr(1) != 1")
        details["unitTrace"] = "1"
    return details


def trace_checks(model, cfg: RunConfig, label: str) -> list:
    A = QuantizedGroupoidAlgebra(model, cfg.order)
    name = f"trace.{label}"
    return [(name, lambda: trace_property(A, cfg, sampling.seeded(cfg.seed, name)))]


# rieffel ---------------------------------------------------------------------------

def rieffel_associativity(A: RieffelAlgebra, cfg, rng, default=200):
    for _ in range(cfg.count(default)):
        f, g, h = (sampling.rieffel_element(rng, A) for _ in range(3))
        lhs = rieffel_star(rieffel_star(f, g), h)
        _require(lhs == rieffel_star(f, rieffel_star(g, h)), "(f*g)*h != f*(g*h)", _js(f, g, h))
    return {"triples": cfg.count(default), "mode": "strict" if A.strict else "formal"}


def rieffel_involution_check(A: RieffelAlgebra, cfg, rng, default=200):
    inv = rieffel_involution
    for _ in range(cfg.count(default)):
        f, g = (sampling.rieffel_element(rng, A) for _ in range(2))
        _require(inv(rieffel_star(f, g)) == rieffel_star(inv(g), inv(f)), "(f*g)* != g* f*", _js(f, g))
        _require(inv(inv(f)) == f, "f** != f", _js(f))
    return {"pairs": cfg.count(default), "mode": "strict" if A.strict else "formal"}


def rieffel_slope_window(A: RieffelAlgebra, cfg, rng, window=3):
    modes = list(product(range(-window, window + 1), repeat=A.n))
    for p in modes:
        for q in modes:
            try:
                semiclassical_slope(p, q, A)
            except AssertionError as exc:
                raise _Failure(str(exc), [list(p), list(q)]) from None
    return {"pairs": len(modes) ** 2, "window": window}


def rieffel_degenerate(A: RieffelAlgebra, cfg, rng, default=50):
    A0 = RieffelAlgebra(A.n, A.J, Q(0))
    for _ in range(cfg.count(default)):
        f, g = (sampling.rieffel_element(rng, A0) for _ in range(2))
        _require(rieffel_star(f, g) == pointwise_product(f, g), "hbar = 0 product is not pointwise", _js(f, g))
        _require(rieffel_star(f, g) == rieffel_star(g, f), "hbar = 0 product is not commutative", _js(f, g))
    return {"pairs": cfg.count(default)}


def rieffel_cross_engine(A: RieffelAlgebra, torus: str, cfg, rng, default=25):
    """Formal bicharacter against the flat-torus base star product, J matched to pi."""
    s = _fixture(torus)
    D = _connection(torus, cfg.order)
    _require([[Q(x) for x in row] for row in poisson_matrix(s)] == A.J, "J does not match the torus pi")
    K = min(A.order, D.hbar_order)
    for _ in range(cfg.count(default)):
        f, g = (sampling.base_function(rng, D.space, 3, 2) for _ in range(2))
        F = RieffelElement(A, {p: HbarSeries([c], A.order) for p, c in f.terms.items()})
        G = RieffelElement(A, {p: HbarSeries([c], A.order) for p, c in g.terms.items()})
        got = rieffel_star(F, G)
        want = base_star(f, g, D)
        for k in range(K + 1):
            mode_k = TrigFn(A.n, {p: c[k] for p, c in got.terms.items()})
            _require(mode_k == want[k], f"hbar^{k} of the two engines differ", _js(f, g))
    return {"pairs": cfg.count(default), "orders": K + 1}


def rieffel_bicharacter(A: RieffelAlgebra, cfg, rng, window=2):
    modes = list(product(range(-window, window + 1), repeat=A.n))
    zero = (0,) * A.n
    one = PhaseScalar.constant(ONE)
    for p in modes:
        _require(A.bicharacter(zero, p) == one and A.bicharacter(p, zero) == one, "c(0, p) != 1", [list(p)])
        for q in modes:
            _require(A.phase_exponent(p, q) == -A.phase_exponent(q, p), "exponent is not antisymmetric", [list(p), list(q)])
    for _ in range(cfg.count(100)):
        p, q, r = (rng.choice(modes) for _ in range(3))
        pq = tuple(x + y for x, y in zip(p, q))
        qr = tuple(x + y for x, y in zip(q, r))
        lhs = A.bicharacter(p, q) * A.bicharacter(pq, r)
        _require(lhs == A.bicharacter(p, qr) * A.bicharacter(q, r), "c is not a 2-cocycle", [list(p), list(q), list(r)])
    return {"window": window}


def rieffel_example(A: RieffelAlgebra, cfg, rng):
    got = rieffel_star(A.mode((1, 0)), A.mode((0, 1)))
    want = A.mode((1, 1), PhaseScalar.phase(-A.hbar * A.J[0][1] / 2))
    _require(got == want, "e_(1,0) * e_(0,1) has the wrong phase", _js(got))
    return {
        "product": got.to_json(),
        "l1Surrogate": format_rational(l1_surrogate(got)),
        "l1Note": "sum of |re| + |im| over modes, a majorant and not the C*-norm",
    }


# crossed dirac ---------------------------------------------------------------------

def crossed_associativity(C: CrossedDiracAlgebra, cfg, rng, default=200):
    for _ in range(cfg.count(default)):
        f, g, h = (sampling.crossed_element(rng, C) for _ in range(3))
        lhs = crossed_dirac_star(crossed_dirac_star(f, g), h)
        _require(lhs == crossed_dirac_star(f, crossed_dirac_star(g, h)), "(f*g)*h != f*(g*h)", _js(f, g, h))
    return {"triples": cfg.count(default)}


def crossed_relation(C: CrossedDiracAlgebra, cfg, rng):
    """u_j * v_l = e^{-i theta_{lj}} v_l * u_j, and v_a * v_b = e^{-i hbar <a,Jb>} v_b * v_a."""
    m0, p0 = (0,) * C.k, (0,) * C.base.n
    gens_u = [tuple(int(i == j) for i in range(C.k)) for j in range(C.k)]
    gens_v = [tuple(int(i == j) for i in range(C.base.n)) for j in range(C.base.n)]
    phases = {}
    for j, m in enumerate(gens_u):
        u = C.basis(m, p0)
        for l, p in enumerate(gens_v):
            v = C.basis(m0, p)
            r = -C.theta[l][j]
            _require(crossed_dirac_star(u, v) == crossed_dirac_star(v, u).scale(PhaseScalar.phase(r)),
                     "u v != phase v u", _js(u, v))
            phases[f"u{j + 1}v{l + 1}"] = f"e^(i*{format_rational(r)})"
    for a, p in enumerate(gens_v):
        for b, q in enumerate(gens_v):
            va, vb = C.basis(m0, p), C.basis(m0, q)
            r = -C.base.hbar * C.base.form(p, q)
            _require(crossed_dirac_star(va, vb) == crossed_dirac_star(vb, va).scale(PhaseScalar.phase(r)),
                     "v_a v_b != phase v_b v_a", _js(va, vb))
    return {"relations": phases}


def crossed_grading(C: CrossedDiracAlgebra, cfg, rng, default=50):
    for _ in range(cfg.count(default)):
        f = sampling.crossed_element(rng, C, 2)
        m = rng.choice(f.support()) if f else (0,) * C.k
        f = C.element({key: c for key, c in f.terms.items() if key[0] == m})
        g = sampling.crossed_element(rng, C, 2)
        g = C.element({(tuple(-x for x in m), p): c for (_, p), c in g.terms.items()})
        prod = crossed_dirac_star(f, g)
        _require(all(x == (0,) * C.k for x in prod.support()), "grading is not additive", _js(f, g))
    return {}


def crossed_reduces(C: CrossedDiracAlgebra, cfg, rng, default=50):
    A = C.base
    m0 = (0,) * C.k
    for _ in range(cfg.count(default)):
        f, g = (sampling.rieffel_element(rng, A) for _ in range(2))
        F = C.element({(m0, p): c for p, c in f.terms.items()})
        G = C.element({(m0, p): c for p, c in g.terms.items()})
        want = C.element({(m0, p): c for p, c in rieffel_star(f, g).terms.items()})
        _require(crossed_dirac_star(F, G) == want, "trivial component does not reduce to the base product", _js(f, g))
    return {}


# registry --------------------------------------------------------------------------

_WEYL_FIXTURES = ("curved-R2", "curved-R4")
_TRANSFORMATION = ("trivial-T2", "z2-flip", "z4-rotation")
_GROUPOID_MODELS = _TRANSFORMATION + ("torus-pair-T2", "z2-group", "pair3")
_FINITE = ("pair3", "z2-group")


def _build_registry() -> dict:
    reg: dict = {}

    def add(name, suite, fn, conv=()):
        reg[name] = Check(name, suite, fn, tuple(conv))

    K = ("kernel", "degree")
    for fx in _WEYL_FIXTURES + ("flat-T2",):
        add(f"weyl.associativity.{fx}", "weyl", lambda c, r, fx=fx: weyl_associativity(_fixture(fx), c, r), K)
        add(f"weyl.delta.{fx}", "weyl", lambda c, r, fx=fx: weyl_delta(_fixture(fx), c, r), K)
        add(f"weyl.leibniz.{fx}", "weyl", lambda c, r, fx=fx: weyl_leibniz(_fixture(fx), c, r), K)
        add(f"weyl.anticommute.{fx}", "weyl", lambda c, r, fx=fx: weyl_anticommute(_fixture(fx), c, r), K)
        add(f"weyl.curvature.{fx}", "weyl", lambda c, r, fx=fx: weyl_curvature(_fixture(fx), c, r), K)
        add(f"weyl.central.{fx}", "weyl", lambda c, r, fx=fx: weyl_central(_fixture(fx), c, r), K)

    F = ("kernel", "poisson", "degree")
    for fx in ("flat-R2", "flat-T2", "flat-R4", "flat-T4"):
        add(f"fedosov.flat.{fx}", "fedosov", lambda c, r, fx=fx: fedosov_flat(fx, c, r), F)
    for fx in ("flat-R2", "flat-T2", "flat-T4"):
        add(f"fedosov.moyal.{fx}", "fedosov", lambda c, r, fx=fx: fedosov_moyal(fx, c, r), F)
    add("fedosov.taylor.flat-R2", "fedosov", lambda c, r: fedosov_taylor("flat-R2", c, r), F)
    add("fedosov.d-squared.curved-R2", "fedosov", lambda c, r: fedosov_d_squared("curved-R2", c, r), F)
    add("fedosov.uniqueness.curved-R2", "fedosov", lambda c, r: fedosov_uniqueness("curved-R2", c, r), F)
    for fx in ("curved-R2", "flat-T2"):
        add(f"fedosov.associativity.{fx}", "fedosov", lambda c, r, fx=fx: fedosov_associativity(fx, c, r), F)
        add(f"fedosov.semiclassical.{fx}", "fedosov", lambda c, r, fx=fx: fedosov_semiclassical(fx, c, r), F)
        add(f"fedosov.unit.{fx}", "fedosov", lambda c, r, fx=fx: fedosov_unit(fx, c, r), F)
    add("fedosov.derivation.curved-R2", "fedosov", lambda c, r: fedosov_derivation("curved-R2", c, r), F)

    G = ("groupoid", "torus")
    for m in _GROUPOID_MODELS:
        add(f"groupoid.associativity.{m}", "groupoid", lambda c, r, m=m: convolution_associativity(_fixture(m), c, r), G)
    for m in _FINITE:
        add(f"groupoid.haar.{m}", "groupoid", lambda c, r, m=m: haar_invariance(_fixture(m), c, r), G)
    for m in _FINITE + _TRANSFORMATION:
        add(f"groupoid.unit.{m}", "groupoid", lambda c, r, m=m: convolution_unit(_fixture(m), c, r), G)
    for m in _TRANSFORMATION + ("torus-pair-T2",):
        add(f"groupoid.leibniz.{m}", "groupoid", lambda c, r, m=m: leibniz_law(_fixture(m), c, r), G)

    P = ("groupoid", "poisson", "gerstenhaber", "p2")
    for m in ("trivial-T2", "z2-flip"):
        add(f"poisson.{m}", "poisson", lambda c, r, m=m: _model_poisson(m, c, r), P)
    for m in ("z4-rotation", "torus-pair-T2"):
        add(f"poisson.{m}", "poisson", lambda c, r, m=m: _model_poisson(m, c, r, 1), P)

    S = ("kernel", "poisson", "degree", "groupoid")
    for m in _GROUPOID_MODELS:
        add(f"gpd-star.associativity.{m}", "gpd-star", lambda c, r, m=m: star_associativity(_algebra(m, c.order), c, r), S)
        add(f"gpd-star.order0.{m}", "gpd-star", lambda c, r, m=m: star_order0(_algebra(m, c.order), c, r), S)
        add(f"gpd-star.semiclassical.{m}", "gpd-star",
            lambda c, r, m=m: star_semiclassical(_algebra(m, c.order), c, r), S)
    for m in ("z2-flip", "z4-rotation"):
        add(f"gpd-star.crossed.{m}", "gpd-star", lambda c, r, m=m: star_crossed(_algebra(m, c.order), c, r), S)
    for m in _FINITE + _TRANSFORMATION:
        add(f"gpd-star.unit.{m}", "gpd-star", lambda c, r, m=m: star_unit(_algebra(m, c.order), c, r), S)
    for m in ("z2-flip", "torus-pair-T2"):
        add(f"gpd-star.flatness.{m}", "gpd-star", lambda c, r, m=m: star_flatness(_algebra(m, c.order), c, r), S)
    add("gpd-star.base.trivial-T2", "gpd-star", lambda c, r: star_base(_algebra("trivial-T2", c.order), c, r), S)

    T = ("trace", "groupoid", "torus")
    for m in _GROUPOID_MODELS:
        add(f"trace.{m}", "trace", lambda c, r, m=m: trace_property(_algebra(m, c.order), c, r), T)

    R = ("bicharacter",)
    for fx in ("rieffel-T2", "rieffel-T2-formal", "rieffel-T3"):
        add(f"rieffel.associativity.{fx}", "rieffel", lambda c, r, fx=fx: rieffel_associativity(_fixture(fx), c, r), R)
        add(f"rieffel.involution.{fx}", "rieffel", lambda c, r, fx=fx: rieffel_involution_check(_fixture(fx), c, r), R)
    add("rieffel.slope.rieffel-T2-formal", "rieffel", lambda c, r: rieffel_slope_window(_fixture("rieffel-T2-formal"), c, r), R)
    add("rieffel.degenerate.rieffel-T2", "rieffel", lambda c, r: rieffel_degenerate(_fixture("rieffel-T2"), c, r), R)
    add("rieffel.cross-engine.rieffel-T2-formal", "rieffel",
        lambda c, r: rieffel_cross_engine(_fixture("rieffel-T2-formal"), "flat-T2", c, r), R + ("poisson",))
    for fx in ("rieffel-T2", "rieffel-T3"):
        add(f"rieffel.bicharacter.{fx}", "rieffel", lambda c, r, fx=fx: rieffel_bicharacter(_fixture(fx), c, r), R)
    add("rieffel.example.rieffel-T2", "rieffel", lambda c, r: rieffel_example(_fixture("rieffel-T2"), c, r), R)

    C = ("bicharacter",)
    fx = "crossed-dirac-k1"
    add(f"crossed.associativity.{fx}", "crossed-dirac", lambda c, r: crossed_associativity(_fixture(fx), c, r), C)
    add(f"crossed.relation.{fx}", "crossed-dirac", lambda c, r: crossed_relation(_fixture(fx), c, r), C)
    add(f"crossed.grading.{fx}", "crossed-dirac", lambda c, r: crossed_grading(_fixture(fx), c, r), C)
    add(f"crossed.reduces.{fx}", "crossed-dirac", lambda c, r: crossed_reduces(_fixture(fx), c, r), C)
    return reg


REGISTRY = _build_registry()
SUITES = ("weyl", "fedosov", "groupoid", "poisson", "gpd-star", "trace", "rieffel", "crossed-dirac")


def checks(suite: str | None = None, prefix: str | None = None) -> list:
    """Registered check names, sorted."""
    names = sorted(n for n, c in REGISTRY.items() if suite is None or c.suite == suite)
    if prefix is not None:
        names = [n for n in names if n.startswith(prefix)]
    return names


def _execute(label: str, fn: Callable, conventions: tuple, cfg: RunConfig) -> dict:
    t0 = time.perf_counter()
    rec = {"name": label}
    try:
        details = fn()
        rec["status"] = "pass"
    except _Failure as exc:
        details = {"reason": exc.reason}
        rec["status"] = "fail"
        rec["witness"] = exc.witness if exc.witness is not None else []
    except Exception as exc:  # a crash inside a check is reported as a failure with its message
        details = {"reason": f"{type(exc).__name__}: {exc}"}
        rec["status"] = "fail"
        rec["witness"] = []
    rec["details"] = details or {}
    rec["conventions"] = {k: CONVENTIONS[k] for k in conventions}
    if cfg.timing:
        rec["seconds"] = round(time.perf_counter() - t0, 3)
    return rec


def _run_named(name: str, cfg: RunConfig) -> dict:
    chk = REGISTRY[name]
    rng = sampling.seeded(cfg.seed, name)
    return _execute(name, lambda: chk.run(cfg, rng), chk.conventions, cfg)


def run_checks(names: list, cfg: RunConfig) -> list:
    names = sorted(names)
    workers = min(cfg.workers(), len(names)) if names else 1
    if workers <= 1:
        return [_run_named(n, cfg) for n in names]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        out = list(pool.map(_run_named, names, [cfg] * len(names)))
    return sorted(out, key=lambda r: r["name"])


def report_status(records: list) -> str:
    return "pass" if all(r["status"] == "pass" for r in records) else "fail"


def suite_report(suite: str, records: list, cfg: RunConfig) -> dict:
    rep = {"suite": suite, "config": cfg.as_record(), "status": report_status(records), "checks": records}
    if cfg.timing:
        rep["timing"] = {"seconds": round(sum(r.get("seconds", 0) for r in records), 3)}
    return rep


def run_suite(suite: str, cfg: RunConfig | None = None) -> dict:
    cfg = cfg or RunConfig()
    if suite not in SUITES:
        raise KeyError(f"unknown suite {suite!r}")
    return suite_report(suite, run_checks(checks(suite), cfg), cfg)


def run_report(cfg: RunConfig | None = None, suites=None) -> dict:
    cfg = cfg or RunConfig()
    suites = list(suites or SUITES)
    records = run_checks([n for s in suites for n in checks(s)], cfg)
    by_suite = {s: [] for s in suites}
    for r in records:
        by_suite[REGISTRY[r["name"]].suite].append(r)
    reps = [suite_report(s, by_suite[s], cfg) for s in suites]
    return {
        "report": "starfield verification",
        "config": cfg.as_record(),
        "status": "pass" if all(r["status"] == "pass" for r in reps) else "fail",
        "suites": reps,
    }


def run_custom(suite: str, items: list, cfg: RunConfig, conventions=()) -> dict:
    """Run ``(label, thunk)`` pairs (checks built on user-supplied inputs) as one suite."""
    records = sorted((_execute(label, fn, tuple(conventions), cfg) for label, fn in items), key=lambda r: r["name"])
    return suite_report(suite, records, cfg)


def seeded_stream(cfg: RunConfig, label: str) -> random.Random:
    return sampling.seeded(cfg.seed, label)
