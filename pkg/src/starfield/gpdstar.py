"""The deformed groupoid product  f * g = sigma(Q(f) # Q(g))  and its trace.

Q quantizes each component of a groupoid function with the abelian connection
on the leaves.  In  Q(f) # Q(g)  each composable pair (alpha, beta) contributes
the fiberwise product of the two flat sections once the left one has been moved
into the s-frame of  alpha beta: its base point by the action and its fiber
variables by the action Jacobian.
"""
from __future__ import annotations

from dataclasses import dataclass

from .fedosov import AbelianConnection, abelian_d, base_star, build_abelian_connection, poisson_matrix, quantize, sigma_circ
from .functions import TrigFn
from .groupoid import (
    FiniteGroupoid,
    GroupoidError,
    GroupoidFunction,
    TorusPairGroupoidModel,
    TransformationGroupoidModel,
    convolve,
    restrict_to_units,
)
from .poisson import PoissonTensor, nc_poisson
from .scalars import ZERO, GaussRational, HbarSeries, Q
from .weyl import SymplecticData, WeylSection, circ, standard_omega

__all__ = [
    "QuantizedGroupoidAlgebra",
    "TraceFunctional",
    "gpd_star",
    "crossed_star",
    "fiber_star",
    "flatness_defect",
    "trace",
    "semiclassical_check",
    "component_series",
]


@dataclass(eq=False)
class QuantizedGroupoidAlgebra:
    """A groupoid model with a flat invariant Fedosov connection on its leaves."""

    model: object
    order: int
    symplectic: SymplecticData | None = None

    def __post_init__(self):
        m = self.model
        if self.order < 2:
            raise ValueError("truncation order must be at least 2")
        if isinstance(m, FiniteGroupoid):
            self.symplectic = None
            self.connection = None
            self.poisson = PoissonTensor([], None)
            return
        if self.symplectic is None:
            self.symplectic = SymplecticData(standard_omega(m.leaf_dim))
        s = self.symplectic
        if s.dim != m.leaf_dim:
            raise GroupoidError("symplectic dimension differs from the leaf dimension")
        if s.christoffel is not None:
            raise GroupoidError("groupoid algebras are built with the flat invariant connection only")
        self.poisson = PoissonTensor(poisson_matrix(s), m)
        space = m.space
        self.connection: AbelianConnection = build_abelian_connection(s, self.order, space)

    @property
    def hbar_order(self) -> int:
        return self.order // 2

    _LIFT_CACHE = 8192

    def lift(self, series) -> WeylSection:
        """Q(series) as a Weyl section, memoized per algebra (quantize is pure)."""
        cache = self.__dict__.setdefault("_lifts", {})
        sec = cache.get(series)
        if sec is None:
            if len(cache) >= self._LIFT_CACHE:
                cache.clear()
            sec = cache[series] = quantize(series, self.connection).value
        return sec

    def conventions(self) -> dict:
        if self.connection is None:
            return {"leaves": "zero-dimensional; the product is convolution"}
        out = self.connection.conventions()
        out["transport"] = "left factor moved to the s-frame of the composite"
        return out


def component_series(f: GroupoidFunction, K: int) -> dict:
    """Transformation model: component g -> hbar-series of TrigFn."""
    n = f.model.n
    rows: dict = {}
    for (k, (g, p)), c in f.terms.items():
        if k <= K:
            rows.setdefault(g, [dict() for _ in range(K + 1)])[k][p] = c
    return {g: HbarSeries([TrigFn(n, r) for r in rs], K, TrigFn.zero(n)) for g, rs in rows.items()}


def _pair_series(f: GroupoidFunction, K: int):
    n2 = 2 * f.model.k
    rows = [dict() for _ in range(K + 1)]
    for (k, key), c in f.terms.items():
        if k <= K:
            rows[k][key] = c
    return HbarSeries([TrigFn(n2, r) for r in rows], K, TrigFn.zero(n2))


def _transport_section(sec: WeylSection, model: TransformationGroupoidModel, b) -> WeylSection:
    moved = sec.map_base(lambda p: (model.transport_mode(b, p),))
    if model.A[b] == tuple(tuple(int(i == j) for j in range(model.n)) for i in range(model.n)):
        return moved
    return moved.substitute(model.A[b])


def _order_of(f, g, A):
    return min(f.order, g.order, A.hbar_order)


def gpd_star(f: GroupoidFunction, g: GroupoidFunction, A: QuantizedGroupoidAlgebra) -> GroupoidFunction:
    if f.model is not A.model or g.model is not A.model:
        raise GroupoidError("functions do not live on the algebra's model")
    K = _order_of(f, g, A)
    model = A.model
    if isinstance(model, FiniteGroupoid):
        return convolve(f.truncate(K), g.truncate(K))
    N = A.order
    out: dict = {}
    if isinstance(model, TransformationGroupoidModel):
        qf = {a: A.lift(s) for a, s in component_series(f, K).items()}
        qg = {b: A.lift(s) for b, s in component_series(g, K).items()}
        for b, secb in qg.items():
            for a, seca in qf.items():
                left = _transport_section(seca, model, b)
                c = model.group.mul(a, b)
                for (k, p), v in sigma_circ(left, secb, A.symplectic, N).items():
                    if k <= K:
                        key = (k, (c, p))
                        out[key] = out.get(key, ZERO) + v
        return GroupoidFunction(model, out, K)
    if isinstance(model, TorusPairGroupoidModel):
        qf = A.lift(_pair_series(f, K))
        qg = A.lift(_pair_series(g, K))

        def combine(b1, b2):
            return [(c, key) for c, key, _, _ in model.basis_pairs(b1, b2)]

        for (k, key), v in sigma_circ(qf, qg, A.symplectic, N, combine).items():
            if k <= K:
                out[(k, key)] = out.get((k, key), ZERO) + v
        return GroupoidFunction(model, out, K)
    raise GroupoidError("unsupported model")


def fiber_star(f: GroupoidFunction, g: GroupoidFunction, A: QuantizedGroupoidAlgebra) -> dict:
    """Q(f) # Q(g) as full Weyl sections (component -> section), before sigma."""
    model = A.model
    K = _order_of(f, g, A)
    s = A.symplectic
    if isinstance(model, TransformationGroupoidModel):
        qf = {a: A.lift(x) for a, x in component_series(f, K).items()}
        qg = {b: A.lift(x) for b, x in component_series(g, K).items()}
        out: dict = {}
        for b, secb in qg.items():
            for a, seca in qf.items():
                c = model.group.mul(a, b)
                prod = circ(_transport_section(seca, model, b), secb, s)
                out[c] = prod if c not in out else out[c] + prod
        return out
    if isinstance(model, TorusPairGroupoidModel):
        qf = A.lift(_pair_series(f, K))
        qg = A.lift(_pair_series(g, K))
        # fiberwise product with the pair convolution on base modes
        splitf: dict = {}
        for key, c in qf.terms.items():
            splitf.setdefault(key[3], {})[key] = c
        splitg: dict = {}
        for key, c in qg.terms.items():
            splitg.setdefault(key[3], {})[key] = c
        total = WeylSection.zero(s.dim, model.space, A.order)
        for b1, t1 in splitf.items():
            for b2, t2 in splitg.items():
                pairs = model.basis_pairs(b1, b2)
                if not pairs:
                    continue
                coeff, outkey, _, _ = pairs[0]
                left = WeylSection(s.dim, model.space, {(k, a, t, model.space.unit_key()): c for (k, a, t, _), c in t1.items()}, A.order)
                right = WeylSection(s.dim, model.space, {(k, a, t, model.space.unit_key()): c for (k, a, t, _), c in t2.items()}, A.order)
                prod = circ(left, right, s).map_base(lambda _b, ok=outkey, cc=coeff: ((cc, ok),))
                total = total + prod
        return {"pair": total}
    raise GroupoidError("fiber products are defined for the transformation and torus-pair models")


def flatness_defect(f, g, A) -> list:
    """Components where D(Q(f) # Q(g)) fails to vanish below the truncation."""
    bad = []
    for comp, sec in fiber_star(f, g, A).items():
        if abelian_d(sec, A.connection, A.order - 1):
            bad.append(comp)
    return bad


def crossed_star(f: GroupoidFunction, g: GroupoidFunction, A: QuantizedGroupoidAlgebra) -> GroupoidFunction:
    """(f * g)(., c) = sum_{ab = c} baseStar(b^* f(., a), g(., b))."""
    model = A.model
    if not isinstance(model, TransformationGroupoidModel):
        raise GroupoidError("crossedStar needs a transformation groupoid model")
    K = _order_of(f, g, A)
    D = A.connection
    fs = component_series(f, K)
    gs = component_series(g, K)
    out: dict = {}
    for b, gb in gs.items():
        for a, fa in fs.items():
            pulled = fa.map(lambda fn, b=b: _pull_trig(fn, model, b))
            prod = base_star(pulled, gb, D)
            c = model.group.mul(a, b)
            for k in range(K + 1):
                for p, v in prod[k].terms.items():
                    key = (k, (c, p))
                    out[key] = out.get(key, ZERO) + v
    return GroupoidFunction(model, out, K)


def _pull_trig(fn: TrigFn, model, b) -> TrigFn:
    terms: dict = {}
    for p, c in fn.terms.items():
        ph, m = model.transport_mode(b, p)
        terms[m] = terms.get(m, ZERO) + c * ph
    return TrigFn(fn.dim, terms)


@dataclass(eq=False)
class TraceFunctional:
    """Tr(f) = integral over the units of f, with the normalized invariant volume.

    On a finite groupoid the volume of an object is its unit weight divided by
    the number of objects, the choice that makes Tr a trace for left-invariant
    Haar weights of the form lambda(y) = rho(s(y)).
    """

    model: object

    def __call__(self, f: GroupoidFunction) -> HbarSeries:
        return trace(f, self)

    def volume(self) -> str:
        if isinstance(self.model, FiniteGroupoid):
            return "unit weight / number of objects"
        return "normalized Haar measure of the torus (total mass 1)"


def trace(f: GroupoidFunction, T: TraceFunctional | None = None) -> HbarSeries:
    model = f.model
    if T is not None and T.model is not model:
        raise GroupoidError("trace functional belongs to another model")
    res = restrict_to_units(f)
    if isinstance(model, FiniteGroupoid):
        nobj = len(model.objects)
        coeffs = []
        for row in res.coeffs:
            acc = ZERO
            for o, c in row.items():
                acc = acc + c * (model.haar[model.units[o]] / nobj)
            coeffs.append(acc)
        return HbarSeries(coeffs, f.order)
    return HbarSeries([fn.average() for fn in res.coeffs], f.order)


def semiclassical_check(f: GroupoidFunction, g: GroupoidFunction, A: QuantizedGroupoidAlgebra, star=None) -> dict:
    """Order 0 and order 1 of the deformed product.

    * hbar^0 of f*g equals f<>g;
    * hbar^1 of f*g - g*f equals i Alt(Pi)(f, g), Alt(Pi)(f, g) = (Pi(f,g) - Pi(g,f))/2;
    * and, more finely, hbar^1 of f*g equals (i/2) Pi(f, g).

    Inputs are taken at hbar^0.
    """
    star = star or gpd_star
    f0, g0 = f.hbar_part(0).with_order(1), g.hbar_part(0).with_order(1)
    fg = star(f0, g0, A)
    gf = star(g0, f0, A)
    checks = []
    zeroth = fg.hbar_part(0) == convolve(f0, g0).hbar_part(0)
    checks.append({"name": "order0-convolution", "status": "pass" if zeroth else "fail"})
    P = A.poisson
    if isinstance(A.model, FiniteGroupoid):
        pi_fg = pi_gf = GroupoidFunction.zero(A.model)
    else:
        pi_fg = nc_poisson(f0, g0, P).hbar_part(0)
        pi_gf = nc_poisson(g0, f0, P).hbar_part(0)
    comm = (fg.hbar_part(1) - gf.hbar_part(1))
    alt = (pi_fg - pi_gf).scale(GaussRational(0, Q(1, 2)))
    checks.append({"name": "order1-commutator", "status": "pass" if comm == alt else "fail"})
    first = fg.hbar_part(1) == pi_fg.scale(GaussRational(0, Q(1, 2)))
    checks.append({"name": "order1-product", "status": "pass" if first else "fail"})
    ok = all(c["status"] == "pass" for c in checks)
    rep = {"status": "pass" if ok else "fail", "checks": checks}
    if not ok:
        rep["witness"] = [f0.to_json(), g0.to_json()]
    return rep


