"""Sections of the formal Weyl algebra bundle  Lambda^* (x) W  over a single
Darboux chart.

A section is a finite sum of monomials

    hbar^k * c(x) * y^alpha * dx^tau

stored sparsely as ``{(k, alpha, tau, basekey): coeff}``.  ``basekey`` indexes
a basis function of the base space (a polynomial exponent or a Fourier mode),
so a base coefficient c(x) is spread over several keys.  The Fedosov degree of
a monomial is ``2k + |alpha|``; every operation here is homogeneous for it
(except ``delta`` and ``delta_star`` which shift it by -1 and +1), so
truncation at degree N is applied term by term.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations_with_replacement
from math import factorial
from typing import Mapping

import gmpy2

from .functions import BaseSpace, PolyFn, PolySpace, TrigFn, TrigSpace, add_keys
from .scalars import ONE, ZERO, GaussRational, HbarSeries, I, Q, as_gauss

__all__ = [
    "SymplecticData",
    "WeylSection",
    "standard_omega",
    "circ",
    "graded_bracket",
    "delta",
    "delta_star",
    "delta_inv",
    "exterior_d",
    "connection",
    "divide_hbar",
    "i_over_hbar_bracket",
    "i_over_hbar",
    "gamma_section",
    "curvature",
    "wedge_sign",
    "fedosov_degree",
    "DivisibilityError",
]

_NEG_HALF_I = GaussRational(0, Q(-1, 2))


class DivisibilityError(ArithmeticError):
    """Raised when a section expected to be divisible by hbar is not."""


def fedosov_degree(key: tuple) -> int:
    return 2 * key[0] + sum(key[1])


def wedge_sign(t1: tuple, t2: tuple) -> int:
    """Sign of dx^t1 ^ dx^t2 relative to the sorted merge, 0 on overlap."""
    if not t1 or not t2:
        return 1
    inv = 0
    for a in t1:
        for b in t2:
            if a == b:
                return 0
            if a > b:
                inv += 1
    return -1 if inv & 1 else 1


def _merge(t1: tuple, t2: tuple) -> tuple:
    if not t1:
        return t2
    if not t2:
        return t1
    return tuple(sorted(t1 + t2))


def standard_omega(dim: int) -> list:
    """The block form [[0, I], [-I, 0]] in dimension ``dim``."""
    if dim <= 0 or dim % 2:
        raise ValueError("symplectic dimension must be even and positive")
    n = dim // 2
    om = [[0] * dim for _ in range(dim)]
    for i in range(n):
        om[i][i + n] = 1
        om[i + n][i] = -1
    return om


def _inverse(mat: list) -> list:
    n = len(mat)
    a = [[Q(x) for x in row] + [Q(int(i == j)) for j in range(n)] for i, row in enumerate(mat)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col]), None)
        if piv is None:
            raise ValueError("omega is not invertible")
        a[col], a[piv] = a[piv], a[col]
        p = a[col][col]
        a[col] = [x / p for x in a[col]]
        for r in range(n):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [row[n:] for row in a]


@dataclass(eq=False)
class SymplecticData:
    """Constant symplectic form on a Darboux chart and an optional connection.

    ``christoffel`` maps an index triple (i, j, k), 0-based, to the lowered
    symbol Gamma_{ijk} as a base function.  Lowered symbols of a torsion-free
    symplectic connection are totally symmetric, which is checked.  Missing
    triples are zero; it is enough to give one ordering of each triple.
    """

    omega: list
    christoffel: Mapping | None = None
    base: str = "trig"
    dim: int = field(init=False)
    omega_inv: list = field(init=False)

    def __post_init__(self):
        om = [[Q(x) for x in row] for row in self.omega]
        d = len(om)
        if d == 0 or d % 2 or any(len(row) != d for row in om):
            raise ValueError("omega must be a square matrix of even size")
        for i in range(d):
            for j in range(d):
                if om[i][j] != -om[j][i]:
                    raise ValueError("omega must be antisymmetric")
        self.omega = om
        self.dim = d
        self.omega_inv = _inverse(om)
        if self.base not in ("poly", "trig"):
            raise ValueError(f"unknown base kind {self.base!r}")
        if self.christoffel:
            self.christoffel = self._symmetrize(self.christoffel)
        else:
            self.christoffel = None
        self._kernel_cache: dict = {}
        edges = []
        for i in range(d):
            for j in range(d):
                w = self.omega_inv[i][j]
                if w:
                    edges.append((i, j, w))
        self._edges = tuple(edges)

    def _symmetrize(self, table: Mapping) -> dict:
        fn_type = PolyFn if self.base == "poly" else TrigFn
        out: dict = {}
        for idx, fn in table.items():
            idx = tuple(int(v) for v in idx)
            if len(idx) != 3 or any(not 0 <= v < self.dim for v in idx):
                raise ValueError(f"bad christoffel index {idx}")
            if not isinstance(fn, fn_type):
                fn = fn_type.constant(self.dim, fn)
            if fn.dim != self.dim:
                raise ValueError("christoffel coefficient has wrong dimension")
            key = tuple(sorted(idx))
            if key in out and out[key] != fn:
                raise ValueError(f"christoffel symbols at {key} are not totally symmetric")
            out[key] = fn
        return {k: v for k, v in out.items() if v}

    @property
    def is_flat_connection(self) -> bool:
        return self.christoffel is None

    def space(self) -> BaseSpace:
        return PolySpace(self.dim) if self.base == "poly" else TrigSpace(self.dim)

    def gamma(self, i: int, j: int, k: int):
        if not self.christoffel:
            return None
        return self.christoffel.get(tuple(sorted((i, j, k))))

    def kernel(self, alpha: tuple, beta: tuple) -> tuple:
        """All terms of y^alpha o y^beta as ``(k, gamma, coeff)``."""
        key = (alpha, beta)
        hit = self._kernel_cache.get(key)
        if hit is not None:
            return hit
        d = self.dim
        edges = self._edges
        out: dict = {}

        def rec(e, rows, cols, k, weight):
            if e == len(edges):
                c = weight
                for i in range(d):
                    r = rows[i]
                    if r:
                        c = c * _falling(alpha[i], r)
                    cc = cols[i]
                    if cc:
                        c = c * _falling(beta[i], cc)
                gam = tuple(alpha[i] - rows[i] + beta[i] - cols[i] for i in range(d))
                ok = (k, gam)
                out[ok] = out.get(ok, ZERO) + _neg_half_i_pow(k) * c
                return
            i, j, w = edges[e]
            m = 0
            wm = gmpy2.mpq(1)
            while rows[i] + m <= alpha[i] and cols[j] + m <= beta[j]:
                rows[i] += m
                cols[j] += m
                rec(e + 1, rows, cols, k + m, weight * wm / factorial(m))
                rows[i] -= m
                cols[j] -= m
                m += 1
                wm = wm * w

        rec(0, [0] * d, [0] * d, 0, gmpy2.mpq(1))
        res = tuple((k, gam, c) for (k, gam), c in sorted(out.items()) if c)
        self._kernel_cache[key] = res
        return res

    def to_json(self) -> dict:
        from .scalars import format_rational

        obj = {
            "dim": self.dim,
            "base": self.base,
            "omega": [[format_rational(x) for x in row] for row in self.omega],
        }
        if self.christoffel:
            obj["christoffel"] = [
                {"index": list(k), "coeff": fn.to_json()} for k, fn in sorted(self.christoffel.items())
            ]
        return obj

    @classmethod
    def from_json(cls, obj) -> "SymplecticData":
        from .scalars import parse_rational

        try:
            base = obj.get("base", "trig")
            om = [[parse_rational(x) for x in row] for row in obj["omega"]]
            dim = int(obj.get("dim", len(om)))
            if dim != len(om):
                raise ValueError("dim does not match omega")
            fn_type = PolyFn if base == "poly" else TrigFn
            ch = None
            if obj.get("christoffel"):
                ch = {tuple(r["index"]): fn_type.from_json(dim, r["coeff"]) for r in obj["christoffel"]}
        except (KeyError, TypeError, AttributeError) as exc:
            raise ValueError(f"malformed symplectic record: {exc}") from exc
        return cls(om, ch, base)


def _falling(n: int, r: int) -> int:
    out = 1
    for t in range(r):
        out *= n - t
    return out


_NHI_POWERS = [ONE]


def _neg_half_i_pow(k: int) -> GaussRational:
    while len(_NHI_POWERS) <= k:
        _NHI_POWERS.append(_NHI_POWERS[-1] * _NEG_HALF_I)
    return _NHI_POWERS[k]


class WeylSection:
    """A finite sum of monomials hbar^k c y^alpha dx^tau, truncated at Fedosov
    degree ``order`` (``None`` means no truncation)."""

    __slots__ = ("dim", "space", "terms", "order")

    def __init__(self, dim: int, space: BaseSpace, terms: Mapping | None = None, order: int | None = None):
        self.dim = dim
        self.space = space
        self.order = order
        clean: dict = {}
        for key, c in (terms or {}).items():
            if not c:
                continue
            if order is not None and fedosov_degree(key) > order:
                continue
            clean[key] = c
        self.terms = clean

    @classmethod
    def _raw(cls, dim, space, terms, order):
        obj = object.__new__(cls)
        obj.dim = dim
        obj.space = space
        obj.terms = terms
        obj.order = order
        return obj

    # constructors -----------------------------------------------------------
    @classmethod
    def zero(cls, dim: int, space: BaseSpace, order=None) -> "WeylSection":
        return cls._raw(dim, space, {}, order)

    @classmethod
    def monomial(cls, dim, space, k=0, alpha=None, tau=(), base=None, coeff=ONE, order=None):
        alpha = tuple(alpha) if alpha is not None else (0,) * dim
        base = tuple(base) if base is not None else space.unit_key()
        return cls(dim, space, {(k, alpha, tuple(tau), base): as_gauss(coeff)}, order)

    @classmethod
    def y(cls, dim, space, i: int, order=None) -> "WeylSection":
        alpha = [0] * dim
        alpha[i] = 1
        return cls.monomial(dim, space, alpha=alpha, order=order)

    @classmethod
    def dx(cls, dim, space, i: int, order=None) -> "WeylSection":
        return cls.monomial(dim, space, tau=(i,), order=order)

    @classmethod
    def from_function(cls, dim, space, f, order=None) -> "WeylSection":
        """Lift a base function (or an hbar-series of them) with no y or dx."""
        zero_a = (0,) * dim
        terms: dict = {}
        if isinstance(f, HbarSeries):
            for k, fk in enumerate(f.coeffs):
                for b, c in fk.terms.items():
                    terms[(k, zero_a, (), b)] = c
        else:
            for b, c in f.terms.items():
                terms[(0, zero_a, (), b)] = c
        return cls(dim, space, terms, order)

    # arithmetic -------------------------------------------------------------
    def _check(self, other: "WeylSection"):
        if not isinstance(other, WeylSection):
            raise TypeError("expected a WeylSection")
        if other.dim != self.dim or other.space != self.space:
            raise ValueError("Weyl sections over different bundles")

    def _join_order(self, other):
        if self.order is None:
            return other.order
        if other.order is None:
            return self.order
        return min(self.order, other.order)

    def __add__(self, other):
        self._check(other)
        out = dict(self.terms)
        for key, c in other.terms.items():
            v = out.get(key)
            out[key] = c if v is None else v + c
        return WeylSection(self.dim, self.space, out, self._join_order(other))

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return WeylSection._raw(self.dim, self.space, {k: -c for k, c in self.terms.items()}, self.order)

    def scale(self, c) -> "WeylSection":
        c = as_gauss(c)
        return WeylSection(self.dim, self.space, {k: v * c for k, v in self.terms.items()}, self.order)

    def __mul__(self, c):
        return self.scale(c)

    __rmul__ = __mul__

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, WeylSection):
            return NotImplemented
        return self.dim == other.dim and self.space == other.space and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self):
        return f"WeylSection(dim={self.dim}, order={self.order}, terms={len(self.terms)})"

    # bookkeeping ------------------------------------------------------------
    def truncate(self, order: int | None) -> "WeylSection":
        if order is None:
            return WeylSection._raw(self.dim, self.space, dict(self.terms), self.order)
        new = order if self.order is None else min(order, self.order)
        return WeylSection(self.dim, self.space, self.terms, new)

    def with_order(self, order: int | None) -> "WeylSection":
        """Same terms (dropping those above ``order``) with the given order."""
        return WeylSection(self.dim, self.space, self.terms, order)

    def homogeneous(self, degree: int) -> "WeylSection":
        return WeylSection._raw(
            self.dim,
            self.space,
            {k: c for k, c in self.terms.items() if fedosov_degree(k) == degree},
            self.order,
        )

    def degrees(self) -> list:
        return sorted({fedosov_degree(k) for k in self.terms})

    def min_degree(self):
        return min((fedosov_degree(k) for k in self.terms), default=None)

    def form_part(self, q: int) -> "WeylSection":
        return WeylSection._raw(
            self.dim, self.space, {k: c for k, c in self.terms.items() if len(k[2]) == q}, self.order
        )

    def form_degrees(self) -> list:
        return sorted({len(k[2]) for k in self.terms})

    def bidegree_part(self, p: int, q: int) -> "WeylSection":
        return WeylSection._raw(
            self.dim,
            self.space,
            {k: c for k, c in self.terms.items() if sum(k[1]) == p and len(k[2]) == q},
            self.order,
        )

    def center(self) -> HbarSeries:
        """The projection sigma: keep terms with no y and no dx."""
        zero_a = (0,) * self.dim
        by_k: dict = {}
        for (k, a, t, b), c in self.terms.items():
            if t or a != zero_a:
                continue
            by_k.setdefault(k, {})[b] = c
        K = self.order // 2 if self.order is not None else max(by_k, default=0)
        coeffs = [self.space.to_fn(by_k.get(k, {})) for k in range(K + 1)]
        return HbarSeries(coeffs, K, self.space.to_fn({}))

    def substitute(self, matrix) -> "WeylSection":
        """Linear change of fiber variables: y_i -> sum_j matrix[i][j] y_j."""
        mat = [[Q(x) for x in row] for row in matrix]
        d = self.dim
        lin = []
        for i in range(d):
            lin.append({tuple(int(t == j) for t in range(d)): as_gauss(mat[i][j]) for j in range(d) if mat[i][j]})
        cache: dict = {}

        def power(alpha):
            hit = cache.get(alpha)
            if hit is not None:
                return hit
            poly = {(0,) * d: ONE}
            for i, e in enumerate(alpha):
                for _ in range(e):
                    nxt: dict = {}
                    for m1, c1 in poly.items():
                        for m2, c2 in lin[i].items():
                            m = add_keys(m1, m2)
                            nxt[m] = nxt.get(m, ZERO) + c1 * c2
                    poly = {m: c for m, c in nxt.items() if c}
            cache[alpha] = poly
            return poly

        out: dict = {}
        for (k, a, t, b), c in self.terms.items():
            for m, cm in power(a).items():
                key = (k, m, t, b)
                out[key] = out.get(key, ZERO) + c * cm
        return WeylSection(d, self.space, out, self.order)

    def map_base(self, fn) -> "WeylSection":
        """Apply ``fn(basekey) -> [(coeff, basekey)]`` to every base coefficient."""
        out: dict = {}
        for (k, a, t, b), c in self.terms.items():
            for cb, nb in fn(b):
                key = (k, a, t, nb)
                out[key] = out.get(key, ZERO) + c * cb
        return WeylSection(self.dim, self.space, out, self.order)

    # serialization ----------------------------------------------------------
    def to_json(self) -> list:
        grouped: dict = {}
        for (k, a, t, b), c in self.terms.items():
            grouped.setdefault((k, a, t), {})[b] = c
        rows = []
        for (k, a, t) in sorted(grouped):
            fn = self.space.to_fn(grouped[(k, a, t)])
            rows.append({"hbar": k, "y": list(a), "dx": [i + 1 for i in t], "coeff": fn.to_json()})
        return rows

    @classmethod
    def from_json(cls, rows, dim: int, space: BaseSpace, order=None) -> "WeylSection":
        fn_type = PolyFn if space.kind == "poly" else TrigFn
        terms: dict = {}
        try:
            for row in rows:
                k = int(row["hbar"])
                a = tuple(int(v) for v in row["y"])
                t = tuple(sorted(int(v) - 1 for v in row["dx"]))
                if len(a) != dim or len(set(t)) != len(t) or any(not 0 <= v < dim for v in t):
                    raise ValueError(f"bad monomial record {row!r}")
                if k < 0 or any(v < 0 for v in a):
                    raise ValueError(f"negative exponent in {row!r}")
                fn = fn_type.from_json(space.key_dim, row["coeff"])
                for b, c in fn.terms.items():
                    key = (k, a, t, b)
                    terms[key] = terms.get(key, ZERO) + c
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed Weyl section: {exc}") from exc
        return cls(dim, space, terms, order)


def _product(a: WeylSection, b: WeylSection, s: SymplecticData, order, graded_sign: bool) -> dict:
    mul = a.space.mul
    kern = s.kernel
    out: dict = {}
    by_ab: dict = {}
    for key2, c2 in b.terms.items():
        by_ab.setdefault(key2[1], []).append((key2, c2))
    for (k1, a1, t1, b1), c1 in a.terms.items():
        d1 = 2 * k1 + sum(a1)
        for a2, rows2 in by_ab.items():
            if order is not None and d1 + sum(a2) > order:
                continue
            kt = None
            for (k2, _, t2, b2), c2 in rows2:
                if order is not None and d1 + 2 * k2 + sum(a2) > order:
                    continue
                sg = wedge_sign(t1, t2)
                if not sg:
                    continue
                if graded_sign and (len(t1) * len(t2)) & 1:
                    sg = -sg
                if kt is None:
                    kt = kern(a1, a2)
                t = _merge(t1, t2)
                bb = mul(b1, b2)
                base_c = c1 * c2
                if sg < 0:
                    base_c = -base_c
                kk = k1 + k2
                for k, gam, ck in kt:
                    key = (kk + k, gam, t, bb)
                    v = base_c * ck
                    old = out.get(key)
                    out[key] = v if old is None else old + v
    return out


def circ(a: WeylSection, b: WeylSection, s: SymplecticData, order: int | None = None) -> WeylSection:
    """The fiberwise product a o b; truncates at ``order`` or the smaller input order."""
    a._check(b)
    if a.dim != s.dim:
        raise ValueError(f"section dimension {a.dim} does not match symplectic dimension {s.dim}")
    if order is None:
        order = a._join_order(b)
    return WeylSection(a.dim, a.space, _product(a, b, s, order, False), order)


def graded_bracket(a: WeylSection, b: WeylSection, s: SymplecticData, order: int | None = None) -> WeylSection:
    """[a, b] = a o b - (-1)^{|a||b|} b o a with |.| the form degree, termwise."""
    a._check(b)
    if a.dim != s.dim:
        raise ValueError("dimension mismatch")
    if order is None:
        order = a._join_order(b)
    out = _product(a, b, s, order, False)
    for key, c in _product(b, a, s, order, True).items():
        old = out.get(key)
        out[key] = -c if old is None else old - c
    return WeylSection(a.dim, a.space, out, order)


def divide_hbar(a: WeylSection) -> WeylSection:
    """Exact division by hbar; raises if a nonzero hbar^0 term is present."""
    out = {}
    for (k, al, t, b), c in a.terms.items():
        if k == 0:
            raise DivisibilityError(f"term y^{al} dx^{t} at hbar^0 is not divisible by hbar")
        out[(k - 1, al, t, b)] = c
    order = None if a.order is None else a.order - 2
    return WeylSection(a.dim, a.space, out, order)


def i_over_hbar_bracket(x: WeylSection, a: WeylSection, s: SymplecticData, order: int | None = None) -> WeylSection:
    """(i/hbar)[x, a] truncated at ``order`` (default: the smaller input order)."""
    if order is None:
        order = x._join_order(a)
    br = graded_bracket(x, a, s, None if order is None else order + 2)
    return divide_hbar(br).scale(I).with_order(order)


def i_over_hbar(a: WeylSection, order: int | None = None) -> WeylSection:
    res = divide_hbar(a).scale(I)
    return res.with_order(order if order is not None else res.order)


def delta(a: WeylSection) -> WeylSection:
    """delta a = dx^i ^ d a / d y^i."""
    out: dict = {}
    for (k, al, t, b), c in a.terms.items():
        for i, e in enumerate(al):
            if not e or i in t:
                continue
            sg = -1 if sum(1 for v in t if v < i) & 1 else 1
            na = al[:i] + (e - 1,) + al[i + 1:]
            key = (k, na, _merge((i,), t), b)
            v = c * (e * sg)
            out[key] = out.get(key, ZERO) + v
    return WeylSection(a.dim, a.space, out, a.order)


def delta_star(a: WeylSection) -> WeylSection:
    """delta* a = y^k i(d/dx^k) a."""
    out: dict = {}
    for (k, al, t, b), c in a.terms.items():
        for pos, i in enumerate(t):
            sg = -1 if pos & 1 else 1
            na = al[:i] + (al[i] + 1,) + al[i + 1:]
            key = (k, na, t[:pos] + t[pos + 1:], b)
            out[key] = out.get(key, ZERO) + (c if sg > 0 else -c)
    return WeylSection(a.dim, a.space, out, None if a.order is None else a.order + 1)


def delta_inv(a: WeylSection) -> WeylSection:
    """delta^{-1} a_{pq} = delta* a_{pq} / (p + q), zero on a_{00}."""
    out: dict = {}
    for (k, al, t, b), c in a.terms.items():
        q = len(t)
        if not q:
            continue
        p = sum(al)
        w = Q(1, p + q)
        for pos, i in enumerate(t):
            na = al[:i] + (al[i] + 1,) + al[i + 1:]
            key = (k, na, t[:pos] + t[pos + 1:], b)
            v = c * (-w if pos & 1 else w)
            out[key] = out.get(key, ZERO) + v
    return WeylSection(a.dim, a.space, out, None if a.order is None else a.order + 1)


def exterior_d(a: WeylSection) -> WeylSection:
    """d a = dx^j ^ d a / d x^j acting on the base coefficients."""
    space = a.space
    out: dict = {}
    for (k, al, t, b), c in a.terms.items():
        for j in range(space.leaf_dim):
            if j in t:
                continue
            ders = space.derive(b, j)
            if not ders:
                continue
            sg = -1 if sum(1 for v in t if v < j) & 1 else 1
            nt = _merge((j,), t)
            for cd, nb in ders:
                key = (k, al, nt, nb)
                v = c * cd
                out[key] = out.get(key, ZERO) + (v if sg > 0 else -v)
    return WeylSection(a.dim, a.space, out, a.order)


def gamma_section(s: SymplecticData, space: BaseSpace | None = None) -> WeylSection | None:
    """Gamma = 1/2 Gamma_{ijk} y^i y^j dx^k, or ``None`` for the flat connection."""
    if s.christoffel is None:
        return None
    space = space or s.space()
    d = s.dim
    terms: dict = {}
    for i, j in combinations_with_replacement(range(d), 2):
        alpha = tuple((t == i) + (t == j) for t in range(d))
        w = Q(1, 2) if i == j else Q(1)
        for k in range(d):
            fn = s.gamma(i, j, k)
            if fn is None:
                continue
            for b, c in fn.terms.items():
                key = (0, alpha, (k,), b)
                terms[key] = terms.get(key, ZERO) + c * w
    return WeylSection(d, space, terms, None)


def connection(a: WeylSection, s: SymplecticData, gamma: WeylSection | None = None, order=None) -> WeylSection:
    """The symplectic connection  da + (i/hbar)[Gamma, a]."""
    if order is None:
        order = a.order
    out = exterior_d(a).with_order(order)
    if gamma is None:
        gamma = gamma_section(s, a.space)
    if gamma is not None:
        out = out + i_over_hbar_bracket(gamma, a, s, order)
    return out


def curvature(s: SymplecticData, space: BaseSpace | None = None) -> WeylSection:
    """R = d Gamma + (i/hbar) Gamma o Gamma; zero for the flat connection."""
    space = space or s.space()
    gam = gamma_section(s, space)
    if gam is None:
        return WeylSection.zero(s.dim, space)
    sq = circ(gam, gam, s, None)
    return (exterior_d(gam) + i_over_hbar(sq)).with_order(None)

