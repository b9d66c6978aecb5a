"""Strict deformation of torus algebras and of the crossed product C(T^n) x Z^k.

Modes multiply through the bicharacter

    e_p * e_q = c(p, q) e_{p+q},    c(p, q) = exp(-(i hbar / 2) <p, J q>).

In strict mode hbar is a rational number and c(p, q) is stored exactly as the
formal phase e^{i r} with r = -hbar <p, J q> / 2.  In formal mode c(p, q) is
the exponential series truncated at hbar^order.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import factorial
from typing import Mapping

from .scalars import ONE, GaussRational, HbarSeries, PhaseScalar, Q, Rational

__all__ = [
    "RieffelAlgebra",
    "RieffelElement",
    "CrossedDiracAlgebra",
    "CrossedElement",
    "pointwise_product",
    "rieffel_star",
    "rieffel_involution",
    "semiclassical_slope",
    "crossed_dirac_star",
    "l1_surrogate",
]


@dataclass(eq=False)
class RieffelAlgebra:
    """Deformed torus algebra for an antisymmetric J.

    ``hbar`` is a rational number (strict mode) or ``None`` (formal mode, with
    series truncated at ``order``).
    """

    n: int
    J: list
    hbar: object = None
    order: int = 3
    _J: tuple = field(init=False, repr=False)

    def __post_init__(self):
        J = [[Q(x) for x in row] for row in self.J]
        if len(J) != self.n or any(len(r) != self.n for r in J):
            raise ValueError("J has the wrong shape")
        for i in range(self.n):
            for j in range(self.n):
                if J[i][j] != -J[j][i]:
                    raise ValueError("J must be antisymmetric")
        self.J = J
        self._J = tuple(tuple(r) for r in J)
        if self.hbar is not None:
            if isinstance(self.hbar, float):
                raise TypeError("strict hbar must be an exact rational")
            self.hbar = Q(self.hbar)

    @property
    def strict(self) -> bool:
        return self.hbar is not None

    def form(self, p, q) -> Rational:
        """<p, J q>."""
        return sum((self._J[i][j] * p[i] * q[j] for i in range(self.n) for j in range(self.n) if self._J[i][j]), Q(0))

    def zero_coeff(self):
        if self.strict:
            return PhaseScalar()
        return HbarSeries([], self.order)

    def one_coeff(self):
        if self.strict:
            return PhaseScalar.constant(ONE)
        return HbarSeries([ONE], self.order)

    def phase_exponent(self, p, q) -> Rational:
        """Exponent r with c(p, q) = e^{i r} (strict mode)."""
        return -self.hbar * self.form(p, q) / 2

    def bicharacter(self, p, q):
        if self.strict:
            return PhaseScalar.phase(self.phase_exponent(p, q))
        s = self.form(p, q)
        base = GaussRational(0, -s / 2)
        coeffs = []
        term = ONE
        for k in range(self.order + 1):
            coeffs.append(term * Q(1, factorial(k)))
            term = term * base
        return HbarSeries(coeffs, self.order)

    def element(self, data: Mapping) -> "RieffelElement":
        return RieffelElement(self, data)

    def mode(self, p, coeff=None) -> "RieffelElement":
        c = self.one_coeff() if coeff is None else self._coerce(coeff)
        return RieffelElement(self, {tuple(p): c})

    def _coerce(self, c):
        if self.strict:
            return c if isinstance(c, PhaseScalar) else PhaseScalar.constant(c)
        return c if isinstance(c, HbarSeries) else HbarSeries([c], self.order)


def _is_zero(c) -> bool:
    return not c


class RieffelElement:
    """Finitely supported map  mode -> coefficient  (PhaseScalar or HbarSeries)."""

    __slots__ = ("algebra", "terms")

    def __init__(self, algebra: RieffelAlgebra, data: Mapping | None = None):
        self.algebra = algebra
        clean = {}
        for p, c in (data or {}).items():
            p = tuple(int(x) for x in p)
            if len(p) != algebra.n:
                raise ValueError("mode has the wrong length")
            c = algebra._coerce(c)
            if not _is_zero(c):
                clean[p] = clean[p] + c if p in clean else c
        self.terms = {p: c for p, c in clean.items() if not _is_zero(c)}

    def __add__(self, other):
        out = dict(self.terms)
        for p, c in other.terms.items():
            out[p] = out[p] + c if p in out else c
        return RieffelElement(self.algebra, out)

    def __neg__(self):
        return RieffelElement(self.algebra, {p: -c for p, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        return RieffelElement(self.algebra, {p: v * c for p, v in self.terms.items()})

    def __eq__(self, other):
        if not isinstance(other, RieffelElement):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        return f"RieffelElement({len(self.terms)} modes)"

    def to_json(self) -> list:
        rows = []
        for p in sorted(self.terms):
            c = self.terms[p]
            rec = c.to_json() if self.algebra.strict else {"series": [x.to_json() for x in c.coeffs]}
            rows.append({"mode": list(p), "coeff": rec})
        return rows

    @classmethod
    def from_json(cls, algebra: RieffelAlgebra, rows) -> "RieffelElement":
        data: dict = {}
        try:
            for row in rows:
                p = tuple(int(x) for x in row["mode"])
                rec = row["coeff"]
                if isinstance(rec, Mapping) and "phase" in rec:
                    if not algebra.strict:
                        raise ValueError("phase coefficients need a strict (rational hbar) algebra")
                    c = PhaseScalar.from_json(rec)
                elif isinstance(rec, Mapping) and "series" in rec:
                    if algebra.strict:
                        raise ValueError("series coefficients need a formal algebra")
                    c = HbarSeries([GaussRational.from_json(x) for x in rec["series"]], algebra.order)
                else:
                    c = algebra._coerce(GaussRational.from_json(rec))
                data[p] = data[p] + c if p in data else c
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed Rieffel element: {exc}") from exc
        return cls(algebra, data)


def rieffel_star(f: RieffelElement, g: RieffelElement, A: RieffelAlgebra | None = None) -> RieffelElement:
    A = A or f.algebra
    if f.algebra is not A or g.algebra is not A:
        raise ValueError("elements belong to different algebras")
    out: dict = {}
    for p, cp in f.terms.items():
        for q, cq in g.terms.items():
            r = tuple(a + b for a, b in zip(p, q))
            v = cp * cq * A.bicharacter(p, q)
            out[r] = out[r] + v if r in out else v
    return RieffelElement(A, out)


def rieffel_involution(f: RieffelElement) -> RieffelElement:
    """(sum c_p e_p)^* = sum conj(c_p) e_{-p}."""
    return RieffelElement(f.algebra, {tuple(-x for x in p): c.conj() for p, c in f.terms.items()})


def pointwise_product(f: RieffelElement, g: RieffelElement) -> RieffelElement:
    out: dict = {}
    for p, cp in f.terms.items():
        for q, cq in g.terms.items():
            r = tuple(a + b for a, b in zip(p, q))
            v = cp * cq
            out[r] = out[r] + v if r in out else v
    return RieffelElement(f.algebra, out)


def semiclassical_slope(p, q, A: RieffelAlgebra) -> Rational:
    """hbar^1 coefficient of the exponent of c(p, q), checked against the bracket.

    Asserts the slope is -<p, J q>/2 and that the hbar^1 coefficient of
    e_p * e_q - e_p e_q equals (i/2) times the mode coefficient of
    {e_p, e_q} = sum J_{jk} (i p_j)(i q_k).
    """
    if A.strict:
        raise ValueError("the slope is computed in formal mode")
    p, q = tuple(p), tuple(q)
    series = A.bicharacter(p, q)
    # the exponent is linear in hbar, so its hbar^1 coefficient is -i times
    # the hbar^1 coefficient of the series
    slope_c = series[1] * GaussRational(0, -1)
    if slope_c.im:
        raise AssertionError("exponent slope is not real")
    slope = slope_c.re
    expected = -A.form(p, q) / 2
    if slope != expected:
        raise AssertionError(f"slope {slope} differs from -<p,Jq>/2 = {expected}")
    bracket = -A.form(p, q)
    first = series[1]
    if first != GaussRational(0, Q(1, 2)) * bracket:
        raise AssertionError("hbar^1 term differs from (i/2){e_p, e_q}")
    return slope


def l1_surrogate(f: RieffelElement) -> Rational:
    """sum_p |c_p| majorant (re/im l1); a surrogate, not the C*-norm."""
    total = Q(0)
    for c in f.terms.values():
        if isinstance(c, PhaseScalar):
            total += c.l1()
        else:
            total += sum((abs(x.re) + abs(x.im) for x in c.coeffs), Q(0))
    return total


@dataclass(eq=False)
class CrossedDiracAlgebra:
    """C(T^{n-k}) x Z^k with Z^k acting by translations x -> x + Theta m.

    ``theta`` is the (n-k) x k matrix of rational translation angles (in
    radians, so phases e^{i <p, Theta m>} are formal).  ``linear`` optionally
    gives integral linear parts per generator; these must be the identity for
    the action to commute with the torus translations.
    """

    base: RieffelAlgebra
    k: int
    theta: list
    linear: list | None = None

    def __post_init__(self):
        if not self.base.strict:
            raise ValueError("the crossed Dirac algebra uses a strict base algebra")
        m = self.base.n
        th = [[Q(x) for x in row] for row in self.theta]
        if len(th) != m or any(len(r) != self.k for r in th):
            raise ValueError("theta must be an (n-k) x k matrix")
        self.theta = th
        if self.linear is not None:
            ident = [[int(i == j) for j in range(m)] for i in range(m)]
            for L in self.linear:
                if [[int(x) for x in row] for row in L] != ident:
                    raise ValueError("the Z^k action does not commute with the torus translations")

    @property
    def n(self) -> int:
        return self.base.n + self.k

    def shift(self, p, m) -> Rational:
        """<p, Theta m>."""
        return sum((p[i] * self.theta[i][j] * m[j] for i in range(self.base.n) for j in range(self.k)), Q(0))

    def element(self, data: Mapping) -> "CrossedElement":
        return CrossedElement(self, data)

    def basis(self, m, p, coeff=ONE) -> "CrossedElement":
        return CrossedElement(self, {(tuple(m), tuple(p)): PhaseScalar.constant(coeff)})


class CrossedElement:
    """Finitely supported map  (m in Z^k, p in Z^{n-k}) -> PhaseScalar."""

    __slots__ = ("algebra", "terms")

    def __init__(self, algebra: CrossedDiracAlgebra, data: Mapping | None = None):
        self.algebra = algebra
        clean: dict = {}
        for (m, p), c in (data or {}).items():
            m = tuple(int(x) for x in m)
            p = tuple(int(x) for x in p)
            if len(m) != algebra.k or len(p) != algebra.base.n:
                raise ValueError("crossed element key has the wrong shape")
            if not isinstance(c, PhaseScalar):
                c = PhaseScalar.constant(c)
            if c:
                clean[(m, p)] = clean[(m, p)] + c if (m, p) in clean else c
        self.terms = {k: c for k, c in clean.items() if c}

    def __add__(self, other):
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out[k] + c if k in out else c
        return CrossedElement(self.algebra, out)

    def __neg__(self):
        return CrossedElement(self.algebra, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        return CrossedElement(self.algebra, {k: v * c for k, v in self.terms.items()})

    def __eq__(self, other):
        if not isinstance(other, CrossedElement):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def support(self) -> list:
        return sorted({m for m, _ in self.terms})

    def to_json(self) -> list:
        return [
            {"shift": list(m), "mode": list(p), "coeff": self.terms[(m, p)].to_json()} for m, p in sorted(self.terms)
        ]


def crossed_dirac_star(f: CrossedElement, g: CrossedElement) -> CrossedElement:
    """(f * g)(c) = sum_{a + b = c} b^*(f(a)) *_{hbar J} g(b)."""
    A = f.algebra
    if g.algebra is not A:
        raise ValueError("elements belong to different algebras")
    base = A.base
    out: dict = {}
    for (a, p), cp in f.terms.items():
        for (b, q), cq in g.terms.items():
            r = base.phase_exponent(p, q) + A.shift(p, b)
            key = (tuple(x + y for x, y in zip(a, b)), tuple(x + y for x, y in zip(p, q)))
            v = cp * cq * PhaseScalar.phase(r)
            out[key] = out[key] + v if key in out else v
    return CrossedElement(A, out)

