"""Exact scalar rings: rationals, Gaussian rationals, formal phases and
truncated power series in hbar.

Nothing here touches floating point.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Callable, Iterable, Mapping

import gmpy2

__all__ = [
    "Rational",
    "Q",
    "GaussRational",
    "I",
    "ONE",
    "ZERO",
    "PhaseScalar",
    "HbarSeries",
    "as_gauss",
    "format_rational",
    "parse_rational",
]

Rational = type(gmpy2.mpq())


def Q(value=0, den=None) -> Rational:
    """Build an exact rational from an int, a ``"p/q"`` string, a Fraction or a pair."""
    if den is not None:
        return gmpy2.mpq(value, den)
    if isinstance(value, Rational):
        return value
    if isinstance(value, Fraction):
        return gmpy2.mpq(value.numerator, value.denominator)
    if isinstance(value, float):
        raise TypeError("floating point values are not accepted as exact rationals")
    return gmpy2.mpq(value)


def format_rational(q) -> str:
    q = Q(q)
    return f"{q.numerator}/{q.denominator}"


def parse_rational(text) -> Rational:
    if isinstance(text, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(text, int):
        return gmpy2.mpq(text)
    if not isinstance(text, str):
        raise TypeError(f"expected a rational string, got {type(text).__name__}")
    try:
        return gmpy2.mpq(text.strip())
    except ValueError as exc:
        raise ValueError(f"malformed rational {text!r}") from exc


_ZQ = gmpy2.mpq(0)


class GaussRational:
    """An element re + i*im of Q(i)."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re if isinstance(re, Rational) else Q(re)
        self.im = im if isinstance(im, Rational) else Q(im)

    @classmethod
    def _raw(cls, re, im) -> "GaussRational":
        obj = object.__new__(cls)
        obj.re = re
        obj.im = im
        return obj

    def __add__(self, other):
        if not isinstance(other, GaussRational):
            other = as_gauss(other)
        return GaussRational._raw(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, GaussRational):
            other = as_gauss(other)
        return GaussRational._raw(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return as_gauss(other) - self

    def __neg__(self):
        return GaussRational._raw(-self.re, -self.im)

    def __mul__(self, other):
        if isinstance(other, GaussRational):
            a, b, c, d = self.re, self.im, other.re, other.im
            if not b:
                return GaussRational._raw(a * c, a * d)
            if not d:
                return GaussRational._raw(a * c, b * c)
            return GaussRational._raw(a * c - b * d, a * d + b * c)
        if isinstance(other, (int, Rational, Fraction)):
            other = Q(other)
            return GaussRational._raw(self.re * other, self.im * other)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, GaussRational):
            other = as_gauss(other)
        n = other.re * other.re + other.im * other.im
        if not n:
            raise ZeroDivisionError("division by zero in Q(i)")
        return self * GaussRational._raw(other.re / n, -other.im / n)

    def __rtruediv__(self, other):
        return as_gauss(other) / self

    def __pow__(self, k: int):
        if k < 0:
            return (ONE / self) ** (-k)
        out, base = ONE, self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conj(self) -> "GaussRational":
        return GaussRational._raw(self.re, -self.im)

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        if isinstance(other, GaussRational):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Rational, Fraction)):
            return self.im == 0 and self.re == other
        return NotImplemented

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def __repr__(self):
        if not self.im:
            return f"G({self.re})"
        return f"G({self.re}, {self.im})"

    def to_json(self) -> dict:
        return {"re": format_rational(self.re), "im": format_rational(self.im)}

    @classmethod
    def from_json(cls, obj) -> "GaussRational":
        if isinstance(obj, (str, int)) and not isinstance(obj, bool):
            return cls(parse_rational(obj))
        if not isinstance(obj, Mapping):
            raise ValueError(f"malformed Gaussian rational record {obj!r}")
        return cls(parse_rational(obj.get("re", "0")), parse_rational(obj.get("im", "0")))


def as_gauss(x) -> GaussRational:
    if isinstance(x, GaussRational):
        return x
    if isinstance(x, complex):
        raise TypeError("complex floats are not exact")
    return GaussRational(Q(x), _ZQ)


ZERO = GaussRational(0, 0)
ONE = GaussRational(1, 0)
I = GaussRational(0, 1)


class PhaseScalar:
    """A finite sum  sum_r c_r e^{i r}  with rational exponents r.

    Exponents are formal: two phases are equal iff their exponent maps are.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping | None = None):
        clean = {}
        for r, c in (terms or {}).items():
            c = as_gauss(c)
            if c:
                clean[Q(r)] = c
        self.terms = clean

    @classmethod
    def phase(cls, r, coeff=ONE) -> "PhaseScalar":
        return cls({Q(r): coeff})

    @classmethod
    def constant(cls, c) -> "PhaseScalar":
        return cls({_ZQ: c})

    def __add__(self, other):
        other = _as_phase(other)
        out = dict(self.terms)
        for r, c in other.terms.items():
            out[r] = out.get(r, ZERO) + c
        return PhaseScalar(out)

    __radd__ = __add__

    def __neg__(self):
        return PhaseScalar({r: -c for r, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-_as_phase(other))

    def __rsub__(self, other):
        return _as_phase(other) - self

    def __mul__(self, other):
        if isinstance(other, (GaussRational, int, Rational, Fraction)):
            c = as_gauss(other)
            return PhaseScalar({r: v * c for r, v in self.terms.items()})
        if not isinstance(other, PhaseScalar):
            return NotImplemented
        out: dict = {}
        for r1, c1 in self.terms.items():
            for r2, c2 in other.terms.items():
                r = r1 + r2
                out[r] = out.get(r, ZERO) + c1 * c2
        return PhaseScalar(out)

    __rmul__ = __mul__

    def conj(self) -> "PhaseScalar":
        return PhaseScalar({-r: c.conj() for r, c in self.terms.items()})

    def exponents(self) -> list:
        return sorted(self.terms)

    def l1(self) -> Rational:
        """Sum of |re| + |im| over coefficients; an upper bound for the modulus."""
        return sum((abs(c.re) + abs(c.im) for c in self.terms.values()), _ZQ)

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, (GaussRational, int, Rational, Fraction)):
            other = PhaseScalar.constant(other)
        if not isinstance(other, PhaseScalar):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self):
        if not self.terms:
            return "Phase(0)"
        parts = [f"{c!r}*e^(i*{r})" for r, c in sorted(self.terms.items())]
        return "Phase(" + " + ".join(parts) + ")"

    def to_json(self) -> dict:
        return {
            "phase": [
                {"exponent": format_rational(r), "coeff": c.to_json()}
                for r, c in sorted(self.terms.items())
            ]
        }

    @classmethod
    def from_json(cls, obj) -> "PhaseScalar":
        try:
            rows = obj["phase"]
            return cls(
                {parse_rational(row["exponent"]): GaussRational.from_json(row["coeff"]) for row in rows}
            )
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed phase record {obj!r}") from exc


def _as_phase(x) -> PhaseScalar:
    if isinstance(x, PhaseScalar):
        return x
    return PhaseScalar.constant(x)


class HbarSeries:
    """A truncated series  c_0 + c_1 hbar + ... + c_K hbar^K.

    Coefficients may come from any ring whose elements support ``+``, ``-``,
    ``*`` and truthiness; ``zero`` is the additive identity of that ring.
    Products of series with different truncation orders truncate at the smaller.
    """

    __slots__ = ("coeffs", "order", "zero")

    def __init__(self, coeffs: Iterable, order: int, zero=ZERO):
        if order < 0:
            raise ValueError("truncation order must be non-negative")
        cs = list(coeffs)[: order + 1]
        cs += [zero] * (order + 1 - len(cs))
        self.coeffs = tuple(cs)
        self.order = order
        self.zero = zero

    @classmethod
    def constant(cls, c, order: int, zero=ZERO) -> "HbarSeries":
        return cls([c], order, zero)

    @classmethod
    def hbar(cls, order: int, one=ONE, zero=ZERO) -> "HbarSeries":
        return cls([zero, one], order, zero)

    def _lift(self, other) -> "HbarSeries":
        if isinstance(other, HbarSeries):
            return other
        return HbarSeries([other], self.order, self.zero)

    def __getitem__(self, k: int):
        if 0 <= k <= self.order:
            return self.coeffs[k]
        return self.zero

    def __add__(self, other):
        other = self._lift(other)
        K = min(self.order, other.order)
        return HbarSeries([self.coeffs[k] + other.coeffs[k] for k in range(K + 1)], K, self.zero)

    __radd__ = __add__

    def __neg__(self):
        return HbarSeries([-c for c in self.coeffs], self.order, self.zero)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, HbarSeries):
            return HbarSeries([c * other for c in self.coeffs], self.order, self.zero)
        K = min(self.order, other.order)
        out = []
        for k in range(K + 1):
            acc = self.zero
            for j in range(k + 1):
                a, b = self.coeffs[j], other.coeffs[k - j]
                if a and b:
                    acc = acc + a * b
            out.append(acc)
        return HbarSeries(out, K, self.zero)

    def __rmul__(self, other):
        if isinstance(other, HbarSeries):
            return other * self
        return HbarSeries([other * c for c in self.coeffs], self.order, self.zero)

    def truncate(self, order: int) -> "HbarSeries":
        return HbarSeries(self.coeffs[: order + 1], min(order, self.order), self.zero)

    def map(self, fn: Callable) -> "HbarSeries":
        return HbarSeries([fn(c) for c in self.coeffs], self.order, self.zero)

    def conj(self) -> "HbarSeries":
        return self.map(lambda c: c.conj())

    def __bool__(self):
        return any(bool(c) for c in self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, HbarSeries):
            other = self._lift(other)
        K = max(self.order, other.order)
        return all(self[k] == other[k] for k in range(K + 1))

    def __hash__(self):
        return hash(tuple(c for c in self.coeffs))

    def __repr__(self):
        body = " + ".join(f"({c!r})h^{k}" for k, c in enumerate(self.coeffs) if c)
        return f"HbarSeries[{self.order}]({body or '0'})"
