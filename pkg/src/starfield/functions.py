"""Exact function spaces on the base: polynomials on R^n and trigonometric
polynomials on the torus T^n = R^n / 2pi Z^n.

Both are stored as sparse maps from an integer vector (exponent or Fourier
mode) to a Gaussian rational.  In both cases products add the keys, so the
Weyl machinery can treat base coefficients uniformly through a
:class:`BaseSpace`.
"""
from __future__ import annotations

from typing import Iterable, Mapping

from .scalars import ZERO, GaussRational, as_gauss

__all__ = [
    "PolyFn",
    "TrigFn",
    "BaseSpace",
    "PolySpace",
    "TrigSpace",
    "LeafTrigSpace",
    "add_keys",
    "trig_derive",
    "trig_average",
]


def add_keys(a: tuple, b: tuple) -> tuple:
    return tuple(x + y for x, y in zip(a, b))


class _SparseFn:
    __slots__ = ("dim", "terms")
    key_name = "key"

    def __init__(self, dim: int, terms: Mapping | None = None):
        self.dim = dim
        clean = {}
        for k, c in (terms or {}).items():
            k = tuple(int(e) for e in k)
            if len(k) != dim:
                raise ValueError(f"key {k} has wrong length for dimension {dim}")
            self._check_key(k)
            c = as_gauss(c)
            if c:
                clean[k] = clean.get(k, ZERO) + c
        self.terms = {k: c for k, c in clean.items() if c}

    def _check_key(self, k):
        pass

    @classmethod
    def constant(cls, dim: int, c=1):
        return cls(dim, {(0,) * dim: c})

    @classmethod
    def zero(cls, dim: int):
        return cls(dim, {})

    def _same(self, other):
        if not isinstance(other, type(self)):
            other = type(self).constant(self.dim, other)
        if other.dim != self.dim:
            raise ValueError("dimension mismatch")
        return other

    def __add__(self, other):
        other = self._same(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, ZERO) + c
        return type(self)(self.dim, out)

    __radd__ = __add__

    def __neg__(self):
        return type(self)(self.dim, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._same(other))

    def __rsub__(self, other):
        return self._same(other) - self

    def __mul__(self, other):
        if not isinstance(other, _SparseFn):
            c = as_gauss(other)
            return type(self)(self.dim, {k: v * c for k, v in self.terms.items()})
        other = self._same(other)
        out: dict = {}
        for k1, c1 in self.terms.items():
            for k2, c2 in other.terms.items():
                k = add_keys(k1, k2)
                out[k] = out.get(k, ZERO) + c1 * c2
        return type(self)(self.dim, out)

    def __rmul__(self, other):
        return self * other

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, (int, GaussRational)) or type(other).__name__ == "mpq":
            other = type(self).constant(self.dim, other)
        if not isinstance(other, type(self)):
            return NotImplemented
        return self.dim == other.dim and self.terms == other.terms

    def __hash__(self):
        return hash((type(self).__name__, self.dim, frozenset(self.terms.items())))

    def coefficient(self, key) -> GaussRational:
        return self.terms.get(tuple(key), ZERO)

    def items(self):
        return sorted(self.terms.items())

    def __repr__(self):
        body = ", ".join(f"{k}: {c!r}" for k, c in self.items())
        return f"{type(self).__name__}({self.dim}, {{{body}}})"

    def to_json(self) -> list:
        return [{self.key_name: list(k), "coeff": c.to_json()} for k, c in self.items()]

    @classmethod
    def from_json(cls, dim: int, rows: Iterable):
        terms: dict = {}
        for row in rows:
            try:
                k = tuple(row[cls.key_name])
                c = GaussRational.from_json(row["coeff"])
            except (KeyError, TypeError) as exc:
                raise ValueError(f"malformed {cls.__name__} record {row!r}") from exc
            terms[k] = terms.get(k, ZERO) + c
        return cls(dim, terms)


class PolyFn(_SparseFn):
    """Polynomial sum_alpha c_alpha x^alpha on R^n."""

    __slots__ = ()
    key_name = "exponent"

    def _check_key(self, k):
        if any(e < 0 for e in k):
            raise ValueError(f"negative polynomial exponent {k}")

    @classmethod
    def variable(cls, dim: int, j: int, c=1):
        """The coordinate c * x^j with 0-based axis j."""
        key = [0] * dim
        key[j] = 1
        return cls(dim, {tuple(key): c})

    def derive(self, j: int) -> "PolyFn":
        out = {}
        for k, c in self.terms.items():
            if k[j]:
                nk = list(k)
                nk[j] -= 1
                out[tuple(nk)] = c * k[j]
        return PolyFn(self.dim, out)

    def degree(self) -> int:
        return max((sum(k) for k in self.terms), default=0)


class TrigFn(_SparseFn):
    """Trigonometric polynomial sum_k c_k e^{i<k,x>} on T^n = R^n / 2pi Z^n."""

    __slots__ = ()
    key_name = "mode"

    @classmethod
    def mode(cls, k: Iterable[int], c=1):
        k = tuple(k)
        return cls(len(k), {k: c})

    def derive(self, j: int) -> "TrigFn":
        return TrigFn(self.dim, {k: c * GaussRational(0, k[j]) for k, c in self.terms.items()})

    def average(self) -> GaussRational:
        return self.terms.get((0,) * self.dim, ZERO)

    def conj(self) -> "TrigFn":
        return TrigFn(self.dim, {tuple(-e for e in k): c.conj() for k, c in self.terms.items()})

    def is_real(self) -> bool:
        return self == self.conj()


def trig_derive(f: TrigFn, j: int) -> TrigFn:
    """Partial derivative along axis ``j`` counted from 1."""
    if not 1 <= j <= f.dim:
        raise ValueError(f"axis {j} out of range 1..{f.dim}")
    return f.derive(j - 1)


def trig_average(f: TrigFn) -> GaussRational:
    return f.average()


class BaseSpace:
    """How base-function keys inside a Weyl section behave.

    ``derive(key, j)`` returns the expansion of the j-th leaf derivative of the
    basis function ``key`` as a list of ``(coeff, key)``; ``mul`` is the
    pointwise product of basis functions.
    """

    kind = "abstract"
    leaf_dim: int
    key_dim: int

    def unit_key(self) -> tuple:
        return (0,) * self.key_dim

    def derive(self, key, j):
        raise NotImplementedError

    def mul(self, k1, k2):
        return add_keys(k1, k2)

    def to_fn(self, terms: Mapping):
        raise NotImplementedError

    def from_fn(self, f) -> dict:
        return dict(f.terms)

    def __eq__(self, other):
        return type(self) is type(other) and self.__dict__ == other.__dict__

    def __hash__(self):
        return hash((type(self).__name__, tuple(sorted(self.__dict__.items()))))


class PolySpace(BaseSpace):
    kind = "poly"

    def __init__(self, dim: int):
        self.leaf_dim = dim
        self.key_dim = dim

    def derive(self, key, j):
        e = key[j]
        if not e:
            return ()
        nk = key[:j] + (e - 1,) + key[j + 1:]
        return ((GaussRational(e), nk),)

    def to_fn(self, terms):
        return PolyFn(self.key_dim, terms)

    def __repr__(self):
        return f"PolySpace({self.key_dim})"


class TrigSpace(BaseSpace):
    kind = "trig"

    def __init__(self, dim: int):
        self.leaf_dim = dim
        self.key_dim = dim

    def derive(self, key, j):
        m = key[j]
        if not m:
            return ()
        return ((GaussRational(0, m), key),)

    def to_fn(self, terms):
        return TrigFn(self.key_dim, terms)

    def __repr__(self):
        return f"TrigSpace({self.key_dim})"


class LeafTrigSpace(BaseSpace):
    """Trig modes on an ambient torus differentiated along a linear foliation.

    ``weights[j]`` is the integer vector v_j so that the j-th leaf derivative
    of e^{i<m,x>} is i<v_j, m> e^{i<m,x>}.
    """

    kind = "leaf-trig"

    def __init__(self, weights):
        self.weights = tuple(tuple(int(w) for w in row) for row in weights)
        self.leaf_dim = len(self.weights)
        self.key_dim = len(self.weights[0]) if self.weights else 0

    def derive(self, key, j):
        m = sum(w * e for w, e in zip(self.weights[j], key))
        if not m:
            return ()
        return ((GaussRational(0, m), key),)

    def to_fn(self, terms):
        return TrigFn(self.key_dim, terms)

    def __repr__(self):
        return f"LeafTrigSpace({self.weights})"

