"""Abelian connections, the quantization map and the induced star product.

The abelian connection is  D = -delta + nabla + (i/hbar)[r, .]  with r solving

    r = delta^{-1}(R + nabla r + (i/hbar) r o r),        delta^{-1} r = 0,

so that D^2 = (i/hbar)[-omega, .] = 0.  Flat sections a (Da = 0) are fixed
points of  a = sigma(a) + delta^{-1}(nabla a + (i/hbar)[r, a]).
"""
from __future__ import annotations

from dataclasses import dataclass

from .functions import BaseSpace
from .scalars import ZERO, HbarSeries
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
    i_over_hbar,
    i_over_hbar_bracket,
)

__all__ = [
    "AbelianConnection",
    "FlatSection",
    "build_abelian_connection",
    "abelian_d",
    "quantize",
    "base_star",
    "sigma_circ",
    "poisson_matrix",
    "as_series",
]


def poisson_matrix(s: SymplecticData) -> list:
    """pi^{ij} = -omega^{ij}: the sign for which f*g - g*f = i hbar pi(f, g) + O(hbar^2)."""
    return [[-x for x in row] for row in s.omega_inv]


@dataclass(eq=False)
class AbelianConnection:
    symplectic: SymplecticData
    space: BaseSpace
    order: int
    r: WeylSection
    iterations: int

    def __post_init__(self):
        self._gamma = gamma_section(self.symplectic, self.space)

    @property
    def gamma(self):
        return self._gamma

    @property
    def is_flat(self) -> bool:
        return self._gamma is None and not self.r

    @property
    def hbar_order(self) -> int:
        return self.order // 2

    def nabla(self, a: WeylSection, order=None) -> WeylSection:
        return connection(a, self.symplectic, self._gamma, order)

    def conventions(self) -> dict:
        from .scalars import format_rational

        return {
            "kernel": "exp(-(i hbar/2) omega^{ij} d/dy^i d/dz^j)",
            "poisson": "pi^{ij} = -omega^{ij}",
            "pi": [[format_rational(x) for x in row] for row in poisson_matrix(self.symplectic)],
            "degree": "deg y = 1, deg hbar = 2",
        }

    def to_json(self) -> dict:
        return {
            "symplectic": self.symplectic.to_json(),
            "order": self.order,
            "iterations": self.iterations,
            "r": self.r.to_json(),
            "conventions": self.conventions(),
        }

    @classmethod
    def from_json(cls, obj) -> "AbelianConnection":
        try:
            s = SymplecticData.from_json(obj["symplectic"])
            order = int(obj["order"])
            space = s.space()
            r = WeylSection.from_json(obj["r"], s.dim, space, order)
            its = int(obj.get("iterations", max(order - 2, 0)))
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed connection record: {exc}") from exc
        if order < 2:
            raise ValueError("connection order must be at least 2")
        return cls(s, space, order, r, its)


def build_abelian_connection(
    s: SymplecticData, order: int, space: BaseSpace | None = None, iterations: int | None = None, start=None
) -> AbelianConnection:
    """Iterate r <- delta^{-1}(R + nabla r + (i/hbar) r o r) from ``start`` (default 0).

    ``order - 2`` iterations determine r through Fedosov degree ``order``.
    """
    if order < 2:
        raise ValueError("truncation order must be at least 2")
    space = space or s.space()
    if space.leaf_dim != s.dim:
        raise ValueError("base space leaf dimension differs from the symplectic dimension")
    if iterations is None:
        iterations = order - 2
    probe = AbelianConnection(s, space, order, WeylSection.zero(s.dim, space, order), 0)
    R = curvature(s, space).with_order(order - 1)
    r = start.with_order(order) if start is not None else WeylSection.zero(s.dim, space, order)
    for _ in range(iterations):
        rhs = R + probe.nabla(r, order - 1)
        if r:
            rhs = rhs + i_over_hbar(circ(r, r, s, order + 1), order - 1)
        r = delta_inv(rhs).with_order(order)
    return AbelianConnection(s, space, order, r, iterations)


def abelian_d(a: WeylSection, D: AbelianConnection, order: int | None = None) -> WeylSection:
    """D a = -delta a + nabla a + (i/hbar)[r, a], truncated at ``order``."""
    if order is None:
        order = a.order
    out = -delta(a).with_order(order) + D.nabla(a, order)
    if D.r:
        out = out + i_over_hbar_bracket(D.r, a, D.symplectic, order)
    return out.with_order(order)


def as_series(f, space: BaseSpace, order: int) -> HbarSeries:
    """Coerce a base function or series of base functions to an hbar-series."""
    zero = space.to_fn({})
    if isinstance(f, HbarSeries):
        return HbarSeries(f.coeffs, f.order, zero).truncate(order)
    if isinstance(f, (list, tuple)):
        return HbarSeries(list(f), order, zero)
    return HbarSeries([f], order, zero)


@dataclass(eq=False)
class FlatSection:
    value: WeylSection
    symbol: HbarSeries


def _split(a: WeylSection) -> dict:
    parts: dict = {}
    for key, c in a.terms.items():
        parts.setdefault(fedosov_degree(key), {})[key] = c
    return {d: WeylSection._raw(a.dim, a.space, t, a.order) for d, t in parts.items()}


def quantize(f, D: AbelianConnection, iterations: int | None = None) -> FlatSection:
    """The flat section with symbol f, solved one Fedosov degree at a time.

    Degree d of the fixed point only involves degrees below d, so after the
    step for degree d that part is final; ``iterations`` caps how many degrees
    above the symbol's own are filled in (default: all up to the order).
    """
    N = D.order
    s = D.symplectic
    series = as_series(f, D.space, N // 2)
    lift = WeylSection.from_function(s.dim, D.space, series, N)
    fixed = _split(lift)
    parts: dict = {}
    r_parts = _split(D.r) if D.r else {}
    top = N if iterations is None else min(N, iterations)
    for d in range(0, N + 1):
        piece = fixed.get(d, WeylSection.zero(s.dim, D.space, N))
        if 1 <= d <= top:
            src = parts.get(d - 1)
            rhs = D.nabla(src, d - 1) if src is not None else None
            for j, rj in r_parts.items():
                m = d + 1 - j
                am = parts.get(m)
                if am is None:
                    continue
                term = i_over_hbar_bracket(rj, am, s, d - 1).homogeneous(d - 1)
                rhs = term if rhs is None else rhs + term
            if rhs is not None and rhs:
                piece = piece + delta_inv(rhs).with_order(N)
        if piece:
            parts[d] = piece.with_order(N)
    total = WeylSection.zero(s.dim, D.space, N)
    for d in sorted(parts):
        total = total + parts[d]
    return FlatSection(total.with_order(N), series)


def sigma_circ(a: WeylSection, b: WeylSection, s: SymplecticData, order: int, combine=None) -> dict:
    """sigma(a o b) as ``{(k, basekey): coeff}`` using only full contractions.

    ``combine(b1, b2)`` may replace the pointwise product of base basis
    functions by any bilinear rule returning ``[(coeff, basekey), ...]``.
    """
    zero = (0,) * s.dim
    if combine is None:
        mul = a.space.mul

        def combine(b1, b2):
            return ((None, mul(b1, b2)),)

    def grouped(sec):
        rows: dict = {}
        for (k, al, t, bk), c in sec.terms.items():
            if not t:
                rows.setdefault(al, []).append((k, bk, c))
        return rows

    left, right = grouped(a), grouped(b)
    by_degree: dict = {}
    for a2 in right:
        by_degree.setdefault(sum(a2), []).append(a2)
    out: dict = {}
    for a1, rows1 in left.items():
        n1 = sum(a1)
        for a2 in by_degree.get(n1, ()):
            contr = [(k, c) for k, gam, c in s.kernel(a1, a2) if gam == zero]
            if not contr:
                continue
            for k1, b1, c1 in rows1:
                for k2, b2, c2 in right[a2]:
                    kk = k1 + k2
                    if 2 * kk + 2 * n1 > order:
                        continue
                    for cb, bb in combine(b1, b2):
                        base = c1 * c2 if cb is None else c1 * c2 * cb
                        for k, ck in contr:
                            key = (kk + k, bb)
                            out[key] = out.get(key, ZERO) + base * ck
    return {k: c for k, c in out.items() if c}


def _center_series(center: dict, space: BaseSpace, K: int) -> HbarSeries:
    by_k: dict = {}
    for (k, b), c in center.items():
        if k <= K:
            by_k.setdefault(k, {})[b] = c
    return HbarSeries([space.to_fn(by_k.get(k, {})) for k in range(K + 1)], K, space.to_fn({}))


def base_star(f, g, D: AbelianConnection, qf: FlatSection | None = None, qg: FlatSection | None = None) -> HbarSeries:
    """f * g = sigma(Q(f) o Q(g)), exact through hbar^{order // 2}."""
    qf = qf or quantize(f, D)
    qg = qg or quantize(g, D)
    center = sigma_circ(qf.value, qg.value, D.symplectic, D.order)
    return _center_series(center, D.space, D.order // 2)


