"""Pseudo etale groupoid models and their convolution algebras.

Three models are provided:

* ``FiniteGroupoid``: finitely many arrows, an explicit composition table and
  a Haar system given by one positive weight per arrow.
* ``TransformationGroupoidModel``: T^n x G for a finite group G acting on the
  torus by affine maps x -> A_g x + b_g with A_g integral.  Arrows are (x, g)
  with s = x and t = g.x; (g.x, h) (x, g) = (x, hg).
* ``TorusPairGroupoidModel``: T^k x T^k with t(x, z) = x, s(x, z) = z and the
  normalized Haar average on the middle variable.

Every model reduces bilinear operations to basis pairs: ``basis_pairs(kl, kr)``
lists ``(coeff, out_key, u, v)`` where u and v are the leaf gradients (mode
vectors) of the two factors, both expressed in the s-frame of the composed
arrow.  A bidifferential operator with constant coefficients then lifts to the
groupoid by weighting each pair with a function of (u, v).
"""
from __future__ import annotations

from functools import lru_cache
from typing import Callable, Iterable, Mapping

from .functions import LeafTrigSpace, TrigFn, TrigSpace
from .scalars import ONE, ZERO, GaussRational, HbarSeries, I, Q, as_gauss, format_rational, parse_rational

__all__ = [
    "FiniteGroup",
    "FiniteGroupoid",
    "TransformationGroupoidModel",
    "TorusPairGroupoidModel",
    "GroupoidFunction",
    "GroupoidError",
    "convolve",
    "leaf_differential",
    "pullback_by_arrow_inverse",
    "restrict_to_units",
    "reframe",
    "model_from_json",
]

_IPOW = (ONE, I, -ONE, -I)


class GroupoidError(ValueError):
    pass


def _matvec(m, v):
    return tuple(sum(a * b for a, b in zip(row, v)) for row in m)


def _transpose(m):
    return tuple(zip(*m)) if m else ()


def _matmul(a, b):
    bt = _transpose(b)
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in bt) for row in a)


def _identity(n):
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


class FiniteGroup:
    """A finite group from a multiplication table over labelled elements."""

    def __init__(self, elements: Iterable, table):
        self.elements = tuple(str(e) for e in elements)
        idx = {e: i for i, e in enumerate(self.elements)}
        if len(idx) != len(self.elements):
            raise GroupoidError("duplicate group element labels")
        mul = {}
        if isinstance(table, Mapping):
            rows = [[table[a][b] for b in self.elements] for a in self.elements]
        else:
            rows = table
        if len(rows) != len(self.elements):
            raise GroupoidError("multiplication table has the wrong size")
        for a, row in zip(self.elements, rows):
            if len(row) != len(self.elements):
                raise GroupoidError("multiplication table has the wrong size")
            for b, c in zip(self.elements, row):
                c = self.elements[c] if isinstance(c, int) else str(c)
                if c not in idx:
                    raise GroupoidError(f"product {a}*{b} = {c} is not an element")
                mul[(a, b)] = c
        self._mul = mul
        ids = [e for e in self.elements if all(mul[(e, x)] == x and mul[(x, e)] == x for x in self.elements)]
        if len(ids) != 1:
            raise GroupoidError("multiplication table has no identity")
        self.identity = ids[0]
        inv = {}
        for a in self.elements:
            cands = [b for b in self.elements if mul[(a, b)] == self.identity]
            if len(cands) != 1 or mul[(cands[0], a)] != self.identity:
                raise GroupoidError(f"element {a} has no two-sided inverse")
            inv[a] = cands[0]
        self._inv = inv
        for a in self.elements:
            for b in self.elements:
                for c in self.elements:
                    if mul[(mul[(a, b)], c)] != mul[(a, mul[(b, c)])]:
                        raise GroupoidError("multiplication table is not associative")

    def mul(self, a, b):
        return self._mul[(a, b)]

    def inv(self, a):
        return self._inv[a]

    def __len__(self):
        return len(self.elements)

    @classmethod
    def trivial(cls):
        return cls(["e"], [["e"]])

    @classmethod
    def cyclic(cls, n: int, names=None):
        names = list(names) if names else [f"g{i}" for i in range(n)]
        return cls(names, [[names[(i + j) % n] for j in range(n)] for i in range(n)])

    def to_json(self):
        return {"elements": list(self.elements), "table": [[self.mul(a, b) for b in self.elements] for a in self.elements]}


class _Model:
    kind = "abstract"
    leaf_dim = 0

    def basis_pairs(self, kl, kr) -> tuple:
        raise NotImplementedError

    def check_key(self, key):
        return key

    def key_to_json(self, key) -> dict:
        raise NotImplementedError

    def key_from_json(self, row):
        raise NotImplementedError

    def key_label(self, key) -> str:
        raise NotImplementedError

    def sort_key(self, key):
        return key


class FiniteGroupoid(_Model):
    """A finite groupoid with a Haar weight per arrow.

    ``compose`` lists triples (beta, gamma, beta.gamma), defined exactly when
    s(beta) = t(gamma).  Convolution is

        (f <> g)(alpha) = sum_{beta in G^{t(alpha)}} f(beta) g(beta^{-1} alpha) lambda(beta).
    """

    kind = "finite"
    leaf_dim = 0

    def __init__(self, objects, arrows, compose, haar=None, name="finite"):
        self.name = name
        self.objects = tuple(str(o) for o in objects)
        self.arrows: dict = {}
        for a in arrows:
            aid, s, t = str(a["id"]), str(a["s"]), str(a["t"])
            if s not in self.objects or t not in self.objects:
                raise GroupoidError(f"arrow {aid} has an unknown endpoint")
            if aid in self.arrows:
                raise GroupoidError(f"duplicate arrow {aid}")
            self.arrows[aid] = (s, t)
        self._compose: dict = {}
        for b, g, bg in compose:
            b, g, bg = str(b), str(g), str(bg)
            for x in (b, g, bg):
                if x not in self.arrows:
                    raise GroupoidError(f"compose table mentions unknown arrow {x}")
            self._compose[(b, g)] = bg
        weights = {a: Q(1) for a in self.arrows}
        for row in haar or ():
            if isinstance(row, Mapping):
                aid, w = str(row["arrow"]), row["weight"]
            else:
                aid, w = str(row[0]), row[1]
            if aid not in self.arrows:
                raise GroupoidError(f"haar weight for unknown arrow {aid}")
            w = parse_rational(w) if isinstance(w, str) else Q(w)
            if w <= 0:
                raise GroupoidError("Haar weights must be positive")
            weights[aid] = w
        self.haar = weights
        self._validate()

    def s(self, a):
        return self.arrows[a][0]

    def t(self, a):
        return self.arrows[a][1]

    def compose(self, b, g):
        return self._compose.get((b, g))

    def _validate(self):
        A = self.arrows
        for b in A:
            for g in A:
                c = self._compose.get((b, g))
                if (c is not None) != (self.s(b) == self.t(g)):
                    raise GroupoidError(f"composition of {b} and {g} has the wrong domain")
                if c is not None and (self.s(c) != self.s(g) or self.t(c) != self.t(b)):
                    raise GroupoidError(f"{b}.{g} = {c} has wrong source or target")
        for (a, b), ab in self._compose.items():
            for c in A:
                bc = self._compose.get((b, c))
                if bc is None:
                    continue
                if self._compose.get((ab, c)) != self._compose.get((a, bc)):
                    raise GroupoidError(f"composition is not associative at ({a}, {b}, {c})")
        units = {}
        for o in self.objects:
            cands = [
                u
                for u in A
                if self.s(u) == o
                and self.t(u) == o
                and all(self._compose.get((u, g), g) == g for g in A if self.t(g) == o)
                and all(self._compose.get((g, u), g) == g for g in A if self.s(g) == o)
            ]
            if len(cands) != 1:
                raise GroupoidError(f"object {o} has no unique unit arrow")
            units[o] = cands[0]
        self.units = units
        inv = {}
        for a in A:
            cands = [
                b
                for b in A
                if self._compose.get((a, b)) == units[self.s(b)] and self._compose.get((b, a)) == units[self.s(a)]
            ]
            if len(cands) != 1:
                raise GroupoidError(f"arrow {a} has no unique inverse")
            inv[a] = cands[0]
        self._inv = inv
        self._unit_set = set(units.values())

    def inverse(self, a):
        return self._inv[a]

    def is_unit(self, a) -> bool:
        return a in self._unit_set

    def t_fiber(self, o):
        return [a for a in self.arrows if self.t(a) == o]

    def basis_pairs(self, kl, kr):
        c = self._compose.get((kl, kr))
        if c is None:
            return ()
        return ((GaussRational(self.haar[kl]), c, (), ()),)

    def check_key(self, key):
        key = str(key)
        if key not in self.arrows:
            raise GroupoidError(f"unknown arrow {key}")
        return key

    def key_to_json(self, key):
        return {"arrow": key}

    def key_from_json(self, row):
        return self.check_key(row["arrow"])

    def key_label(self, key):
        return key

    def haar_violations(self, samples: Iterable = ()) -> list:
        """Witnesses where left invariance fails.

        Checks  sum_{z in G^{s(x)}} f(xz) lambda(z) = sum_{y in G^{t(x)}} f(y) lambda(y)
        for every arrow x and every point mass f (which spans all f), plus the
        given sample functions (dicts arrow -> rational).
        """
        bad = []
        fns = [{w: Q(1)} for w in self.arrows] + [dict(f) for f in samples]
        for x in self.arrows:
            for f in fns:
                lhs = sum(
                    (f.get(self._compose[(x, z)], 0) * self.haar[z] for z in self.t_fiber(self.s(x))),
                    Q(0),
                )
                rhs = sum((f.get(y, 0) * self.haar[y] for y in self.t_fiber(self.t(x))), Q(0))
                if lhs != rhs:
                    bad.append({"arrow": x, "f": {k: format_rational(v) for k, v in sorted(f.items())}})
        return bad

    def to_json(self):
        return {
            "kind": "finite",
            "objects": list(self.objects),
            "arrows": [{"id": a, "s": s, "t": t} for a, (s, t) in self.arrows.items()],
            "compose": [[b, g, c] for (b, g), c in sorted(self._compose.items())],
            "haar": [{"arrow": a, "weight": format_rational(w)} for a, w in self.haar.items()],
        }

    @classmethod
    def from_json(cls, obj):
        try:
            return cls(obj["objects"], obj["arrows"], obj["compose"], obj.get("haar"), obj.get("name", "finite"))
        except (KeyError, TypeError) as exc:
            raise GroupoidError(f"malformed finite groupoid: {exc}") from exc

    @classmethod
    def pair(cls, weights: Mapping, name="pair"):
        """Pair groupoid on the given objects with lambda(i<-j) = weights[j]."""
        objs = [str(o) for o in weights]
        arrows = [{"id": f"{i}<-{j}", "s": j, "t": i} for i in objs for j in objs]
        compose = [[f"{i}<-{j}", f"{j}<-{k}", f"{i}<-{k}"] for i in objs for j in objs for k in objs]
        haar = [{"arrow": f"{i}<-{j}", "weight": Q(weights[j])} for i in objs for j in objs]
        return cls(objs, arrows, compose, haar, name)

    @classmethod
    def from_group(cls, group: FiniteGroup, name="group"):
        arrows = [{"id": g, "s": "*", "t": "*"} for g in group.elements]
        compose = [[a, b, group.mul(a, b)] for a in group.elements for b in group.elements]
        return cls(["*"], arrows, compose, None, name)


class TransformationGroupoidModel(_Model):
    """T^n x G with G acting by x -> A_g x + b_g.

    Translations are restricted to quarter turns, b_g = (2 pi / 4) * t_g with
    t_g integral, so that transported Fourier modes pick up phases in {1, i, -1, -i}.
    """

    kind = "transformation"

    def __init__(self, n: int, group: FiniteGroup, action: Mapping, name="transformation"):
        self.name = name
        self.n = n
        self.leaf_dim = n
        self.group = group
        A, T = {}, {}
        for g in group.elements:
            if g not in action:
                A[g] = _identity(n)
                T[g] = (0,) * n
                continue
            mat, shift = action[g]
            mat = tuple(tuple(int(x) for x in row) for row in mat)
            if len(mat) != n or any(len(row) != n for row in mat):
                raise GroupoidError(f"linear part of {g} has the wrong shape")
            A[g] = mat
            T[g] = tuple(int(x) % 4 for x in (shift or (0,) * n))
            if len(T[g]) != n:
                raise GroupoidError(f"translation of {g} has the wrong length")
        self.A, self.T = A, T
        for a in group.elements:
            for b in group.elements:
                ab = group.mul(a, b)
                if _matmul(A[a], A[b]) != A[ab]:
                    raise GroupoidError(f"linear parts do not compose at ({a}, {b})")
                shift = tuple((x + y) % 4 for x, y in zip(_matvec(A[a], T[b]), T[a]))
                if shift != T[ab]:
                    raise GroupoidError(f"translations do not compose at ({a}, {b})")
        self.AT = {g: _transpose(m) for g, m in A.items()}
        self.space = TrigSpace(n)

    def transport_mode(self, g, p):
        """e_p(g.x) = phase * e_{A_g^T p}(x)."""
        ph = _IPOW[sum(x * y for x, y in zip(p, self.T[g])) % 4]
        return ph, _matvec(self.AT[g], p)

    def basis_pairs(self, kl, kr):
        a, p = kl
        b, q = kr
        ph, u = self.transport_mode(b, p)
        return ((ph, (self.group.mul(a, b), tuple(x + y for x, y in zip(u, q))), u, q),)

    def check_key(self, key):
        g, m = key
        if g not in self.group.elements:
            raise GroupoidError(f"unknown group element {g}")
        m = tuple(int(x) for x in m)
        if len(m) != self.n:
            raise GroupoidError("mode has the wrong length")
        return (g, m)

    def key_to_json(self, key):
        return {"component": key[0], "mode": list(key[1])}

    def key_from_json(self, row):
        return self.check_key((str(row["component"]), row["mode"]))

    def key_label(self, key):
        return f"{key[0]}:" + ",".join(str(x) for x in key[1])

    def sort_key(self, key):
        return (self.group.elements.index(key[0]), key[1])

    def pi_invariant(self, pi) -> bool:
        P = [[Q(x) for x in row] for row in pi]
        for g in self.group.elements:
            M = self.A[g]
            conj = _matmul(_matmul(M, P), _transpose(M))
            if any(conj[i][j] != P[i][j] for i in range(self.n) for j in range(self.n)):
                return False
        return True

    def to_json(self):
        return {
            "kind": "transformation",
            "n": self.n,
            "group": self.group.to_json(),
            "action": [
                {"g": g, "A": [list(r) for r in self.A[g]], "b": [f"{t}/4" for t in self.T[g]]}
                for g in self.group.elements
            ],
        }

    @classmethod
    def from_json(cls, obj):
        try:
            n = int(obj["n"])
            gr = obj["group"]
            group = FiniteGroup(gr["elements"], gr["table"])
            action = {}
            for row in obj.get("action", []):
                shift = []
                for x in row.get("b", [0] * n):
                    q = parse_rational(x) if isinstance(x, str) else Q(x)
                    if (q * 4).denominator != 1:
                        raise GroupoidError("translations must be multiples of a quarter turn")
                    shift.append(int(q * 4))
                action[str(row["g"])] = (row["A"], shift)
        except (KeyError, TypeError) as exc:
            raise GroupoidError(f"malformed transformation model: {exc}") from exc
        return cls(n, group, action, obj.get("name", "transformation"))


class TorusPairGroupoidModel(_Model):
    """T^k x T^k with t(x, z) = x, s(x, z) = z.

    Keys are modes (m, m') of e^{i(<m,x> + <m',z>)} flattened to length 2k.
    The leaf through (x, z) is the diagonal translate, so the leaf derivative
    is d/dx + d/dz and both charts agree.
    """

    kind = "torus-pair"

    def __init__(self, k: int, name="torus-pair"):
        self.name = name
        self.k = k
        self.leaf_dim = k
        self.space = LeafTrigSpace([tuple(int(t == j or t == j + k) for t in range(2 * k)) for j in range(k)])

    def basis_pairs(self, kl, kr):
        k = self.k
        a, b = kl[:k], kl[k:]
        c, d = kr[:k], kr[k:]
        if any(x + y for x, y in zip(b, c)):
            return ()
        u = tuple(x + y for x, y in zip(a, b))
        v = tuple(x + y for x, y in zip(c, d))
        return ((ONE, a + d, u, v),)

    def check_key(self, key):
        key = tuple(int(x) for x in key)
        if len(key) != 2 * self.k:
            raise GroupoidError("torus-pair mode has the wrong length")
        return key

    def key_to_json(self, key):
        return {"mode": list(key)}

    def key_from_json(self, row):
        return self.check_key(row["mode"])

    def key_label(self, key):
        return ",".join(str(x) for x in key)

    def gradient(self, key):
        k = self.k
        return tuple(key[j] + key[k + j] for j in range(k))

    def pi_invariant(self, pi) -> bool:
        return True

    def to_json(self):
        return {"kind": "torus-pair", "k": self.k}

    @classmethod
    def from_json(cls, obj):
        try:
            return cls(int(obj["k"]), obj.get("name", "torus-pair"))
        except (KeyError, TypeError, ValueError) as exc:
            raise GroupoidError(f"malformed torus-pair model: {exc}") from exc


def model_from_json(obj):
    if not isinstance(obj, Mapping):
        raise GroupoidError("model record must be an object")
    kind = obj.get("kind")
    if kind is None:
        kind = "finite" if "arrows" in obj else "transformation" if "group" in obj else None
    if kind == "finite":
        return FiniteGroupoid.from_json(obj)
    if kind == "transformation":
        return TransformationGroupoidModel.from_json(obj)
    if kind == "torus-pair":
        return TorusPairGroupoidModel.from_json(obj)
    raise GroupoidError(f"unknown model kind {kind!r}")


class GroupoidFunction:
    """Finitely supported  sum hbar^k c * basis(key)  on a groupoid model,
    truncated at hbar^order."""

    __slots__ = ("model", "terms", "order")

    def __init__(self, model, terms: Mapping | None = None, order: int = 0):
        self.model = model
        self.order = order
        clean: dict = {}
        for (k, key), c in (terms or {}).items():
            if k > order:
                continue
            c = as_gauss(c)
            if c:
                kk = (k, key)
                clean[kk] = clean.get(kk, ZERO) + c
        self.terms = {kk: c for kk, c in clean.items() if c}

    @classmethod
    def basis(cls, model, key, coeff=ONE, order=0, k=0):
        return cls(model, {(k, model.check_key(key)): coeff}, order)

    @classmethod
    def zero(cls, model, order=0):
        return cls(model, {}, order)

    def _check(self, other):
        if not isinstance(other, GroupoidFunction):
            raise TypeError("expected a GroupoidFunction")
        if other.model is not self.model:
            raise GroupoidError("functions live on different models")

    def __add__(self, other):
        self._check(other)
        out = dict(self.terms)
        for kk, c in other.terms.items():
            out[kk] = out.get(kk, ZERO) + c
        return GroupoidFunction(self.model, out, min(self.order, other.order))

    def __neg__(self):
        return GroupoidFunction(self.model, {kk: -c for kk, c in self.terms.items()}, self.order)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        c = as_gauss(c)
        return GroupoidFunction(self.model, {kk: v * c for kk, v in self.terms.items()}, self.order)

    __mul__ = scale
    __rmul__ = scale

    def truncate(self, order: int):
        return GroupoidFunction(self.model, self.terms, min(order, self.order))

    def with_order(self, order: int):
        return GroupoidFunction(self.model, self.terms, order)

    def hbar_part(self, k: int) -> "GroupoidFunction":
        """The hbar^k coefficient as an order-0 function."""
        return GroupoidFunction(self.model, {(0, key): c for (kk, key), c in self.terms.items() if kk == k}, 0)

    def keys(self):
        return sorted({key for _, key in self.terms}, key=self.model.sort_key)

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, GroupoidFunction):
            return NotImplemented
        return self.model is other.model and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self):
        return f"GroupoidFunction({self.model.kind}, order={self.order}, terms={len(self.terms)})"

    def sorted_terms(self):
        sk = self.model.sort_key
        return sorted(self.terms.items(), key=lambda kv: (kv[0][0], sk(kv[0][1])))

    def to_json(self) -> dict:
        rows = []
        for (k, key), c in self.sorted_terms():
            row = {"hbar": k}
            row.update(self.model.key_to_json(key))
            row["coeff"] = c.to_json()
            rows.append(row)
        return {"model": self.model.kind, "order": self.order, "terms": rows}

    @classmethod
    def from_json(cls, obj, model, order=None):
        try:
            rows = obj["terms"] if isinstance(obj, Mapping) else obj
            K = order if order is not None else int(obj.get("order", 0)) if isinstance(obj, Mapping) else 0
            terms: dict = {}
            for row in rows:
                k = int(row.get("hbar", 0))
                if k < 0:
                    raise GroupoidError("negative hbar power")
                key = model.key_from_json(row)
                c = GaussRational.from_json(row["coeff"])
                terms[(k, key)] = terms.get((k, key), ZERO) + c
                K = max(K, k) if order is None else K
        except (KeyError, TypeError, AttributeError) as exc:
            raise GroupoidError(f"malformed groupoid function: {exc}") from exc
        return cls(model, terms, K)


def bilinear(f: GroupoidFunction, g: GroupoidFunction, weight: Callable | None = None) -> GroupoidFunction:
    """Lift of a constant-coefficient bidifferential operator.

    ``weight(u, v)`` returns ``[(k, coeff), ...]``: the operator sends the
    transported mode pair (u, v) to  sum_k hbar^k coeff.  ``None`` is the
    pointwise product, giving plain convolution.
    """
    f._check(g)
    model = f.model
    K = min(f.order, g.order)
    pairs = _pair_cache(model)
    out: dict = {}
    for (a, kl), cl in f.terms.items():
        for (b, kr), cr in g.terms.items():
            if a + b > K:
                continue
            base = cl * cr
            for coeff, key, u, v in pairs(kl, kr):
                if weight is None:
                    kk = (a + b, key)
                    out[kk] = out.get(kk, ZERO) + base * coeff
                    continue
                for k, w in weight(u, v):
                    if a + b + k > K or not w:
                        continue
                    kk = (a + b + k, key)
                    out[kk] = out.get(kk, ZERO) + base * coeff * w
    return GroupoidFunction(model, out, K)


_PAIR_CACHES: dict = {}


def _pair_cache(model):
    fn = _PAIR_CACHES.get(id(model))
    if fn is None or fn[0] is not model:
        fn = (model, lru_cache(maxsize=None)(model.basis_pairs))
        _PAIR_CACHES[id(model)] = fn
    return fn[1]


def convolve(f: GroupoidFunction, g: GroupoidFunction) -> GroupoidFunction:
    return bilinear(f, g, None)


def unit_function(model, order=0) -> GroupoidFunction:
    """The two-sided identity of convolution (finite and transformation models)."""
    if isinstance(model, FiniteGroupoid):
        return GroupoidFunction(
            model, {(0, u): GaussRational(1 / model.haar[u]) for u in model.units.values()}, order
        )
    if isinstance(model, TransformationGroupoidModel):
        return GroupoidFunction(model, {(0, (model.group.identity, (0,) * model.n)): ONE}, order)
    raise GroupoidError("the torus pair algebra has no unit among trigonometric polynomials")


def _inverse_matrix_T(model, g):
    return model.AT[model.group.inv(g)]


def leaf_differential(f: GroupoidFunction, j: int, chart: str = "s") -> GroupoidFunction:
    """j-th leaf derivative (0-based axis) in the s- or t-chart.

    For the transformation model the t-chart differs from the s-chart by the
    inverse transpose of the action Jacobian of each component.
    """
    model = f.model
    if chart not in ("s", "t"):
        raise ValueError("chart must be 's' or 't'")
    if isinstance(model, FiniteGroupoid):
        return GroupoidFunction.zero(model, f.order)
    if not 0 <= j < model.leaf_dim:
        raise ValueError(f"axis {j} out of range")
    out: dict = {}
    for (k, key), c in f.terms.items():
        if isinstance(model, TorusPairGroupoidModel):
            w = model.gradient(key)[j]
        else:
            g, p = key
            w = p[j] if chart == "s" else _matvec(_inverse_matrix_T(model, g), p)[j]
        if w:
            out[(k, key)] = c * GaussRational(0, w)
    return GroupoidFunction(model, out, f.order)


def reframe(components: list, to: str) -> list:
    """Convert a covector-valued function between the s- and t-chart.

    ``components`` are the n component functions; on a component g the
    t-chart covector is A_g^{-T} times the s-chart covector.
    """
    model = components[0].model
    if not isinstance(model, TransformationGroupoidModel):
        return list(components)
    n = model.n
    out = [dict() for _ in range(n)]
    for i, comp in enumerate(components):
        for (k, key), c in comp.terms.items():
            g = key[0]
            M = _inverse_matrix_T(model, g) if to == "t" else model.AT[g]
            for r in range(n):
                w = M[r][i]
                if w:
                    out[r][(k, key)] = out[r].get((k, key), ZERO) + c * w
    order = min(c.order for c in components)
    return [GroupoidFunction(model, o, order) for o in out]


def pullback_by_arrow_inverse(f: GroupoidFunction) -> GroupoidFunction:
    """f~(alpha) = f(alpha^{-1})."""
    model = f.model
    out: dict = {}
    for (k, key), c in f.terms.items():
        if isinstance(model, FiniteGroupoid):
            nk, ph = model.inverse(key), ONE
        elif isinstance(model, TransformationGroupoidModel):
            h, p = key
            g = model.group.inv(h)
            ph, m = model.transport_mode(g, p)
            nk = (g, m)
        else:
            nk, ph = key[model.k:] + key[: model.k], ONE
        out[(k, nk)] = out.get((k, nk), ZERO) + c * ph
    return GroupoidFunction(model, out, f.order)


def restrict_to_units(f: GroupoidFunction):
    """f on the unit space as an hbar-series.

    Finite model: coefficients of the unit arrows keyed by object.
    Transformation: the identity component as a TrigFn.
    Torus pair: the diagonal restriction z = x as a TrigFn.
    """
    model = f.model
    K = f.order
    if isinstance(model, FiniteGroupoid):
        rows = [dict() for _ in range(K + 1)]
        inv_units = {u: o for o, u in model.units.items()}
        for (k, key), c in f.terms.items():
            if key in inv_units:
                rows[k][inv_units[key]] = rows[k].get(inv_units[key], ZERO) + c
        return HbarSeries(rows, K, {})
    if isinstance(model, TransformationGroupoidModel):
        rows = [dict() for _ in range(K + 1)]
        e = model.group.identity
        for (k, (g, p)), c in f.terms.items():
            if g == e:
                rows[k][p] = rows[k].get(p, ZERO) + c
        return HbarSeries([TrigFn(model.n, r) for r in rows], K, TrigFn.zero(model.n))
    rows = [dict() for _ in range(K + 1)]
    kk = model.k
    for (k, key), c in f.terms.items():
        m = tuple(key[j] + key[kk + j] for j in range(kk))
        rows[k][m] = rows[k].get(m, ZERO) + c
    return HbarSeries([TrigFn(kk, r) for r in rows], K, TrigFn.zero(kk))
