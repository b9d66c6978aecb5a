"""Named, embedded fixtures.

Each builder returns a fresh object; ``get(name)`` looks one up by name and
``names(kind)`` lists what is available.  Kinds are ``symplectic``,
``model``, ``rieffel`` and ``crossed``.
"""
from __future__ import annotations

from .functions import PolyFn
from .groupoid import FiniteGroup, FiniteGroupoid, TorusPairGroupoidModel, TransformationGroupoidModel
from .rieffel import CrossedDiracAlgebra, RieffelAlgebra
from .scalars import Q
from .weyl import SymplecticData, standard_omega

__all__ = ["get", "names", "kind_of", "FIXTURES"]


def _flat(dim: int, base: str):
    def build():
        return SymplecticData(standard_omega(dim), None, base)

    return build


def curved_r2() -> SymplecticData:
    """Gamma_{111} = x2, Gamma_{222} = x1 on R^2: linear entries, R != 0."""
    gam = {(0, 0, 0): PolyFn.variable(2, 1), (1, 1, 1): PolyFn.variable(2, 0)}
    return SymplecticData(standard_omega(2), gam, "poly")


def curved_r4() -> SymplecticData:
    """A four dimensional curved fixture mixing linear and constant entries."""
    gam = {
        (0, 0, 0): PolyFn.variable(4, 1),
        (0, 2, 3): PolyFn.variable(4, 2),
        (1, 1, 3): PolyFn.constant(4, 1),
        (2, 2, 2): PolyFn.variable(4, 0),
    }
    return SymplecticData(standard_omega(4), gam, "poly")


def trivial_t2() -> TransformationGroupoidModel:
    return TransformationGroupoidModel(2, FiniteGroup.trivial(), {}, "trivial-T2")


def z2_flip() -> TransformationGroupoidModel:
    g = FiniteGroup.cyclic(2, ["e", "f"])
    return TransformationGroupoidModel(2, g, {"f": ([[-1, 0], [0, -1]], (0, 0))}, "z2-flip")


def z4_rotation() -> TransformationGroupoidModel:
    """Z_4 acting by quarter-turn rotations composed with quarter-turn translations."""
    g = FiniteGroup.cyclic(4, ["e", "r", "r2", "r3"])
    R = [[0, -1], [1, 0]]
    R2 = [[-1, 0], [0, -1]]
    R3 = [[0, 1], [-1, 0]]
    act = {"r": (R, (1, 0)), "r2": (R2, (1, 1)), "r3": (R3, (0, 1))}
    return TransformationGroupoidModel(2, g, act, "z4-rotation")


def torus_pair_t2() -> TorusPairGroupoidModel:
    return TorusPairGroupoidModel(2, "torus-pair-T2")


def z2_group() -> FiniteGroupoid:
    return FiniteGroupoid.from_group(FiniteGroup.cyclic(2, ["e", "g"]), "z2-group")


def pair3() -> FiniteGroupoid:
    """Pair groupoid on three objects with Haar weights rho(s(arrow))."""
    return FiniteGroupoid.pair({"a": Q(1), "b": Q(2), "c": Q(1, 3)}, "pair3")


def pair3_skewed() -> FiniteGroupoid:
    """Pair groupoid whose weights depend on the target: not left invariant."""
    objs = ["a", "b", "c"]
    wt = {"a": Q(1), "b": Q(2), "c": Q(1, 3)}
    arrows = [{"id": f"{i}<-{j}", "s": j, "t": i} for i in objs for j in objs]
    compose = [[f"{i}<-{j}", f"{j}<-{k}", f"{i}<-{k}"] for i in objs for j in objs for k in objs]
    haar = [{"arrow": f"{i}<-{j}", "weight": wt[i] * (1 + (i == j))} for i in objs for j in objs]
    return FiniteGroupoid(objs, arrows, compose, haar, "pair3-skewed")


def rieffel_t2() -> RieffelAlgebra:
    return RieffelAlgebra(2, [[0, 1], [-1, 0]], Q(1, 3))


def rieffel_t2_formal() -> RieffelAlgebra:
    return RieffelAlgebra(2, [[0, 1], [-1, 0]], None, 3)


def rieffel_t3() -> RieffelAlgebra:
    return RieffelAlgebra(3, [[0, 1, Q(1, 2)], [-1, 0, 2], [Q(-1, 2), -2, 0]], Q(2, 7))


def crossed_dirac_k1() -> CrossedDiracAlgebra:
    return CrossedDiracAlgebra(rieffel_t2(), 1, [[Q(1, 2)], [Q(1, 5)]])


FIXTURES = {
    "flat-R2": ("symplectic", _flat(2, "poly")),
    "flat-T2": ("symplectic", _flat(2, "trig")),
    "flat-R4": ("symplectic", _flat(4, "poly")),
    "flat-T4": ("symplectic", _flat(4, "trig")),
    "curved-R2": ("symplectic", curved_r2),
    "curved-R4": ("symplectic", curved_r4),
    "trivial-T2": ("model", trivial_t2),
    "z2-flip": ("model", z2_flip),
    "z4-rotation": ("model", z4_rotation),
    "torus-pair-T2": ("model", torus_pair_t2),
    "z2-group": ("model", z2_group),
    "pair3": ("model", pair3),
    "pair3-skewed": ("model", pair3_skewed),
    "rieffel-T2": ("rieffel", rieffel_t2),
    "rieffel-T2-formal": ("rieffel", rieffel_t2_formal),
    "rieffel-T3": ("rieffel", rieffel_t3),
    "crossed-dirac-k1": ("crossed", crossed_dirac_k1),
}


def names(kind: str | None = None) -> list:
    return sorted(n for n, (k, _) in FIXTURES.items() if kind is None or k == kind)


def kind_of(name: str) -> str:
    return FIXTURES[name][0]


def get(name: str):
    try:
        return FIXTURES[name][1]()
    except KeyError:
        raise KeyError(f"unknown fixture {name!r}; known: {', '.join(names())}") from None
