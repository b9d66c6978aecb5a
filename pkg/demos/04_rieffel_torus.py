"""
Rieffel deformation of the torus
================================

Modes multiply by a bicharacter, e_p * e_q = exp(-(i hbar/2) <p, Jq>) e_{p+q}.
At a rational hbar the phase is kept as a formal exponent; in formal mode it
is expanded in hbar and agrees with the Fedosov product on the flat torus.
"""
from starfield import RieffelAlgebra, fixtures, rieffel_involution, rieffel_star
from starfield.scalars import Q
from starfield.serialize import coefficient_table

A = fixtures.get("rieffel-T2")  # hbar = 1/3
u, v = A.mode((1, 0)), A.mode((0, 1))
print("u*v:", coefficient_table(rieffel_star(u, v)))
print("v*u:", coefficient_table(rieffel_star(v, u)))
print("(u*v)* == v* u*:", rieffel_involution(rieffel_star(u, v)) == rieffel_star(rieffel_involution(v), rieffel_involution(u)))

# the same modes with hbar kept formal, expanded to hbar^3
F = fixtures.get("rieffel-T2-formal")
for row in coefficient_table(rieffel_star(F.mode((1, 0)), F.mode((0, 1)))):
    print("   ", row)

# at hbar = 0 the product is the commutative pointwise one
Z = RieffelAlgebra(2, A.J, Q(0))
print("hbar = 0 commutes:", rieffel_star(Z.mode((1, 0)), Z.mode((0, 1))) == rieffel_star(Z.mode((0, 1)), Z.mode((1, 0))))
