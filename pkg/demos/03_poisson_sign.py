"""
The noncommutative Poisson structure and its sign
=================================================

Pi is the first-order part of the groupoid star product.  It is a Hochschild
2-cocycle, and the second-order part P2 satisfies d P2 = eps [Pi, Pi] for
one global sign eps.  The sign is measured here, over every basis triple in
a small mode window.
"""
from starfield import QuantizedGroupoidAlgebra, fixtures, verify_poisson_structure

for name in ("trivial-T2", "z2-flip"):
    model = fixtures.get(name)
    P = QuantizedGroupoidAlgebra(model, 2).poisson
    rep = verify_poisson_structure(model, P, 1, 10, 0)
    print(f"{name:12s} cocycle={rep['cocycle']} coboundary={rep['coboundary']} "
          f"eps={rep['coboundarySign']} triples={rep['triples']}")
