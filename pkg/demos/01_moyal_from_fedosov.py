"""
The Moyal product out of the Fedosov construction
================================================

On a flat plane the abelian connection has no correction term, and the
star product of two functions is the Moyal product.  Everything below is
exact: coefficients are Gaussian rationals and powers of hbar are kept up
to the truncation order.
"""
from starfield import PolyFn, base_star, build_abelian_connection, fixtures, poisson_matrix

# flat R^2 with the standard symplectic form, truncated at Fedosov degree 6
D = build_abelian_connection(fixtures.get("flat-R2"), 6)
print("iterations:", D.iterations, " r is zero:", not D.r)

x, y = PolyFn.variable(2, 0), PolyFn.variable(2, 1)

# x * y - y * x = i hbar pi(x, y)
xy = base_star(x, y, D)
yx = base_star(y, x, D)
print("x*y =", xy)
print("[x, y] =", xy - yx)
print("pi =", poisson_matrix(D.symplectic))

# higher orders show up for polynomials of higher degree
f = x * x * y
g = y * y * x
for k, c in enumerate(base_star(f, g, D).coeffs):
    print(f"hbar^{k}:", c)

# a curved chart: the connection now has a correction r of degree >= 3,
# and the product is still associative at every retained order
Dc = build_abelian_connection(fixtures.get("curved-R2"), 6)
a, b, c = x + y, x * y, y * y
lhs = base_star(base_star(a, b, Dc), c, Dc)
rhs = base_star(a, base_star(b, c, Dc), Dc)
print("curved chart associative:", lhs == rhs)
