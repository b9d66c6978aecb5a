"""
Quantizing a transformation groupoid
====================================

The flip x -> -x acts on the torus T^2.  Functions on the groupoid are
finite sums of modes e_p on each group component, and the deformed product
combines the convolution over the group with the Moyal product on the leaf.
"""
from starfield import GroupoidFunction, QuantizedGroupoidAlgebra, convolve, fixtures, gpd_star, trace
from starfield.serialize import coefficient_table

model = fixtures.get("z2-flip")
A = QuantizedGroupoidAlgebra(model, 6)  # keeps hbar^0 .. hbar^3

def show(label, u):
    print(label)
    for row in coefficient_table(u):
        print("   ", row)


f = GroupoidFunction.basis(model, ("f", (1, 0)), order=3)
g = GroupoidFunction.basis(model, ("f", (0, 1)), order=3)

# hbar^0 is the convolution, higher orders carry the phase of the flip
fg = gpd_star(f, g, A)
show("f*g:", fg)
print("hbar^0 equals f<>g:", fg.hbar_part(0) == convolve(f.hbar_part(0), g.hbar_part(0)))

# the flip sends e_p to e_{-p}, so f*f lands on the unit component with
# mode 0 and has a nonzero trace; the trace does not see the order of factors
k = f + g
print("Tr(k*f) == Tr(f*k):", trace(gpd_star(k, f, A)) == trace(gpd_star(f, k, A)))
print("Tr(f*k) by order:", [str(c) for c in trace(gpd_star(f, k, A)).coeffs])

# associativity holds exactly through hbar^3
h = GroupoidFunction.basis(model, ("e", (1, 1)), order=3)
print("associative:", gpd_star(gpd_star(f, g, A), h, A) == gpd_star(f, gpd_star(g, h, A), A))
