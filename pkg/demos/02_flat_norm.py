"""
Flat norm by linear programming
===============================

The flat norm asks for the cheapest way to write T = R + dS. For the
perimeter of a triangle it is much cheaper to fill it in than to pay for
its length.
"""

import math

from currents import boundary, fixture, flat_norm, mass, normal_norm
from currents.norms import decomposition_residual

tri = fixture("tri")
perimeter = boundary(tri.chain(2, {0: 1}))
print("mass:", mass(perimeter), "=", 2 + math.sqrt(2))
print("normal norm:", normal_norm(perimeter))

d = flat_norm(perimeter, "real")
print("flat:", d.value)
print("R =", dict(d.R.coefficients), " S =", dict(d.S.coefficients))
print("certificate residual:", decomposition_residual(perimeter, d))

# integer mode restricts S to integer coefficients (branch and bound)
d_int = flat_norm(3 * perimeter, "integer")
print("integer flat of 3x perimeter:", d_int.value, "LP bound:", d_int.relaxation_bound)

# a single edge is already as cheap as it gets
e = tri.chain(1, {(0, 1): 1})
print("flat(e01):", flat_norm(e).value, "mass:", mass(e))
