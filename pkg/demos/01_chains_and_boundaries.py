"""
Chains, boundaries and volumes
==============================

Load the unit right triangle, look at its simplices and push a chain
through the boundary map twice.
"""

from currents import boundary, fixture, validate_complex

tri = fixture("tri")
for m in range(tri.top_dim + 1):
    print(m, tri.simplices[m], tri.volume(m).round(4))

# the 2-simplex with coefficient 1; its boundary walks the perimeter
sigma = tri.chain(2, {0: 1})
d = boundary(sigma)
print("boundary:", dict(d.coefficients))
print("boundary of boundary is zero:", boundary(d).is_zero())

# vertex tuples can be given in any order, the sign follows the permutation
print(tri.chain(1, {(1, 0): 3}) == tri.chain(1, {(0, 1): -3}))

# integer coefficients are exact Python ints
big = tri.chain(2, {0: 2**80})
print(max(boundary(big).coefficients.values()))

print(validate_complex(tri).to_dict())
