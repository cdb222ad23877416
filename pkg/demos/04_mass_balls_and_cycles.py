"""
Mass balls and integer cycles
=============================

Only finitely many integer chains fit under a normal-mass cap. We list
them, sample them, and then look at the lattice of cycles.
"""

from collections import Counter

from currents import boundary, fixture
from currents.ball import MassBall, cycle_basis, enumerate_ball, sample_ball, sample_cycles

edge1 = fixture("edge1")
ball = MassBall(edge1, 1, 6.5)
print([dict(T.coefficients) for T in enumerate_ball(ball)])

# uniform sampling by rejection from the coefficient box, seeded
draws = sample_ball(ball, 1000, seed=42)
print(sorted(Counter(T.coefficients.get(0, 0) for T in draws).items()))

square = fixture("square")
lat = cycle_basis(square, 1)
print("cycle rank:", lat.rank, "boundary rank:", lat.boundary_rank)
for z in lat.basis:
    print(" ", dict(z.coefficients))

cycles = sample_cycles(lat, 8.0, 500, seed=7)
print("all closed:", all(boundary(z).is_zero() for z in cycles))
print("distinct:", len({z.key() for z in cycles}))
