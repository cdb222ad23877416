"""
Cochains, Stokes and the phase functions g_k
============================================

Discretize smooth forms by quadrature, check Stokes on random data and
watch g_k stay Lipschitz in the flat norm.
"""

import math

import numpy as np

from currents import Cochain, boundary, coboundary, discretize_form, fixture, gk_eval, pair
from currents.forms import linear_form, verify_gk_lipschitz

square = fixture("square")

# x dy on the square; the 1-cochain holds its integral over every edge
x_dy = linear_form(1, [[0, 0, 0], [0, 1, 0]], 2)
k = discretize_form(x_dy, square)
print({square.simplices[1][i]: round(v, 6) for i, v in k.values.items()})

# d(x dy) = dx^dy, so dk on each triangle is its area
print(dict(coboundary(k).values))

rng = np.random.default_rng(0)
worst = 0.0
for _ in range(200):
    S = square.chain(2, dict(enumerate(rng.integers(-3, 4, 2).tolist())))
    worst = max(worst, abs(pair(coboundary(k), S) - pair(k, boundary(S))))
print("max Stokes defect:", worst)

# g_k(X) = exp(i (k(X) + flat(X))) sits on the unit circle
tri = fixture("tri")
sigma = tri.chain(2, {0: 1})
g = gk_eval(Cochain(tri, 2), sigma)
print(g, abs(complex(g)))

for values in ({}, {0: 2 * math.pi}, {0: 1.3, 1: -0.4}):
    k2 = Cochain(square, 2, values)
    rep = verify_gk_lipschitz(k2, 300, seed=1, mass_cap=10.0)
    print(values, "L =", round(rep.bound, 4), "worst ratio =", round(rep.max_ratio, 4), rep.passed)
