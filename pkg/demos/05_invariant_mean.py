"""
Averaging over shifts
=====================

Convex weights on a few shifts can flatten a bounded function on chains.
The estimator reports the flattened value and a half-oscillation epsilon
that holds on the probes it was given.
"""

import math

from currents import Cochain, FunctionSpec, ShiftFamily, check_shift_invariance, estimate_mean, fixture
from currents.mean import epsilon_profile, sample_family

edge1 = fixture("edge1")
e = edge1.chain(1, {0: 1})
probes = [c * e for c in range(-4, 5)]

# parity flips sign under +e, so two shifts cancel it exactly
est = estimate_mean(FunctionSpec.parity(), ShiftFamily((0 * e, e)), probes)
print(est.lam, complex(est.mean), est.epsilon)

# a quarter turn per unit of e: four shifts give 1 + i - 1 - i = 0
quarter = FunctionSpec.phase(Cochain(edge1, 1, {0: math.pi / 2}))
four = ShiftFamily(tuple(t * e for t in range(4)))
for strategy in ("uniform", "lp"):
    est = estimate_mean(quarter, four, probes, strategy)
    print(strategy, complex(est.mean), est.epsilon)

rep = check_shift_invariance(quarter, four, probes, 2 * e)
print("shift by 2e:", rep.difference, rep.passed)

# a less tidy function: epsilon as the shift family grows
square = fixture("square")
k = Cochain(square, 1, {0: 0.9, 2: -2.1, 4: 0.4})
f = FunctionSpec.phase(k)
fam = sample_family(square, 1, 40, 6.0, seed=3)
probes = list(sample_family(square, 1, 30, 6.0, seed=4).shifts)
for n, eps in epsilon_profile(f, fam, probes, [1, 5, 10, 20, 40]):
    print(n, round(eps, 4))
