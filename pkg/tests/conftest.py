import itertools

import numpy as np
import pytest
from scipy.spatial import Delaunay

from currents import Chain, SimplicialComplex, fixture

ACCEPTANCE_LINES = []


def random_complex(seed: int, ambient: int = 2, max_simplices: int = 25, max_vertices: int = 12):
    """Small random non-degenerate complex with <= max_simplices simplices in total."""
    rng = np.random.default_rng(seed)
    while True:
        nv = int(rng.integers(5, 8))
        pts = rng.uniform(0, 2, size=(nv, ambient))
        if ambient == 2:
            tris = [tuple(sorted(t)) for t in Delaunay(pts).simplices.tolist()]
            rng.shuffle(tris)
            extra = []
        else:
            tris = list(itertools.combinations(range(nv), 3))
            rng.shuffle(tris)
            tris = tris[:4]
            extra = [tuple(rng.choice(nv, 4, replace=False).tolist())]
        for cut in range(len(tris), 0, -1):
            try:
                C = SimplicialComplex.from_simplices(pts, tris[:cut] + extra)
            except ValueError:
                break
            total = sum(C.count(m) for m in range(C.top_dim + 1))
            if total <= max_simplices and nv <= max_vertices:
                return C


def random_chain(rng, C, dim, low=-3, high=3, density=0.6):
    n = C.count(dim)
    coeffs = rng.integers(low, high + 1, size=n)
    coeffs[rng.random(n) > density] = 0
    return Chain.from_dense(C, dim, coeffs, "integer")


@pytest.fixture(scope="session")
def tri():
    return fixture("tri")


@pytest.fixture(scope="session")
def edge1():
    return fixture("edge1")


@pytest.fixture(scope="session")
def square():
    return fixture("square")


@pytest.fixture(scope="session")
def rand_planar():
    return random_complex(11, ambient=2)


@pytest.fixture(scope="session")
def rand_spatial():
    return random_complex(23, ambient=3)


@pytest.fixture(scope="session")
def all_complexes(edge1, tri, square, rand_planar, rand_spatial):
    return {"edge1": edge1, "tri": tri, "square": square, "rand_planar": rand_planar, "rand_spatial": rand_spatial}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def periodic_phase_instance(rng, C, dim, cycles_only=False, extra_shifts=4, extra_probes=6):
    """Phase function with period q in a known direction, plus shifts and probes.

    k takes values in (2pi/q)Z, so f(X) = exp(i pair(k, X)) depends only on
    phi(X) = q pair(k, X) / 2pi mod q. The generator g has phi(g) = 1, the shift
    family contains 0, g, ..., (q-1)g and the probes contain the same multiples,
    so the probe set meets every class of phi and a flat average on the probes
    is flat everywhere. Returns (f, shifts, probes, Y).
    """
    from currents import Cochain, FunctionSpec, ShiftFamily
    from currents.ball import cycle_basis

    q = int(rng.integers(2, 7))
    n = C.count(dim)
    a = rng.integers(0, q, size=n)
    if cycles_only:
        lat = cycle_basis(C, dim)
        g = lat.basis[int(rng.integers(lat.rank))]

        def draw():
            return lat.combine(rng.integers(-2, 3, size=lat.rank))
    else:
        g = C.chain(dim, {int(rng.integers(n)): 1})

        def draw():
            return random_chain(rng, C, dim, -2, 2)

    gd = g.to_dense(np.int64)
    j = next(i for i in range(n) if abs(gd[i]) == 1)
    a[j] = 0
    a[j] = (gd[j] * (1 - int(a @ gd))) % q
    assert int(a @ gd) % q == 1
    k = Cochain.from_dense(C, dim, 2 * np.pi * a / q)
    f = FunctionSpec.phase(k)

    multiples = [t * g for t in range(q)]
    shifts = {T.key(): T for T in multiples}
    for _ in range(extra_shifts):
        T = draw()
        shifts.setdefault(T.key(), T)
    probes = multiples + [draw() for _ in range(extra_probes)]
    return f, ShiftFamily(tuple(shifts.values())), probes, draw()
