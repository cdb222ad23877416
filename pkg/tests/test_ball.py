import itertools
import json
import math
from collections import Counter

import numpy as np
import pytest

from currents import Chain, SimplicialComplex, boundary, mass, normal_norm
from currents.ball import (
    MassBall,
    SamplingError,
    cycle_basis,
    enumerate_ball,
    integer_kernel,
    sample_ball,
    sample_cycles,
)
from currents.complex import chain_to_json
from currents.lp import SizeGuardError
from currents.rng import SplitMix64



def brute_force_ball(C, m, cap):
    """Unpruned enumeration over the full coefficient box."""
    vol = C.volume(m)
    bounds = [int(math.floor((cap + 1e-12) / v)) for v in vol]
    out = []
    for coeffs in itertools.product(*[range(-b, b + 1) for b in bounds]):
        T = Chain.from_dense(C, m, coeffs)
        if normal_norm(T) <= cap + 1e-12:
            out.append(T)
    return out


def test_splitmix_reference_values():
    # reference outputs of splitmix64 seeded with 0 and 1234567
    g = SplitMix64(0)
    assert [hex(g.next_u64()) for _ in range(3)] == ["0xe220a8397b1dcdaf", "0x6e789e6aa1b965f4", "0x6c45d188009454f"]
    g = SplitMix64(1234567)
    assert g.next_u64() == 6457827717110365317


def test_splitmix_matches_scalar_recurrence():
    mask = (1 << 64) - 1

    def scalar(seed, n):
        s, out = seed, []
        for _ in range(n):
            s = (s + 0x9E3779B97F4A7C15) & mask
            z = s
            z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & mask
            z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & mask
            out.append(z ^ (z >> 31))
        return out

    for seed in (0, 1, 2**64 - 1, 987654321):
        g = SplitMix64(seed)
        assert g.next_block(7).tolist() + g.next_block(5).tolist() == scalar(seed, 12)


def test_enumerate_examples(edge1, tri):
    five = enumerate_ball(MassBall(edge1, 1, 6.5))
    assert [dict(T.coefficients).get(0, 0) for T in five] == [-2, -1, 0, 1, 2]
    assert enumerate_ball(MassBall(tri, 1, 0.0)) == [tri.zero(1)]
    # cheapest nonzero edge chain: a unit edge, 1 + 2 = 3 > 1
    assert min(normal_norm(tri.chain(1, {j: 1})) for j in range(3)) == pytest.approx(3.0)
    assert enumerate_ball(MassBall(tri, 1, 1.0)) == [tri.zero(1)]


@pytest.mark.parametrize("name", ["edge1", "tri"])
@pytest.mark.parametrize("cap", [0, 1, 3, 6.5])
def test_enumerate_matches_brute_force(all_complexes, name, cap):
    C = all_complexes[name]
    for m in range(C.top_dim + 1):
        got = enumerate_ball(MassBall(C, m, cap))
        ref = brute_force_ball(C, m, cap)
        assert got == ref  # same order too: both lexicographic in (index, coefficient)


def test_enumerate_guard(square):
    with pytest.raises(SizeGuardError, match="candidate"):
        enumerate_ball(MassBall(square, 1, 40.0))


def test_sample_determinism_and_membership(square):
    ball = MassBall(square, 1, 6.0)
    a = sample_ball(ball, 300, 42)
    b = sample_ball(ball, 300, 42)
    assert json.dumps([chain_to_json(T) for T in a]) == json.dumps([chain_to_json(T) for T in b])
    assert all(normal_norm(T) <= 6.0 + 1e-12 for T in a)
    assert sample_ball(ball, 300, 43) != a


def test_sample_edge1_support(edge1):
    # 5 equally likely outcomes: P(miss one in 200 draws) <= 5 * 0.8^200 < 1e-18
    got = sample_ball(MassBall(edge1, 1, 6.5), 200, 7)
    support = {dict(T.coefficients).get(0, 0) for T in got}
    assert support == {-2, -1, 0, 1, 2}


def test_sample_is_uniform_on_ball(tri):
    ball = MassBall(tri, 1, 7.0)
    points = enumerate_ball(ball)
    n = 20 * len(points) * 10
    counts = Counter(T.key() for T in sample_ball(ball, n, 3))
    assert set(counts) == {T.key() for T in points}
    expected = n / len(points)
    chi2 = sum((counts[T.key()] - expected) ** 2 / expected for T in points)
    dof = len(points) - 1
    assert chi2 < dof + 6 * math.sqrt(2 * dof)


def test_sample_reports_hopeless_acceptance():
    # long fan of short edges: huge box, tiny ball
    k = 20
    pts = [(0.0, 0.0)] + [(0.3 * math.cos(0.1 * i), 0.3 * math.sin(0.1 * i)) for i in range(k)]
    C = SimplicialComplex.from_simplices(pts, [(0, i) for i in range(1, k + 1)])
    with pytest.raises(SamplingError, match="acceptance"):
        sample_ball(MassBall(C, 1, 1.5), 10, 0)


def test_sample_zero_cap(square):
    assert sample_ball(MassBall(square, 2, 0.0), 5, 1) == [square.zero(2)] * 5


def test_cycle_ranks(tri, edge1, square, rand_planar, rand_spatial):
    lat = cycle_basis(tri, 1)
    perimeter = boundary(tri.chain(2, {0: 1}))
    assert lat.rank == 1 and lat.basis[0] in (perimeter, -perimeter)
    assert cycle_basis(edge1, 1).rank == 0
    assert cycle_basis(square, 1).rank == 2
    for C in (tri, square, rand_planar, rand_spatial):
        for m in range(1, C.top_dim + 1):
            D = C.boundary_matrix(m).toarray()
            lat = cycle_basis(C, m)
            assert lat.rank == C.count(m) - np.linalg.matrix_rank(D)
            assert lat.boundary_rank == np.linalg.matrix_rank(D)


def test_cycle_basis_is_primitive_and_closed(all_complexes):
    rng = np.random.default_rng(6)
    for C in all_complexes.values():
        for m in range(1, C.top_dim + 1):
            lat = cycle_basis(C, m)
            if not lat.rank:
                continue
            Z = lat.basis_matrix()
            assert np.linalg.matrix_rank(Z) == lat.rank
            for z in lat.basis:
                assert boundary(z).is_zero()
                assert math.gcd(*dict(z.coefficients).values()) == 1
            for _ in range(50):
                assert boundary(lat.combine(rng.integers(-5, 6, lat.rank))).is_zero()


def test_integer_kernel_is_saturated():
    # kernel of [2 4 6] over Z is spanned by (2,-1,0),(3,0,-1) (index 1 in Z^3 cap ker)
    basis, rank = integer_kernel([[2, 4, 6]], 3)
    assert rank == 1 and len(basis) == 2
    B = np.array(basis)
    assert np.all(B @ [2, 4, 6] == 0)
    # saturation: the 2x2 minors have gcd 1
    minors = [abs(round(np.linalg.det(B[:, [i, j]]))) for i, j in itertools.combinations(range(3), 2)]
    assert math.gcd(*minors) == 1


def test_sample_cycles(tri, square):
    lat = cycle_basis(tri, 1)
    perimeter = boundary(tri.chain(2, {0: 1}))
    assert mass(perimeter) * 2 <= 7 < mass(perimeter) * 3
    got = sample_cycles(lat, 7.0, 400, 9)
    support = set()
    for T in got:
        assert boundary(T).is_zero()
        c = [c for c in range(-2, 3) if T == c * perimeter]
        assert len(c) == 1
        support.add(c[0])
    assert support == {-2, -1, 0, 1, 2}
    assert sample_cycles(lat, 7.0, 400, 9) == got
    sq = sample_cycles(cycle_basis(square, 1), 6.0, 200, 1)
    assert all(boundary(T).is_zero() and mass(T) <= 6.0 + 1e-12 for T in sq)


def test_sample_cycles_empty_lattice(edge1):
    assert sample_cycles(cycle_basis(edge1, 1), 5.0, 3, 0) == [edge1.zero(1)] * 3
