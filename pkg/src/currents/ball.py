"""Finite mass balls of integer chains and the integer cycle lattice.

On a finite complex with positive volumes the set
``{T integer m-chain : M(T) + M(dT) <= cap}`` is finite, since every
coefficient obeys ``|c_s| <= cap / vol(s)``. This module enumerates it,
samples it uniformly by rejection from the coefficient box, and samples
integer cycles from a kernel basis of the boundary map.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .complex import Chain, SimplicialComplex
from .lp import SizeGuardError
from .norms import mass
from .rng import SplitMix64

__all__ = [
    "MassBall",
    "CycleLattice",
    "SamplingError",
    "enumerate_ball",
    "sample_ball",
    "cycle_basis",
    "sample_cycles",
    "integer_kernel",
]

BALL_TOL = 1e-12
ENUM_GUARD = 10**7
PROBE_BATCH = 10**6
MIN_ACCEPTANCE = 1e-6
MAX_DRAWS = 10**8
_BATCH_ROWS = 1 << 14


class SamplingError(RuntimeError):
    """Rejection sampling accepts too rarely to be useful."""


@dataclass(frozen=True)
class MassBall:
    complex: SimplicialComplex
    dim: int
    cap: float

    def __post_init__(self):
        if self.cap < 0 or not math.isfinite(self.cap):
            raise ValueError("ball cap must be finite and nonnegative")

    def coefficient_bounds(self) -> np.ndarray:
        vol = self.complex.volume(self.dim)
        return np.floor((self.cap + BALL_TOL) / vol).astype(np.int64)

    def candidate_count(self) -> int:
        return math.prod(2 * int(b) + 1 for b in self.coefficient_bounds())

    def normal_norms(self, coeffs: np.ndarray) -> np.ndarray:
        """Row-wise M(T) + M(dT) for a stack of dense integer coefficient rows."""
        C, m = self.complex, self.dim
        out = np.abs(coeffs) @ C.volume(m)
        if m > 0 and coeffs.shape[1]:
            bd = coeffs @ C.boundary_matrix(m).toarray().T
            out = out + np.abs(bd) @ C.volume(m - 1)
        return out


def enumerate_ball(b: MassBall, guard: int = ENUM_GUARD) -> list[Chain]:
    """Every integer chain in the ball, in depth-first lexicographic order.

    Simplices are visited in canonical index order and coefficients in
    increasing order; partial mass prunes the search.
    """
    total = b.candidate_count()
    if total > guard:
        raise SizeGuardError(f"mass ball has {total} candidate coefficient tuples (guard {guard})")
    C, m, cap = b.complex, b.dim, b.cap
    vol = C.volume(m).tolist()
    bounds = b.coefficient_bounds().tolist()
    n = len(vol)
    if m > 0:
        D = C.boundary_matrix(m).toarray()
        lower_vol = C.volume(m - 1)
    coeffs = [0] * n
    bvec = np.zeros(C.count(m - 1) if m > 0 else 0, dtype=np.int64)
    found: list[Chain] = []
    limit = cap + BALL_TOL

    def visit(j: int, partial: float):
        nonlocal bvec
        if j == n:
            total_norm = partial + (float(np.abs(bvec) @ lower_vol) if m > 0 else 0.0)
            if total_norm <= limit:
                found.append(Chain(C, m, {i: c for i, c in enumerate(coeffs) if c}, "integer"))
            return
        for c in range(-bounds[j], bounds[j] + 1):
            cost = partial + abs(c) * vol[j]
            if cost > limit:
                continue
            coeffs[j] = c
            if m > 0 and c:
                bvec += c * D[:, j]
            visit(j + 1, cost)
            if m > 0 and c:
                bvec -= c * D[:, j]
        coeffs[j] = 0

    visit(0, 0.0)
    return found


def _rejection_sample(draw, accept, count: int) -> list:
    """Pull batches from ``draw()`` and keep rows passing ``accept`` in order."""
    kept: list = []
    drawn = 0
    while len(kept) < count:
        rows = draw()
        ok = accept(rows)
        kept.extend(rows[ok][: count - len(kept)])
        drawn += len(rows)
        if drawn >= PROBE_BATCH and len(kept) / drawn < MIN_ACCEPTANCE:
            raise SamplingError(
                f"acceptance rate {len(kept) / drawn:.2e} below {MIN_ACCEPTANCE:g}; "
                "enumerate the ball or shrink the box"
            )
        if drawn >= MAX_DRAWS:
            raise SamplingError(f"gave up after {drawn} draws")
    return kept


def sample_ball(b: MassBall, count: int, seed: int) -> list[Chain]:
    """``count`` i.i.d. chains uniform on the ball's integer points."""
    if count < 1:
        raise ValueError("count must be at least 1")
    C, m = b.complex, b.dim
    bounds = b.coefficient_bounds()
    if bounds.size == 0:
        return [C.zero(m) for _ in range(count)]
    gen = SplitMix64(seed)

    def draw():
        return gen.integers(-bounds, bounds, _BATCH_ROWS)

    def accept(rows):
        return b.normal_norms(rows) <= b.cap + BALL_TOL

    rows = _rejection_sample(draw, accept, count)
    return [Chain.from_dense(C, m, r, "integer") for r in rows]


@dataclass(frozen=True)
class CycleLattice:
    complex: SimplicialComplex
    dim: int
    basis: tuple
    boundary_rank: int

    @property
    def rank(self) -> int:
        return len(self.basis)

    def basis_matrix(self) -> np.ndarray:
        n = self.complex.count(self.dim)
        if not self.basis:
            return np.zeros((0, n), dtype=np.int64)
        return np.array([z.to_dense(np.int64) for z in self.basis], dtype=np.int64)

    def combine(self, coeffs) -> Chain:
        out = self.complex.zero(self.dim)
        for a, z in zip(coeffs, self.basis):
            if a:
                out = out + int(a) * z
        return out


def integer_kernel(A: list[list[int]], ncols: int) -> tuple[list[list[int]], int]:
    """Basis of {x in Z^ncols : A x = 0} and rank(A).

    Unimodular column operations (Euclid on each row) bring A to column
    echelon form; the transformation columns matching zero columns span the
    kernel lattice, so each returned vector is primitive.
    """
    A = [list(map(int, row)) for row in A]
    U = [[int(i == j) for j in range(ncols)] for i in range(ncols)]  # U[col] is a column of U

    def col_sub(dst: int, src: int, q: int):
        for row in A:
            row[dst] -= q * row[src]
        Ud, Us = U[dst], U[src]
        for i in range(ncols):
            Ud[i] -= q * Us[i]

    def col_swap(a: int, b: int):
        for row in A:
            row[a], row[b] = row[b], row[a]
        U[a], U[b] = U[b], U[a]

    pivot = 0
    for row in A:
        if pivot >= ncols:
            break
        while True:
            nz = [j for j in range(pivot, ncols) if row[j] != 0]
            if not nz:
                break
            j = min(nz, key=lambda k: (abs(row[k]), k))
            if j != pivot:
                col_swap(pivot, j)
            others = [k for k in nz if k != j]
            if not others:
                pivot += 1
                break
            for k in range(pivot + 1, ncols):
                if row[k]:
                    col_sub(k, pivot, row[k] // row[pivot])
    kernel = [U[j] for j in range(pivot, ncols)]
    return _size_reduce(kernel), pivot


def _size_reduce(vectors: list[list[int]]) -> list[list[int]]:
    """Pairwise Gauss reduction; keeps the lattice, shrinks entries."""
    vecs = [list(v) for v in vectors]
    dot = lambda u, v: sum(a * b for a, b in zip(u, v))
    changed = True
    while changed:
        changed = False
        for i in range(len(vecs)):
            for j in range(len(vecs)):
                if i == j:
                    continue
                nj = dot(vecs[j], vecs[j])
                q = round(dot(vecs[i], vecs[j]) / nj)
                if q:
                    cand = [a - q * b for a, b in zip(vecs[i], vecs[j])]
                    if dot(cand, cand) < dot(vecs[i], vecs[i]):
                        vecs[i] = cand
                        changed = True
    for v in vecs:
        lead = next(a for a in v if a)
        if lead < 0:
            v[:] = [-a for a in v]
    return vecs


def cycle_basis(C: SimplicialComplex, m: int) -> CycleLattice:
    """Integer basis of the m-cycles (kernel of the boundary map on m-chains)."""
    if m < 1:
        raise ValueError("cycles are defined for m >= 1")
    n = C.count(m)
    D = C.boundary_matrix(m).toarray().tolist()
    kernel, rank = integer_kernel(D, n)
    basis = tuple(Chain(C, m, {i: a for i, a in enumerate(v) if a}, "integer") for v in kernel)
    return CycleLattice(C, m, basis, rank)


def sample_cycles(lat: CycleLattice, cap: float, count: int, seed: int) -> list[Chain]:
    """Integer combinations of basis cycles with mass <= cap.

    Coefficients are drawn uniformly from [-B, B] with
    ``B = ceil(cap / smallest basis-cycle mass)``. An empty lattice yields
    ``count`` zero chains.
    """
    if count < 1:
        raise ValueError("count must be at least 1")
    C, m = lat.complex, lat.dim
    if not lat.basis:
        return [C.zero(m) for _ in range(count)]
    B = math.ceil(cap / min(mass(z) for z in lat.basis))
    Z = lat.basis_matrix()
    vol = C.volume(m)
    gen = SplitMix64(seed)
    lo = np.full(lat.rank, -B)

    def draw():
        return gen.integers(lo, -lo, _BATCH_ROWS) @ Z

    def accept(rows):
        return np.abs(rows) @ vol <= cap + BALL_TOL

    rows = _rejection_sample(draw, accept, count)
    return [Chain.from_dense(C, m, r, "integer") for r in rows]
