"""Dense two-phase tableau simplex and a small branch-and-bound ILP solver.

Pricing is Dantzig (most negative reduced cost) until 50 consecutive
degenerate pivots occur, after which Bland's rule is used for the rest of the
phase. Ratio-test ties always go to the basic variable with the smallest
column index, so every solve is deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

__all__ = [
    "LinearProgram",
    "LpSolution",
    "SolverStalled",
    "SizeGuardError",
    "solve_lp",
    "solve_ilp",
    "OPTIMAL",
    "INFEASIBLE",
    "UNBOUNDED",
]

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

FEAS_TOL = 1e-9
OPT_TOL = 1e-9
PIVOT_TOL = 1e-11
TIE_TOL = 1e-12
BLAND_AFTER = 50
MAX_INTEGER_VARS = 64


class SolverStalled(RuntimeError):
    """The simplex method hit its pivot (or node) budget without finishing."""


class SizeGuardError(RuntimeError):
    """Problem exceeds a desk-scale size guard."""


@dataclass(frozen=True)
class LinearProgram:
    """minimize c @ x  s.t.  A[i] @ x (<=|=|>=) b[i],  lower <= x <= upper.

    Bounds default to ``0 <= x < inf``.
    """

    c: np.ndarray
    A: np.ndarray = None
    senses: tuple = ()
    b: np.ndarray = None
    lower: np.ndarray = None
    upper: np.ndarray = None

    def __post_init__(self):
        c = np.asarray(self.c, dtype=float).ravel()
        n = c.size
        if n == 0:
            raise ValueError("linear program needs at least one variable")
        if not np.all(np.isfinite(c)):
            raise ValueError("objective must be finite")
        A = np.zeros((0, n)) if self.A is None else np.asarray(self.A, dtype=float).reshape(-1, n)
        b = np.zeros(0) if self.b is None else np.asarray(self.b, dtype=float).ravel()
        senses = tuple(self.senses) if self.senses else ("<=",) * A.shape[0]
        if not (A.shape[0] == b.size == len(senses)):
            raise ValueError("constraint rows, senses and right-hand sides disagree")
        if any(s not in ("<=", "=", ">=") for s in senses):
            raise ValueError(f"unknown relation in {senses}")
        lower = np.zeros(n) if self.lower is None else np.asarray(self.lower, dtype=float).ravel()
        upper = np.full(n, np.inf) if self.upper is None else np.asarray(self.upper, dtype=float).ravel()
        if lower.size != n or upper.size != n:
            raise ValueError("bounds must match the number of variables")
        for name, val in (("c", c), ("A", A), ("b", b), ("lower", lower), ("upper", upper)):
            object.__setattr__(self, name, val)
        object.__setattr__(self, "senses", senses)

    @property
    def n(self) -> int:
        return self.c.size

    def with_bounds(self, lower, upper) -> "LinearProgram":
        return replace(self, lower=lower, upper=upper)

    def residual(self, x: np.ndarray) -> float:
        """Largest violation of any row or bound at ``x``."""
        worst = 0.0
        if self.A.shape[0]:
            ax = self.A @ x
            for s, lhs, rhs in zip(self.senses, ax, self.b):
                if s == "<=":
                    worst = max(worst, lhs - rhs)
                elif s == ">=":
                    worst = max(worst, rhs - lhs)
                else:
                    worst = max(worst, abs(lhs - rhs))
        with np.errstate(invalid="ignore"):
            worst = max(worst, float(np.max(self.lower - x, initial=0.0)), float(np.max(x - self.upper, initial=0.0)))
        return worst


@dataclass
class LpSolution:
    status: str
    x: np.ndarray
    objective_value: float
    max_primal_residual: float = 0.0
    relaxation_bound: float | None = None
    pivots: int = 0
    nodes: int = 0

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


@dataclass
class _StandardForm:
    A: np.ndarray
    b: np.ndarray
    c: np.ndarray
    offset: np.ndarray
    M: np.ndarray  # x = offset + M @ y[: M.shape[1]]
    n_structural: int
    infeasible_bounds: bool = False


def _standard_form(p: LinearProgram) -> _StandardForm:
    n = p.n
    offset = np.zeros(n)
    mcols: list[tuple[int, float]] = []
    ub_rows: list[tuple[int, float]] = []
    infeasible = False
    for j in range(n):
        lo, hi = p.lower[j], p.upper[j]
        if lo > hi:
            infeasible = True
        if math.isfinite(lo):
            offset[j] = lo
            mcols.append((j, 1.0))
            if math.isfinite(hi):
                ub_rows.append((len(mcols) - 1, hi - lo))
        elif math.isfinite(hi):
            offset[j] = hi
            mcols.append((j, -1.0))
        else:
            mcols.append((j, 1.0))
            mcols.append((j, -1.0))
    ny = len(mcols)
    M = np.zeros((n, ny))
    for k, (j, s) in enumerate(mcols):
        M[j, k] = s
    rows_A = p.A @ M if p.A.shape[0] else np.zeros((0, ny))
    rows_b = p.b - (p.A @ offset if p.A.shape[0] else 0.0)
    senses = list(p.senses)
    if ub_rows:
        extra = np.zeros((len(ub_rows), ny))
        for r, (k, cap) in enumerate(ub_rows):
            extra[r, k] = 1.0
        rows_A = np.vstack([rows_A, extra])
        rows_b = np.concatenate([rows_b, [cap for _, cap in ub_rows]])
        senses += ["<="] * len(ub_rows)
    m = rows_A.shape[0]
    n_slack = sum(1 for s in senses if s != "=")
    A = np.zeros((m, ny + n_slack))
    A[:, :ny] = rows_A
    k = ny
    for i, s in enumerate(senses):
        if s == "<=":
            A[i, k] = 1.0
            k += 1
        elif s == ">=":
            A[i, k] = -1.0
            k += 1
    b = rows_b.astype(float).copy()
    neg = b < 0
    A[neg] *= -1.0
    b[neg] *= -1.0
    c = np.zeros(ny + n_slack)
    c[:ny] = p.c @ M
    return _StandardForm(A, b, c, offset, M, ny, infeasible)


def _pivot(T: np.ndarray, r: int, e: int) -> None:
    T[r] /= T[r, e]
    col = T[:, e].copy()
    col[r] = 0.0
    T -= np.outer(col, T[r])


def _run_simplex(T, basis, allowed, max_pivots, counter) -> str:
    """Iterate on tableau ``T`` (objective in the last row) until optimal/unbounded."""
    m = T.shape[0] - 1
    bland = False
    degenerate_run = 0
    while True:
        d = T[-1, :-1]
        cand = np.flatnonzero((d < -OPT_TOL) & allowed)
        if cand.size == 0:
            return OPTIMAL
        e = int(cand[0]) if bland else int(cand[np.argmin(d[cand])])
        col = T[:m, e]
        pos = np.flatnonzero(col > PIVOT_TOL)
        if pos.size == 0:
            return UNBOUNDED
        ratios = T[pos, -1] / col[pos]
        best = ratios.min()
        ties = pos[ratios <= best + TIE_TOL * max(1.0, abs(best))]
        r = int(min(ties, key=lambda i: basis[i]))
        degenerate_run = degenerate_run + 1 if T[r, -1] <= FEAS_TOL else 0
        if degenerate_run >= BLAND_AFTER:
            bland = True
        _pivot(T, r, e)
        basis[r] = e
        counter[0] += 1
        if counter[0] > max_pivots:
            raise SolverStalled(f"simplex exceeded {max_pivots} pivots")


def solve_lp(p: LinearProgram, max_pivots: int | None = None) -> LpSolution:
    """Solve ``p`` to a basic optimal solution, or report infeasible/unbounded."""
    sf = _standard_form(p)
    n = p.n
    if sf.infeasible_bounds:
        return LpSolution(INFEASIBLE, np.full(n, np.nan), math.inf, math.inf)
    A, b = sf.A, sf.b
    m, N = A.shape
    if max_pivots is None:
        max_pivots = 50 * (m + N) + 1000

    # crash basis: columns that are positive multiples of unit vectors
    basis = [-1] * m
    used = set()
    nz = A != 0
    single = np.flatnonzero(nz.sum(axis=0) == 1)
    for k in single[::-1]:  # prefer slacks (they sit at the end)
        i = int(np.flatnonzero(nz[:, k])[0])
        if A[i, k] > 0 and basis[i] < 0 and k not in used:
            basis[i] = int(k)
            used.add(int(k))
    art_rows = [i for i in range(m) if basis[i] < 0]
    n_art = len(art_rows)
    T = np.zeros((m + 1, N + n_art + 1))
    T[:m, :N] = A
    T[:m, -1] = b
    for a, i in enumerate(art_rows):
        T[i, N + a] = 1.0
        basis[i] = N + a
    for i in range(m):
        k = basis[i]
        if k < N:
            T[i] /= T[i, k]
    counter = [0]
    allowed = np.ones(N + n_art, dtype=bool)

    if n_art:
        T[-1, :] = 0.0
        T[-1, N:N + n_art] = 1.0
        for i in art_rows:
            T[-1] -= T[i]
        _run_simplex(T, basis, allowed, max_pivots, counter)
        if -T[-1, -1] > FEAS_TOL * max(1.0, float(np.max(b, initial=0.0))):
            return LpSolution(INFEASIBLE, np.full(n, np.nan), math.inf, math.inf, pivots=counter[0])
        drop = []
        for i in range(m):
            if basis[i] >= N:
                row = T[i, :N]
                cand = np.flatnonzero(np.abs(row) > 1e-9)
                if cand.size:
                    e = int(cand[np.argmax(np.abs(row[cand]))])
                    _pivot(T, i, e)
                    basis[i] = e
                else:
                    drop.append(i)
        if drop:
            keep = [i for i in range(m) if i not in drop]
            T = T[keep + [m]]
            basis = [basis[i] for i in keep]
            A = A[keep]
            b = b[keep]
            m = len(keep)
        T = np.delete(T, np.s_[N:N + n_art], axis=1)
        allowed = np.ones(N, dtype=bool)

    T[-1, :] = 0.0
    T[-1, :N] = sf.c
    for i in range(m):
        T[-1] -= sf.c[basis[i]] * T[i]
    status = _run_simplex(T, basis, allowed, max_pivots, counter)

    y = np.zeros(N)
    y[basis] = T[:m, -1]
    if m:
        try:
            polished = np.linalg.solve(A[:, basis], b)
            if np.all(polished >= -FEAS_TOL):
                y[:] = 0.0
                y[basis] = polished
        except np.linalg.LinAlgError:
            pass
    y = np.maximum(y, 0.0)
    x = sf.offset + sf.M @ y[: sf.n_structural]
    x = np.clip(x, p.lower, p.upper)
    if status == UNBOUNDED:
        return LpSolution(UNBOUNDED, x, -math.inf, p.residual(x), pivots=counter[0])
    return LpSolution(OPTIMAL, x, float(p.c @ x), p.residual(x), pivots=counter[0])


def solve_ilp(
    p: LinearProgram,
    integer_vars: Sequence[int],
    max_nodes: int = 200_000,
    integrality_tol: float = 1e-6,
) -> LpSolution:
    """Branch and bound over LP relaxations.

    Branches on the most fractional integer variable, explores depth-first
    (nearer rounding first) and prunes nodes whose relaxation cannot beat the
    incumbent. ``relaxation_bound`` on the result is the root LP value.
    """
    ints = sorted(set(int(j) for j in integer_vars))
    if len(ints) > MAX_INTEGER_VARS:
        raise SizeGuardError(
            f"{len(ints)} integer variables exceed the branch-and-bound guard of {MAX_INTEGER_VARS}"
        )
    if any(j < 0 or j >= p.n for j in ints):
        raise IndexError("integer variable index out of range")
    root = solve_lp(p)
    root.relaxation_bound = root.objective_value
    if not ints or not root.optimal:
        return root

    idx = np.array(ints)
    best: LpSolution | None = None
    best_val = math.inf
    nodes = 0
    pivots = 0
    stack = [(p.lower.copy(), p.upper.copy(), root)]
    while stack:
        lo, hi, sol = stack.pop()
        if sol is None:
            sol = solve_lp(p.with_bounds(lo, hi))
        nodes += 1
        pivots += sol.pivots
        if nodes > max_nodes:
            raise SolverStalled(f"branch and bound exceeded {max_nodes} nodes")
        if not sol.optimal or sol.objective_value >= best_val - OPT_TOL:
            continue
        vals = sol.x[idx]
        frac = np.abs(vals - np.round(vals))
        if frac.max() <= integrality_tol:
            x = sol.x.copy()
            x[idx] = np.round(vals)
            best = LpSolution(OPTIMAL, x, float(p.c @ x), p.residual(x))
            best_val = best.objective_value
            continue
        k = int(np.argmax(frac))
        j = ints[k]
        v = sol.x[j]
        down_hi = hi.copy()
        down_hi[j] = math.floor(v)
        up_lo = lo.copy()
        up_lo[j] = math.ceil(v)
        down = (lo, down_hi, None)
        up = (up_lo, hi, None)
        # the child nearer to v is popped first
        if v - math.floor(v) < 0.5:
            stack += [up, down]
        else:
            stack += [down, up]

    if best is None:
        out = LpSolution(INFEASIBLE, np.full(p.n, np.nan), math.inf, math.inf)
    else:
        out = best
    out.relaxation_bound = root.objective_value
    out.nodes = nodes
    out.pivots = pivots
    return out
