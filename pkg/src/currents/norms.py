"""Mass, normal norm and flat norm of simplicial chains.

The flat norm is computed over decompositions ``T = R + dS`` with ``R`` an
m-chain and ``S`` an (m+1)-chain on the same complex. Absolute values are
linearized by splitting each coefficient into nonnegative parts.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .complex import Chain, boundary, chain_to_json
from .lp import MAX_INTEGER_VARS, LinearProgram, SizeGuardError, solve_ilp, solve_lp

__all__ = ["FlatDecomposition", "mass", "normal_norm", "flat_norm", "flat_distance", "decomposition_residual"]


def mass(T: Chain) -> float:
    vol = T.complex.volume(T.dim)
    return float(sum(abs(c) * vol[i] for i, c in T.items()))


def normal_norm(T: Chain) -> float:
    if T.dim == 0:
        return mass(T)
    return mass(T) + mass(boundary(T))


@dataclass(frozen=True)
class FlatDecomposition:
    value: float
    R: Chain
    S: Chain
    mode: str
    relaxation_bound: float | None = None

    def to_json(self) -> dict:
        out = {"value": self.value, "mode": self.mode, "R": chain_to_json(self.R), "S": chain_to_json(self.S)}
        if self.relaxation_bound is not None:
            out["relaxation_bound"] = self.relaxation_bound
        return out


def decomposition_residual(T: Chain, d: FlatDecomposition) -> float:
    """max |T - R - dS| componentwise (0 exactly for a valid integer certificate)."""
    diff = T - d.R
    if d.S.coefficients:
        diff = diff - boundary(d.S)
    return max((abs(v) for _, v in diff.items()), default=0)


def flat_norm(T: Chain, mode: str = "real") -> FlatDecomposition:
    """Flat norm of ``T`` with a certificate ``T = R + dS``.

    ``mode="real"`` solves the LP relaxation over real chains. ``mode="integer"``
    restricts S (hence R) to integer coefficients and solves a small ILP; it
    raises :class:`~currents.lp.SizeGuardError` when the complex has too many
    (m+1)-simplices for branch and bound.
    """
    if mode not in ("real", "integer"):
        raise ValueError(f"unknown flat-norm mode {mode!r}")
    if mode == "integer" and T.mode != "integer":
        raise ValueError("integer flat norm needs an integer chain")
    C = T.complex
    m = T.dim
    chain_mode = "integer" if mode == "integer" else "real"
    zero_S = C.zero(m + 1, chain_mode)
    if T.is_zero():
        return FlatDecomposition(0.0, C.zero(m, chain_mode), zero_S, mode, 0.0 if mode == "integer" else None)
    n_s = C.count(m + 1)
    if n_s == 0:
        value = mass(T)
        if mode == "integer":
            return FlatDecomposition(value, T, zero_S, mode, value)
        return FlatDecomposition(value, T.as_real(), zero_S, mode)
    if mode == "integer" and 2 * n_s > MAX_INTEGER_VARS:
        raise SizeGuardError(
            f"integer flat norm needs {2 * n_s} integer variables (guard {MAX_INTEGER_VARS}); use mode='real'"
        )

    n_r = C.count(m)
    vol_r = C.volume(m)
    vol_s = C.volume(m + 1)
    D = C.dense_boundary(m + 1)
    # variables: R+, R-, S+, S-
    c = np.concatenate([vol_r, vol_r, vol_s, vol_s])
    A = np.hstack([np.eye(n_r), -np.eye(n_r), D, -D])
    t = T.to_dense(float)
    p = LinearProgram(c, A, ("=",) * n_r, t)
    if mode == "real":
        sol = solve_lp(p)
    else:
        sol = solve_ilp(p, range(2 * n_r, 2 * n_r + 2 * n_s))
    if not sol.optimal:
        raise RuntimeError(f"flat-norm program returned {sol.status}")
    x = sol.x
    s = x[2 * n_r : 2 * n_r + n_s] - x[2 * n_r + n_s :]
    if mode == "integer":
        S = Chain.from_dense(C, m + 1, np.round(s).astype(np.int64), "integer")
        R = T - boundary(S)
    else:
        S = Chain.from_dense(C, m + 1, _clean(s), "real")
        r = t - D @ S.to_dense(float)
        R = Chain.from_dense(C, m, _clean(r), "real")
    value = mass(R) + mass(S)
    bound = sol.relaxation_bound if mode == "integer" else None
    return FlatDecomposition(value, R, S, mode, bound)


def _clean(v: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    v = v.copy()
    v[np.abs(v) < tol] = 0.0
    return v


def flat_distance(A: Chain, B: Chain, mode: str = "real") -> float:
    return flat_norm(A - B, mode).value if A != B else 0.0

