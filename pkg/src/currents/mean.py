"""Addition-invariant mean of a bounded function on integer chains.

Given shifts Y_1..Y_N and probes X_1..X_M, find convex weights lambda making
``F(X) = sum_i lambda_i f(X + Y_i)`` as flat as possible over the probes. The
midrange of F is the mean estimate and its half-oscillation is the certified
epsilon. Both are certified on the probe set only.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field

import numpy as np

from .ball import MassBall, cycle_basis, sample_ball, sample_cycles
from .complex import Chain, boundary, chain_to_json
from .forms import Cochain, ComplexScalar, gk_eval, pair
from .lp import LinearProgram, solve_lp
from .rng import derive_seed

__all__ = [
    "FunctionSpec",
    "ShiftFamily",
    "MeanEstimate",
    "ShiftReport",
    "estimate_mean",
    "check_shift_invariance",
    "epsilon_profile",
    "sample_family",
]

KINDS = ("constant", "parity", "phase", "gk")
CERT_TOL = 1e-9


@dataclass(frozen=True)
class FunctionSpec:
    """A bounded function on integer chains, optionally precomposed with X -> X + offset."""

    kind: str
    value: complex = 0.0
    cochain: Cochain | None = None
    flat_mode: str = "real"
    offset: Chain | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown function kind {self.kind!r}")
        if self.kind in ("phase", "gk") and self.cochain is None:
            raise ValueError(f"{self.kind} needs a cochain")

    @classmethod
    def constant(cls, c) -> "FunctionSpec":
        return cls("constant", value=complex(c))

    @classmethod
    def parity(cls) -> "FunctionSpec":
        return cls("parity")

    @classmethod
    def phase(cls, k: Cochain) -> "FunctionSpec":
        return cls("phase", cochain=k)

    @classmethod
    def gk(cls, k: Cochain, flat_mode: str = "real") -> "FunctionSpec":
        return cls("gk", cochain=k, flat_mode=flat_mode)

    @property
    def bound(self) -> float:
        return abs(self.value) if self.kind == "constant" else 1.0

    def shifted(self, Y: Chain) -> "FunctionSpec":
        """The function X -> f(X + Y)."""
        offset = Y if self.offset is None else self.offset + Y
        return FunctionSpec(self.kind, self.value, self.cochain, self.flat_mode, offset)

    def __call__(self, X: Chain) -> complex:
        if self.offset is not None:
            X = X + self.offset
        if self.kind == "constant":
            return complex(self.value)
        if self.kind == "parity":
            return complex(-1.0 if sum(X.coefficients.values()) % 2 else 1.0)
        if self.kind == "phase":
            return cmath.exp(1j * pair(self.cochain, X))
        return complex(gk_eval(self.cochain, X, self.flat_mode))

    def to_json(self) -> dict:
        out = {"kind": self.kind}
        if self.kind == "constant":
            out["value"] = {"re": self.value.real, "im": self.value.imag}
        if self.kind == "gk":
            out["flat_mode"] = self.flat_mode
        return out


@dataclass(frozen=True)
class ShiftFamily:
    shifts: tuple
    provenance: str = "enumerated"

    def __post_init__(self):
        shifts = tuple(self.shifts)
        if not shifts:
            raise ValueError("shift family is empty")
        first = shifts[0]
        if any(Y.complex is not first.complex or Y.dim != first.dim for Y in shifts):
            raise ValueError("shifts must share complex and dimension")
        if len({Y.key() for Y in shifts}) != len(shifts):
            raise ValueError("shifts must be distinct")
        if not any(Y.is_zero() for Y in shifts):
            raise ValueError("shift family must contain the zero chain")
        object.__setattr__(self, "shifts", shifts)

    def __len__(self):
        return len(self.shifts)

    def prefix(self, n: int) -> "ShiftFamily":
        """First n shifts, keeping the zero chain."""
        chosen = list(self.shifts[:n])
        if not any(Y.is_zero() for Y in chosen):
            chosen[-1] = next(Y for Y in self.shifts if Y.is_zero())
        return ShiftFamily(tuple(chosen), self.provenance)


@dataclass
class MeanEstimate:
    lam: np.ndarray
    mean: ComplexScalar
    epsilon: float
    probes: list
    shifts: ShiftFamily
    strategy: str
    values: np.ndarray = field(repr=False, default=None)
    certified_on: str = "probe set"

    def to_json(self) -> dict:
        return {
            "strategy": self.strategy,
            "lambda": self.lam.tolist(),
            "shifts": [chain_to_json(Y) for Y in self.shifts.shifts],
            "mean": self.mean.to_json(),
            "epsilon": self.epsilon,
            "certified_on": self.certified_on,
            "probe_count": len(self.probes),
        }


def _check_inputs(shifts: ShiftFamily, probes: list, cycles_only: bool):
    if not probes:
        raise ValueError("probe set is empty")
    ref = shifts.shifts[0]
    for X in probes:
        if X.complex is not ref.complex or X.dim != ref.dim:
            raise ValueError("probes and shifts must share complex and dimension")
    if cycles_only:
        for T in list(shifts.shifts) + list(probes):
            if T.dim == 0 or not boundary(T).is_zero():
                raise ValueError("cycles-only mode needs chains with zero boundary")


def _band_program(components: list[np.ndarray]) -> LinearProgram:
    """min t over the simplex with l_c <= G_c @ lam <= u_c and u_c - l_c <= t.

    Variables are lam (N), then (l_c, u_c) per component, then t.
    """
    M, N = components[0].shape
    K = len(components)
    nv = N + 2 * K + 1
    rows, senses, rhs = [], [], []

    def add(r, sense, b):
        rows.append(r)
        senses.append(sense)
        rhs.append(b)

    r = np.zeros(nv)
    r[:N] = 1.0
    add(r, "=", 1.0)
    for c, G in enumerate(components):
        lo, hi = N + 2 * c, N + 2 * c + 1
        for j in range(M):
            r = np.zeros(nv)
            r[:N] = G[j]
            r[hi] = -1.0
            add(r, "<=", 0.0)
            r = np.zeros(nv)
            r[:N] = G[j]
            r[lo] = -1.0
            add(r, ">=", 0.0)
        r = np.zeros(nv)
        r[hi], r[lo], r[-1] = 1.0, -1.0, -1.0
        add(r, "<=", 0.0)
    cost = np.zeros(nv)
    cost[-1] = 1.0
    lower = np.concatenate([np.zeros(N), np.full(nv - N, -np.inf)])
    return LinearProgram(cost, np.array(rows), tuple(senses), np.array(rhs), lower, np.full(nv, np.inf))


def _solve_band(components: list[np.ndarray]) -> tuple[np.ndarray, float]:
    sol = solve_lp(_band_program(components))
    if not sol.optimal:
        raise RuntimeError(f"internal error: oscillation program returned {sol.status}")
    N = components[0].shape[1]
    return sol.x[:N], sol.objective_value


def _evaluate(f: FunctionSpec, probes, shifts, memo=None) -> np.ndarray:
    memo = {} if memo is None else memo
    F = np.empty((len(probes), len(shifts)), dtype=complex)
    for j, X in enumerate(probes):
        for i, Y in enumerate(shifts):
            Z = X + Y
            key = Z.key()
            if key not in memo:
                memo[key] = f(Z)
            F[j, i] = memo[key]
    return F


def estimate_mean(
    f: FunctionSpec,
    shifts: ShiftFamily,
    probes: list,
    strategy: str = "lp",
    cycles_only: bool = False,
) -> MeanEstimate:
    """Flatten ``f`` over the probes with convex weights on the shifts.

    ``strategy="uniform"`` uses equal weights. ``strategy="lp"`` picks one weight
    vector minimizing the larger of the real and imaginary oscillations, which is
    twice the reported epsilon; uniform weights are feasible, so lp never does worse.
    """
    if strategy not in ("lp", "uniform"):
        raise ValueError(f"unknown strategy {strategy!r}")
    probes = list(probes)
    _check_inputs(shifts, probes, cycles_only)
    F = _evaluate(f, probes, shifts.shifts)
    N = len(shifts)
    if strategy == "uniform":
        lam = np.full(N, 1.0 / N)
    else:
        parts = [F.real] + ([F.imag] if np.ptp(F.imag) > 0 else [])
        lam, _ = _solve_band(parts)
        lam = np.maximum(lam, 0.0)
        lam = lam / lam.sum()
    v = F @ lam
    lo_re, hi_re = v.real.min(), v.real.max()
    lo_im, hi_im = v.imag.min(), v.imag.max()
    mean = ComplexScalar((lo_re + hi_re) / 2, (lo_im + hi_im) / 2)
    eps = max((hi_re - lo_re) / 2, (hi_im - lo_im) / 2)
    return MeanEstimate(lam, mean, float(eps), probes, shifts, strategy, F)


@dataclass
class ShiftReport:
    difference: float
    original: MeanEstimate
    shifted: MeanEstimate
    passed: bool

    def to_json(self) -> dict:
        return {
            "difference": self.difference,
            "epsilon_original": self.original.epsilon,
            "epsilon_shifted": self.shifted.epsilon,
            "mean_original": self.original.mean.to_json(),
            "mean_shifted": self.shifted.mean.to_json(),
            "passed": self.passed,
            "certified_on": "probe set",
        }


def check_shift_invariance(
    f: FunctionSpec,
    shifts: ShiftFamily,
    probes: list,
    Y: Chain,
    strategy: str = "lp",
    cycles_only: bool = False,
    tol: float = CERT_TOL,
) -> ShiftReport:
    """Compare the estimates for f and for X -> f(X + Y)."""
    if cycles_only and (Y.dim == 0 or not boundary(Y).is_zero()):
        raise ValueError("cycles-only mode needs a shift with zero boundary")
    e1 = estimate_mean(f, shifts, probes, strategy, cycles_only)
    e2 = estimate_mean(f.shifted(Y), shifts, probes, strategy, cycles_only)
    diff = abs(complex(e1.mean) - complex(e2.mean))
    return ShiftReport(diff, e1, e2, bool(diff <= e1.epsilon + e2.epsilon + tol))


def epsilon_profile(f: FunctionSpec, shifts: ShiftFamily, probes: list, counts, strategy: str = "lp") -> list:
    """(shift count, epsilon) pairs over prefixes of the family."""
    return [(n, estimate_mean(f, shifts.prefix(n), probes, strategy).epsilon) for n in counts]


def sample_family(C, dim: int, count: int, cap: float, seed: int, cycles_only: bool = False) -> ShiftFamily:
    """Zero chain plus up to ``count - 1`` distinct sampled chains (or cycles)."""
    if count < 1:
        raise ValueError("need at least one shift")
    if cycles_only:
        lattice = cycle_basis(C, dim)

        def draw(n, s):
            return sample_cycles(lattice, cap, n, s)
    else:
        ball = MassBall(C, dim, cap)

        def draw(n, s):
            return sample_ball(ball, n, s)

    chosen = {C.zero(dim).key(): C.zero(dim)}
    for attempt in range(8):
        for T in draw(4 * count, derive_seed(seed, attempt)):
            if len(chosen) >= count:
                break
            chosen.setdefault(T.key(), T)
        if len(chosen) >= count:
            break
    return ShiftFamily(tuple(chosen.values()), f"sampled({seed})")

