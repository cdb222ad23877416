"""Cochains as discrete differential forms, and the functional

    g_k(X) = exp(i * (<k, X> + flat(X)))

on integer 2-chains, with an empirical check of its Lipschitz bound
``1 + max(comass(k), comass(dk))`` in the flat metric.
"""

from __future__ import annotations

import cmath
import itertools
import math
import numbers
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Callable, Mapping

import numpy as np

from .complex import Chain, ComplexFormatError, SimplicialComplex, permutation_sign
from .norms import flat_norm

__all__ = [
    "Cochain",
    "SmoothFormSpec",
    "ComplexScalar",
    "LipschitzReport",
    "pair",
    "coboundary",
    "comass",
    "discretize_form",
    "constant_form",
    "linear_form",
    "parse_form",
    "gk_eval",
    "verify_gk_lipschitz",
    "chord",
    "cochain_to_json",
    "cochain_from_json",
]


@dataclass(frozen=True, eq=False)
class Cochain:
    """Real value per oriented m-simplex (the integral of a form over it)."""

    complex: SimplicialComplex = field(repr=False)
    dim: int
    values: Mapping[int, float] = field(default_factory=dict)

    def __post_init__(self):
        n = self.complex.count(self.dim)
        clean = {}
        for idx, v in sorted(dict(self.values).items()):
            if isinstance(idx, bool) or not isinstance(idx, numbers.Integral) or not 0 <= idx < n:
                raise IndexError(f"simplex index {idx!r} out of range for dimension {self.dim} ({n} simplices)")
            v = float(v)
            if not math.isfinite(v):
                raise ValueError("cochain values must be finite")
            if v != 0.0:
                clean[int(idx)] = v
        object.__setattr__(self, "values", MappingProxyType(clean))

    @classmethod
    def from_dense(cls, complex, dim, values) -> "Cochain":
        return cls(complex, dim, {i: v for i, v in enumerate(np.asarray(values, float).tolist()) if v})

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.complex.count(self.dim))
        for i, v in self.values.items():
            out[i] = v
        return out

    def __add__(self, other: "Cochain") -> "Cochain":
        return Cochain.from_dense(self.complex, self.dim, self.to_dense() + other.to_dense())

    def __mul__(self, c: float) -> "Cochain":
        return Cochain(self.complex, self.dim, {i: c * v for i, v in self.values.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, Cochain):
            return NotImplemented
        return self.complex is other.complex and self.dim == other.dim and dict(self.values) == dict(other.values)

    def __hash__(self):
        return hash((id(self.complex), self.dim, tuple(self.values.items())))


@dataclass(frozen=True)
class SmoothFormSpec:
    """An m-form given pointwise by its antisymmetric coefficient tensor.

    ``evaluator(x)`` returns an array of shape ``(n,) * degree`` with
    ``omega(v1, ..., vm) = sum A[i1..im] v1[i1] ... vm[im]``.
    """

    degree: int
    evaluator: Callable[[np.ndarray], np.ndarray]
    name: str = ""


@dataclass(frozen=True)
class ComplexScalar:
    re: float
    im: float

    def __post_init__(self):
        object.__setattr__(self, "re", float(self.re))
        object.__setattr__(self, "im", float(self.im))

    @classmethod
    def from_complex(cls, z: complex) -> "ComplexScalar":
        return cls(float(z.real), float(z.imag))

    @classmethod
    def from_phase(cls, theta: float) -> "ComplexScalar":
        return cls(math.cos(theta), math.sin(theta))

    def __complex__(self):
        return complex(self.re, self.im)

    def modulus(self) -> float:
        return math.hypot(self.re, self.im)

    def to_json(self) -> dict:
        return {"re": self.re, "im": self.im}


def _check_same(k: Cochain, T: Chain):
    if k.dim != T.dim:
        raise ValueError(f"cannot pair a {k.dim}-cochain with a {T.dim}-chain")
    if k.complex is not T.complex:
        raise ValueError("cochain and chain live on different complexes")


def pair(k: Cochain, T: Chain) -> float:
    _check_same(k, T)
    vals = k.values
    return float(math.fsum(c * vals[i] for i, c in T.items() if i in vals))


def coboundary(k: Cochain) -> Cochain:
    """(dk)(tau) = k(boundary tau) on every (m+1)-simplex tau."""
    C = k.complex
    m = k.dim
    if C.count(m + 1) == 0:
        return Cochain(C, m + 1, {})
    faces, signs = C.face_table(m + 1)
    dense = k.to_dense()
    return Cochain.from_dense(C, m + 1, (dense[faces] * signs).sum(axis=1))


def comass(k: Cochain) -> float:
    """max over simplices of |k(s)| / vol(s); 0 for the zero cochain."""
    vol = k.complex.volume(k.dim)
    return max((abs(v) / vol[i] for i, v in k.values.items()), default=0.0)


def chord(alpha: float) -> float:
    """|1 - exp(i alpha)|."""
    return abs(1 - cmath.exp(1j * alpha))


# reference points (barycentric coordinates after the first vertex) and weights
# on the standard m-simplex; weights sum to 1/m!
_G = 0.5 / math.sqrt(3.0)
_RULES = {
    (0, 1): ([[]], [1.0]),
    (0, 2): ([[]], [1.0]),
    (1, 2): ([[0.5 - _G], [0.5 + _G]], [0.5, 0.5]),
    (2, 2): ([[1 / 6, 1 / 6], [2 / 3, 1 / 6], [1 / 6, 2 / 3]], [1 / 6, 1 / 6, 1 / 6]),
}


def _rule(m: int, order: int):
    if order == 1:
        return [[1.0 / (m + 1)] * m], [1.0 / math.factorial(m)]
    if (m, order) in _RULES:
        return _RULES[(m, order)]
    raise ValueError(f"no quadrature of order {order} for {m}-simplices")


def _contract(A: np.ndarray, E: np.ndarray) -> float:
    """Full contraction of an m-tensor with the m columns of E."""
    out = np.asarray(A, dtype=float)
    for j in range(E.shape[1]):
        out = np.tensordot(out, E[:, j], axes=([0], [0]))
    return float(out)


def discretize_form(f: SmoothFormSpec, C: SimplicialComplex, order: int = 2) -> Cochain:
    """Integrate ``f`` over every canonically oriented ``f.degree``-simplex."""
    m = f.degree
    if m < 0 or m > C.top_dim:
        raise ValueError(f"degree {m} not available on a complex of dimension {C.top_dim}")
    if order not in (1, 2):
        raise ValueError("quadrature order must be 1 or 2")
    points, weights = _rule(m, order)
    out = {}
    for j, s in enumerate(C.simplices[m]):
        P = C.vertices[list(s)]
        E = (P[1:] - P[0]).T
        total = 0.0
        for t, w in zip(points, weights):
            x = P[0] + E @ np.asarray(t, dtype=float) if m else P[0]
            total += w * _contract(f.evaluator(x), E)
        out[j] = total
    return Cochain(C, m, out)


def _tensor_from_components(comps, n: int, m: int) -> np.ndarray:
    """Antisymmetric tensor from coefficients of dx^I over increasing I (lexicographic)."""
    index_sets = list(itertools.combinations(range(n), m))
    comps = list(comps)
    if len(comps) != len(index_sets):
        raise ValueError(f"a {m}-form in R^{n} has {len(index_sets)} components, got {len(comps)}")
    A = np.zeros((n,) * m)
    for I, a in zip(index_sets, comps):
        for perm in itertools.permutations(range(m)):
            A[tuple(I[p] for p in perm)] = permutation_sign(perm) * a
    return A


def constant_form(degree: int, components, n: int) -> SmoothFormSpec:
    A = _tensor_from_components(components, n, degree)
    return SmoothFormSpec(degree, lambda x: A, f"const:{','.join(map(str, components))}")


def linear_form(degree: int, matrix, n: int) -> SmoothFormSpec:
    """Affine coefficients: row I of ``matrix`` is [a_I0, a_I1, ..., a_In],
    giving the dx^I coefficient a_I0 + sum_j a_Ij x_j."""
    rows = np.asarray(matrix, dtype=float)
    if rows.ndim != 2 or rows.shape[1] != n + 1:
        raise ValueError(f"linear form rows need {n + 1} entries")
    base = _tensor_from_components(rows[:, 0], n, degree)
    slopes = [_tensor_from_components(rows[:, j + 1], n, degree) for j in range(n)]

    def evaluate(x):
        return base + sum(x[j] * slopes[j] for j in range(n))

    return SmoothFormSpec(degree, evaluate, "linear")


def parse_form(text: str, degree: int, n: int) -> SmoothFormSpec:
    """``const:a,b,...`` or ``linear:r0;r1;...`` with comma-separated rows."""
    kind, _, body = text.partition(":")
    try:
        if kind == "const":
            return constant_form(degree, [float(v) for v in body.split(",")], n)
        if kind == "linear":
            return linear_form(degree, [[float(v) for v in row.split(",")] for row in body.split(";")], n)
    except ValueError as exc:
        raise ComplexFormatError(f"bad form {text!r}: {exc}") from None
    raise ComplexFormatError(f"unknown form kind {kind!r} (expected const: or linear:)")


def gk_eval(k: Cochain, X: Chain, flat_mode: str = "real", flat_value: float | None = None) -> ComplexScalar:
    """exp(i * (<k, X> + flat(X))) for an integer 2-chain X."""
    if X.mode != "integer":
        raise ValueError("g_k is defined on integer chains")
    _check_same(k, X)
    if flat_value is None:
        flat_value = flat_norm(X, flat_mode).value
    return ComplexScalar.from_phase(pair(k, X) + flat_value)


@dataclass
class LipschitzReport:
    trials: int
    compared: int
    max_ratio: float
    bound: float
    comass_k: float
    comass_dk: float
    passed: bool
    flat_mode: str

    def to_json(self) -> dict:
        return dict(self.__dict__)


def verify_gk_lipschitz(
    k: Cochain, trials: int, seed: int, mass_cap: float, flat_mode: str = "real", tol: float = 1e-9
) -> LipschitzReport:
    """Sample (X, X~, Y) from the mass ball and compare
    |g_k(X+Y) - g_k(X~+Y)| / flat(X - X~) with 1 + max(comass(k), comass(dk))."""
    from .ball import MassBall, sample_ball

    if trials < 1:
        raise ValueError("trials must be at least 1")
    if k.dim != 2 or k.complex.count(2) == 0:
        raise ValueError("g_k needs a 2-cochain on a complex with 2-simplices")
    C = k.complex
    chains = sample_ball(MassBall(C, 2, mass_cap), 3 * trials, seed)
    flats: dict = {}

    def flat(T: Chain) -> float:
        key = T.key()
        if key not in flats:
            flats[key] = flat_norm(T, flat_mode).value
        return flats[key]

    def g(T: Chain) -> complex:
        return complex(gk_eval(k, T, flat_mode, flat(T)))

    ck, cdk = comass(k), comass(coboundary(k))
    bound = 1.0 + max(ck, cdk)
    worst = 0.0
    compared = 0
    for t in range(trials):
        X, Xt, Y = chains[3 * t : 3 * t + 3]
        if X == Xt:
            continue
        compared += 1
        ratio = abs(g(X + Y) - g(Xt + Y)) / flat(X - Xt)
        worst = max(worst, ratio)
    return LipschitzReport(trials, compared, worst, bound, ck, cdk, bool(worst <= bound + tol), flat_mode)


def cochain_to_json(k: Cochain) -> dict:
    return {"dim": k.dim, "mode": "real", "coefficients": [[i, v] for i, v in k.values.items()]}


def cochain_from_json(C: SimplicialComplex, data) -> Cochain:
    try:
        dim = data["dim"]
        pairs = data["coefficients"]
    except (KeyError, TypeError):
        raise ComplexFormatError("cochain JSON needs 'dim' and 'coefficients'") from None
    values = {}
    for pair_ in pairs:
        if not isinstance(pair_, list) or len(pair_) != 2:
            raise ComplexFormatError(f"bad coefficient entry {pair_!r}")
        values[pair_[0]] = pair_[1]
    try:
        return Cochain(C, dim, values)
    except (IndexError, TypeError, ValueError) as exc:
        raise ComplexFormatError(str(exc)) from None
