"""Embedded oriented simplicial complexes and sparse integer/real chains.

Simplices are stored with canonical (ascending) vertex order and indexed per
dimension in lexicographic order of their vertex tuples. The boundary of a
canonical simplex (v0, ..., vm) is sum_i (-1)^i (v0, ..., vi^, ..., vm).
"""

from __future__ import annotations

import itertools
import json
import math
import numbers
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from types import MappingProxyType
from typing import Iterable, Mapping

import numpy as np
from scipy import sparse

__all__ = [
    "ComplexFormatError",
    "DegenerateSimplexError",
    "SimplicialComplex",
    "Chain",
    "ValidationReport",
    "load_complex",
    "parse_complex",
    "boundary",
    "validate_complex",
    "chain_to_json",
    "chain_from_json",
    "load_chain",
    "permutation_sign",
]

VOLUME_TOL = 1e-12
MODES = ("integer", "real")


class ComplexFormatError(ValueError):
    """Malformed ``.scx`` input or chain JSON."""


class DegenerateSimplexError(ValueError):
    """A simplex embeds with (numerically) zero volume."""


def permutation_sign(seq: Iterable[int]) -> int:
    """Parity of the permutation that sorts ``seq`` (distinct entries)."""
    seq = list(seq)
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


def simplex_volume(points: np.ndarray) -> float:
    """m-volume of the simplex spanned by the rows of ``points`` (Gram determinant)."""
    m = points.shape[0] - 1
    if m == 0:
        return 1.0
    G = (points[1:] - points[0]).T
    det = np.linalg.det(G.T @ G)
    return math.sqrt(max(det, 0.0)) / math.factorial(m)


class SimplicialComplex:
    """Finite simplicial complex embedded in R^n.

    Build one with :func:`load_complex`, :func:`parse_complex` or
    :meth:`from_simplices`. Instances are treated as immutable.
    """

    def __init__(self, vertices, simplices, boundary_matrices=None):
        self.vertices = np.array(vertices, dtype=float)
        self.vertices.setflags(write=False)
        self.ambient_dim = self.vertices.shape[1]
        self.simplices = tuple(tuple(tuple(s) for s in level) for level in simplices)
        self.top_dim = len(self.simplices) - 1
        self._index = [{s: i for i, s in enumerate(level)} for level in self.simplices]
        self.volumes = tuple(
            np.array([simplex_volume(self.vertices[list(s)]) for s in level])
            for level in self.simplices
        )
        for v in self.volumes:
            v.setflags(write=False)
        if boundary_matrices is None:
            boundary_matrices = [None] + [self._build_boundary(m) for m in range(1, self.top_dim + 1)]
        self._boundary = tuple(boundary_matrices)

    @classmethod
    def from_simplices(cls, vertices, simplices: Iterable[Iterable[int]]) -> "SimplicialComplex":
        """Close ``simplices`` under faces and build the complex.

        Every vertex becomes a 0-simplex even if no listed simplex uses it.
        Raises ``DegenerateSimplexError`` for repeated vertices or zero volume.
        """
        vertices = np.array(vertices, dtype=float)
        if vertices.ndim == 1:
            vertices = vertices[:, None]
        nv = len(vertices)
        top = 0
        closure: list[set] = [set((i,) for i in range(nv))]
        for s in simplices:
            s = tuple(int(v) for v in s)
            if len(set(s)) != len(s):
                raise DegenerateSimplexError(f"simplex {s} repeats a vertex")
            if any(v < 0 or v >= nv for v in s):
                raise ComplexFormatError(f"simplex {s} references a missing vertex")
            canon = tuple(sorted(s))
            m = len(canon) - 1
            while len(closure) <= m:
                closure.append(set())
            top = max(top, m)
            for k in range(1, m + 1):
                closure[k].update(itertools.combinations(canon, k + 1))
        levels = [sorted(level) for level in closure[: top + 1]]
        for m, level in enumerate(levels):
            for s in level:
                vol = simplex_volume(vertices[list(s)])
                if vol <= VOLUME_TOL:
                    raise DegenerateSimplexError(f"simplex {s} has volume {vol:.3g}")
        return cls(vertices, levels)

    def _build_boundary(self, m: int) -> sparse.csr_matrix:
        faces, signs = self.face_table(m)
        n = len(self.simplices[m])
        rows = faces.ravel()
        cols = np.repeat(np.arange(n), m + 1)
        return sparse.csr_matrix(
            (signs.ravel(), (rows, cols)), shape=(len(self.simplices[m - 1]), n), dtype=np.int64
        )

    def face_table(self, m: int) -> tuple[np.ndarray, np.ndarray]:
        """Face indices and incidence signs of every m-simplex, shape (n_m, m+1)."""
        if m < 1:
            raise ValueError("no boundary below dimension zero")
        lower = self._index[m - 1]
        level = self.simplices[m] if m <= self.top_dim else ()
        faces = np.zeros((len(level), m + 1), dtype=np.int64)
        for j, s in enumerate(level):
            for i in range(m + 1):
                faces[j, i] = lower[s[:i] + s[i + 1 :]]
        signs = np.tile([(-1) ** i for i in range(m + 1)], (len(level), 1)).astype(np.int64)
        return faces, signs

    def count(self, m: int) -> int:
        """Number of m-simplices (0 outside 0..top_dim)."""
        if 0 <= m <= self.top_dim:
            return len(self.simplices[m])
        return 0

    def volume(self, m: int) -> np.ndarray:
        if 0 <= m <= self.top_dim:
            return self.volumes[m]
        return np.zeros(0)

    def index(self, simplex: Iterable[int]) -> int:
        """Canonical index of a simplex given by its vertices in any order."""
        s = tuple(sorted(simplex))
        return self._index[len(s) - 1][s]

    def orientation(self, simplex: Iterable[int]) -> int:
        """Sign relating the given vertex order to the canonical orientation."""
        return permutation_sign(simplex)

    def boundary_matrix(self, m: int) -> sparse.csr_matrix:
        """Signed incidence matrix from m-simplices to (m-1)-simplices."""
        if m < 1:
            raise ValueError("no boundary below dimension zero")
        if m > self.top_dim:
            return sparse.csr_matrix((self.count(m - 1), 0), dtype=np.int64)
        return self._boundary[m]

    @cached_property
    def _dense_boundary(self) -> dict:
        return {}

    def dense_boundary(self, m: int) -> np.ndarray:
        """Float copy of ``boundary_matrix(m)``, cached."""
        cache = self._dense_boundary
        if m not in cache:
            cache[m] = self.boundary_matrix(m).toarray().astype(float)
        return cache[m]

    def with_boundary_matrix(self, m: int, matrix) -> "SimplicialComplex":
        """Copy of the complex whose m-th boundary matrix is replaced.

        Only meant for exercising :func:`validate_complex` on broken data.
        """
        mats = list(self._boundary)
        mats[m] = sparse.csr_matrix(matrix, dtype=np.int64)
        return SimplicialComplex(self.vertices, self.simplices, mats)

    def chain(self, dim: int, coefficients=None, mode: str = "integer") -> "Chain":
        """Chain on this complex; keys may be indices or vertex tuples."""
        coefficients = coefficients or {}
        items = {}
        for key, value in dict(coefficients).items():
            if isinstance(key, tuple):
                if len(key) != dim + 1:
                    raise ValueError(f"simplex {key} is not {dim}-dimensional")
                idx = self.index(key)
                value = value * self.orientation(key)
            else:
                idx = key
            items[idx] = items.get(idx, 0) + value
        return Chain(self, dim, items, mode)

    def zero(self, dim: int, mode: str = "integer") -> "Chain":
        return Chain(self, dim, {}, mode)

    def __repr__(self):
        counts = ", ".join(str(len(level)) for level in self.simplices)
        return f"SimplicialComplex(ambient_dim={self.ambient_dim}, counts=[{counts}])"


def parse_complex(text: str) -> SimplicialComplex:
    """Parse the ``.scx`` text format."""
    lines = [
        (no, line.strip())
        for no, line in enumerate(text.splitlines(), start=1)
        if line.strip() and not line.lstrip().startswith("#")
    ]
    pos = 0

    def take(expected: str, nargs: int):
        nonlocal pos
        if pos >= len(lines):
            last = lines[-1][0] if lines else 0
            raise ComplexFormatError(f"line {last + 1}: expected '{expected}', got end of file")
        no, line = lines[pos]
        parts = line.split()
        if parts[0] != expected or len(parts) != nargs + 1:
            raise ComplexFormatError(f"line {no}: expected '{expected}' header with {nargs} integer(s)")
        try:
            values = [int(p) for p in parts[1:]]
        except ValueError:
            raise ComplexFormatError(f"line {no}: non-integer in '{line}'") from None
        pos += 1
        return no, values

    _, (n,) = take("dim", 1)
    if n < 1:
        raise ComplexFormatError("line 1: ambient dimension must be positive")
    _, (nv,) = take("vertices", 1)
    coords = []
    for _ in range(nv):
        if pos >= len(lines):
            raise ComplexFormatError("unexpected end of file in vertex block")
        no, line = lines[pos]
        try:
            row = [float(p) for p in line.split()]
        except ValueError:
            raise ComplexFormatError(f"line {no}: bad coordinate in '{line}'") from None
        if len(row) != n or not all(math.isfinite(x) for x in row):
            raise ComplexFormatError(f"line {no}: expected {n} finite coordinates")
        coords.append(row)
        pos += 1
    if pos >= len(lines):
        raise ComplexFormatError("no 'simplices' block")
    listed = []
    seen = set()
    while pos < len(lines):
        _, (m, count) = take("simplices", 2)
        for _ in range(count):
            if pos >= len(lines):
                raise ComplexFormatError("unexpected end of file in simplex block")
            no, line = lines[pos]
            try:
                s = tuple(int(p) for p in line.split())
            except ValueError:
                raise ComplexFormatError(f"line {no}: bad vertex index in '{line}'") from None
            if len(s) != m + 1:
                raise ComplexFormatError(f"line {no}: expected {m + 1} vertex indices")
            if any(v < 0 or v >= nv for v in s):
                raise ComplexFormatError(f"line {no}: vertex index out of range")
            if len(set(s)) != len(s):
                raise DegenerateSimplexError(f"line {no}: repeated vertex in {s}")
            key = tuple(sorted(s))
            if key in seen:
                raise ComplexFormatError(f"line {no}: duplicate simplex {s}")
            seen.add(key)
            listed.append(s)
            pos += 1
    return SimplicialComplex.from_simplices(np.array(coords).reshape(nv, n), listed)


def load_complex(path) -> SimplicialComplex:
    return parse_complex(Path(path).read_text(encoding="utf-8"))


def _check_coefficient(value, mode: str):
    if mode == "integer":
        if isinstance(value, bool) or not isinstance(value, numbers.Integral):
            if isinstance(value, numbers.Real) and float(value).is_integer():
                return int(value)
            raise TypeError(f"integer chain got non-integer coefficient {value!r}")
        return int(value)
    value = float(value)
    if not math.isfinite(value):
        raise ValueError("chain coefficients must be finite")
    return value


@dataclass(frozen=True, eq=False)
class Chain:
    """Sparse chain of m-simplices with integer or real coefficients.

    Integer coefficients are Python ints, so arithmetic never overflows.
    """

    complex: SimplicialComplex = field(repr=False)
    dim: int
    coefficients: Mapping[int, float] = field(default_factory=dict)
    mode: str = "integer"

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown chain mode {self.mode!r}")
        if self.dim < 0:
            raise ValueError("chain dimension must be nonnegative")
        n = self.complex.count(self.dim)
        clean = {}
        for idx, value in sorted(dict(self.coefficients).items()):
            if isinstance(idx, bool) or not isinstance(idx, numbers.Integral):
                raise TypeError(f"simplex index {idx!r} is not an integer")
            idx = int(idx)
            if not 0 <= idx < n:
                raise IndexError(f"simplex index {idx} out of range for dimension {self.dim} ({n} simplices)")
            value = _check_coefficient(value, self.mode)
            if value != 0:
                clean[idx] = value
        object.__setattr__(self, "coefficients", MappingProxyType(clean))

    @classmethod
    def from_dense(cls, complex, dim, values, mode="integer") -> "Chain":
        values = np.asarray(values)
        if mode == "integer":
            coeffs = {i: int(v) for i, v in enumerate(values.tolist()) if v != 0}
        else:
            coeffs = {i: float(v) for i, v in enumerate(values.tolist()) if v != 0}
        return cls(complex, dim, coeffs, mode)

    def to_dense(self, dtype=float) -> np.ndarray:
        out = np.zeros(self.complex.count(self.dim), dtype=dtype)
        for i, v in self.coefficients.items():
            out[i] = v
        return out

    def items(self):
        return self.coefficients.items()

    def key(self) -> tuple:
        return (self.dim, self.mode, tuple(self.coefficients.items()))

    def is_zero(self) -> bool:
        return not self.coefficients

    def as_real(self) -> "Chain":
        return Chain(self.complex, self.dim, {i: float(v) for i, v in self.items()}, "real")

    def _combine(self, other: "Chain", sign: int) -> "Chain":
        if not isinstance(other, Chain):
            return NotImplemented
        if other.complex is not self.complex or other.dim != self.dim:
            raise ValueError("chains live on different complexes or dimensions")
        mode = "integer" if self.mode == other.mode == "integer" else "real"
        out = dict(self.coefficients)
        for i, v in other.items():
            out[i] = out.get(i, 0) + sign * v
        return Chain(self.complex, self.dim, out, mode)

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def __neg__(self):
        return Chain(self.complex, self.dim, {i: -v for i, v in self.items()}, self.mode)

    def __mul__(self, c):
        if not isinstance(c, numbers.Real):
            return NotImplemented
        if self.mode == "integer" and isinstance(c, numbers.Integral) and not isinstance(c, bool):
            return Chain(self.complex, self.dim, {i: int(c) * v for i, v in self.items()}, "integer")
        return Chain(self.complex, self.dim, {i: float(c) * v for i, v in self.items()}, "real")

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, Chain):
            return NotImplemented
        return (
            self.complex is other.complex
            and self.dim == other.dim
            and dict(self.coefficients) == dict(other.coefficients)
        )

    def __hash__(self):
        return hash((id(self.complex), self.dim, tuple(self.coefficients.items())))

    def __repr__(self):
        terms = " ".join(f"{v:+}*[{i}]" for i, v in self.items()) or "0"
        return f"Chain(dim={self.dim}, {self.mode}: {terms})"


def boundary(T: Chain) -> Chain:
    """Boundary of an m-chain, m >= 1, in the chain's own arithmetic."""
    if T.dim == 0:
        raise ValueError("no boundary below dimension zero")
    C = T.complex
    out: dict[int, float] = {}
    if T.coefficients:
        faces, signs = C.face_table(T.dim)
        for j, c in T.items():
            for f, s in zip(faces[j].tolist(), signs[j].tolist()):
                out[f] = out.get(f, 0) + s * c
    return Chain(C, T.dim - 1, out, T.mode)


@dataclass
class ValidationReport:
    checks: list = field(default_factory=list)

    def add(self, name: str, passed: bool, detail: str = ""):
        self.checks.append({"check": name, "passed": bool(passed), "detail": detail})

    @property
    def passed(self) -> bool:
        return all(c["passed"] for c in self.checks)

    def failed(self) -> list[str]:
        return [c["check"] for c in self.checks if not c["passed"]]

    def to_dict(self) -> dict:
        return {"passed": self.passed, "checks": self.checks}


def validate_complex(C: SimplicialComplex) -> ValidationReport:
    report = ValidationReport()
    for m in range(2, C.top_dim + 1):
        prod = C.boundary_matrix(m - 1) @ C.boundary_matrix(m)
        nnz = int(np.count_nonzero(prod.toarray()))
        report.add(f"boundary_squared_zero[{m}]", nnz == 0, f"{nnz} nonzero entries")
    bad = [(m, j) for m, v in enumerate(C.volumes) for j in np.flatnonzero(~(v > VOLUME_TOL)).tolist()]
    report.add("positive_volume", not bad, f"{len(bad)} degenerate simplices")
    missing = 0
    for m in range(1, C.top_dim + 1):
        lower = C._index[m - 1]
        for s in C.simplices[m]:
            missing += sum(1 for i in range(m + 1) if s[:i] + s[i + 1 :] not in lower)
    report.add("face_closure", missing == 0, f"{missing} missing faces")
    return report


def chain_to_json(T: Chain) -> dict:
    return {"dim": T.dim, "mode": T.mode, "coefficients": [[i, v] for i, v in T.items()]}


def chain_from_json(C: SimplicialComplex, data) -> Chain:
    if isinstance(data, (str, bytes)):
        data = json.loads(data)
    try:
        dim = data["dim"]
        mode = data.get("mode", "integer")
        pairs = data["coefficients"]
    except (KeyError, TypeError, AttributeError):
        raise ComplexFormatError("chain JSON needs 'dim' and 'coefficients'") from None
    if not isinstance(dim, int) or isinstance(dim, bool):
        raise ComplexFormatError("chain 'dim' must be an integer")
    coeffs: dict = {}
    for pair in pairs:
        if not isinstance(pair, list) or len(pair) != 2:
            raise ComplexFormatError(f"bad coefficient entry {pair!r}")
        idx, value = pair
        if idx in coeffs:
            raise ComplexFormatError(f"simplex index {idx} listed twice")
        coeffs[idx] = value
    try:
        return Chain(C, dim, coeffs, mode)
    except (IndexError, TypeError, ValueError) as exc:
        raise ComplexFormatError(str(exc)) from None


def load_chain(C: SimplicialComplex, path) -> Chain:
    return chain_from_json(C, json.loads(Path(path).read_text(encoding="utf-8")))
