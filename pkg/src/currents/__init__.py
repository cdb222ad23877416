"""Integral currents discretized as integer chains on simplicial complexes."""

from importlib import resources

from .ball import CycleLattice, MassBall, cycle_basis, enumerate_ball, sample_ball, sample_cycles
from .complex import Chain, SimplicialComplex, boundary, load_complex, parse_complex, validate_complex
from .forms import (
    Cochain,
    ComplexScalar,
    SmoothFormSpec,
    coboundary,
    comass,
    discretize_form,
    gk_eval,
    pair,
    verify_gk_lipschitz,
)
from .lp import LinearProgram, LpSolution, solve_ilp, solve_lp
from .mean import FunctionSpec, MeanEstimate, ShiftFamily, check_shift_invariance, estimate_mean
from .norms import FlatDecomposition, flat_norm, mass, normal_norm

__version__ = "0.1.0"

__all__ = [
    "Chain",
    "Cochain",
    "ComplexScalar",
    "CycleLattice",
    "FlatDecomposition",
    "FunctionSpec",
    "LinearProgram",
    "LpSolution",
    "MassBall",
    "MeanEstimate",
    "ShiftFamily",
    "SimplicialComplex",
    "SmoothFormSpec",
    "boundary",
    "check_shift_invariance",
    "coboundary",
    "comass",
    "cycle_basis",
    "discretize_form",
    "enumerate_ball",
    "estimate_mean",
    "fixture",
    "fixture_path",
    "flat_norm",
    "gk_eval",
    "load_complex",
    "mass",
    "normal_norm",
    "pair",
    "parse_complex",
    "sample_ball",
    "sample_cycles",
    "solve_ilp",
    "solve_lp",
    "validate_complex",
    "verify_gk_lipschitz",
]


def fixture(name: str) -> SimplicialComplex:
    """Load a bundled complex: ``"tri"``, ``"edge1"`` or ``"square"``."""
    return parse_complex(resources.files(__package__).joinpath("data", f"{name}.scx").read_text("utf-8"))


def fixture_path(name: str):
    return resources.files(__package__).joinpath("data", f"{name}.scx")
