"""``curr`` command line: one JSON document on stdout per invocation.

Exit codes: 0 success, 1 computational failure (size guard, solver stall,
sampling failure), 2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from .ball import MassBall, SamplingError, cycle_basis, enumerate_ball, sample_ball, sample_cycles
from .complex import (
    ComplexFormatError,
    DegenerateSimplexError,
    boundary,
    chain_to_json,
    load_chain,
    load_complex,
    validate_complex,
)
from .forms import (
    coboundary,
    cochain_from_json,
    cochain_to_json,
    comass,
    discretize_form,
    gk_eval,
    pair,
    parse_form,
    verify_gk_lipschitz,
)
from .lp import SizeGuardError, SolverStalled
from .mean import FunctionSpec, check_shift_invariance, estimate_mean, sample_family
from .norms import flat_norm, mass, normal_norm
from .rng import derive_seed


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _u64(text: str) -> int:
    value = int(text, 10)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _nonneg(text: str) -> float:
    value = float(text)
    if not (value >= 0 and math.isfinite(value)):
        raise argparse.ArgumentTypeError("expected a finite nonnegative number")
    return value


def _read_json(path: str):
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ComplexFormatError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None


def _complex(args):
    return load_complex(args.complex)


def _chain(C, args):
    if not args.chain:
        raise UsageError("--chain is required")
    return load_chain(C, args.chain)


def _cochain(C, args):
    if not args.cochain:
        raise UsageError("--cochain is required")
    return cochain_from_json(C, _read_json(args.cochain))


def cmd_complex_validate(args):
    C = _complex(args)
    out = validate_complex(C).to_dict()
    out["counts"] = [C.count(m) for m in range(C.top_dim + 1)]
    return out


def cmd_chain_boundary(args):
    C = _complex(args)
    return chain_to_json(boundary(_chain(C, args)))


def cmd_chain_mass(args):
    C = _complex(args)
    T = _chain(C, args)
    return {"mass": mass(T), "normal_norm": normal_norm(T)}


def cmd_chain_flatnorm(args):
    C = _complex(args)
    T = _chain(C, args)
    out = flat_norm(T, args.mode).to_json()
    out["mass"] = mass(T)
    return out


def cmd_form_pair(args):
    C = _complex(args)
    return {"value": pair(_cochain(C, args), _chain(C, args))}


def cmd_form_comass(args):
    C = _complex(args)
    k = _cochain(C, args)
    return {"comass": comass(k), "coboundary_comass": comass(coboundary(k))}


def cmd_form_discretize(args):
    C = _complex(args)
    if args.form is None or args.dim is None:
        raise UsageError("--form and --dim are required")
    spec = parse_form(args.form, args.dim, C.ambient_dim)
    return cochain_to_json(discretize_form(spec, C, args.order))


def cmd_gk_eval(args):
    C = _complex(args)
    k = _cochain(C, args)
    X = _chain(C, args)
    flat = flat_norm(X, args.mode).value
    p = pair(k, X)
    return {"value": gk_eval(k, X, args.mode, flat).to_json(), "pairing": p, "flat": flat, "phase": p + flat}


def cmd_gk_lipcheck(args):
    C = _complex(args)
    k = _cochain(C, args)
    report = verify_gk_lipschitz(k, args.trials, args.seed, args.cap, args.mode, args.tol)
    out = report.to_json()
    out["seed"] = args.seed
    out["cap"] = args.cap
    return out


def _need_dim(args):
    if args.dim is None:
        raise UsageError("--dim is required")
    return args.dim


def cmd_ball_enum(args):
    C = _complex(args)
    chains = enumerate_ball(MassBall(C, _need_dim(args), args.cap))
    return {"dim": args.dim, "cap": args.cap, "count": len(chains), "chains": [chain_to_json(T) for T in chains]}


def cmd_ball_sample(args):
    C = _complex(args)
    chains = sample_ball(MassBall(C, _need_dim(args), args.cap), args.count, args.seed)
    return {"dim": args.dim, "cap": args.cap, "seed": args.seed, "chains": [chain_to_json(T) for T in chains]}


def cmd_cycles_basis(args):
    C = _complex(args)
    lat = cycle_basis(C, _need_dim(args))
    return {
        "dim": args.dim,
        "rank": lat.rank,
        "boundary_rank": lat.boundary_rank,
        "basis": [chain_to_json(z) for z in lat.basis],
    }


def _function(C, args) -> FunctionSpec:
    name = args.function
    if name.startswith("constant:"):
        try:
            return FunctionSpec.constant(complex(name.partition(":")[2].replace(" ", "")))
        except ValueError:
            raise UsageError(f"bad constant in {name!r}") from None
    if name == "parity":
        return FunctionSpec.parity()
    if name == "phase":
        return FunctionSpec.phase(_cochain(C, args))
    if name == "gk":
        return FunctionSpec.gk(_cochain(C, args), args.mode)
    raise UsageError(f"unknown function {name!r} (constant:<c>, parity, phase, gk)")


def _mean_inputs(C, args):
    m = _need_dim(args)
    f = _function(C, args)
    shifts = sample_family(C, m, args.shifts, args.cap, derive_seed(args.seed, 0), args.cycles_only)
    if args.cycles_only:
        probes = sample_cycles(cycle_basis(C, m), args.cap, args.probes, derive_seed(args.seed, 1))
    else:
        probes = sample_ball(MassBall(C, m, args.cap), args.probes, derive_seed(args.seed, 1))
    return f, shifts, probes


def cmd_mean_estimate(args):
    C = _complex(args)
    f, shifts, probes = _mean_inputs(C, args)
    out = estimate_mean(f, shifts, probes, args.strategy, args.cycles_only).to_json()
    out["function"] = f.to_json()
    out["seed"] = args.seed
    out["cycles_only"] = args.cycles_only
    return out


def _mean_inputs_shift(C, args):
    if args.cycles_only:
        return sample_cycles(cycle_basis(C, args.dim), args.cap, 1, derive_seed(args.seed, 2))[0]
    return sample_ball(MassBall(C, args.dim, args.cap), 1, derive_seed(args.seed, 2))[0]


def cmd_mean_shiftcheck(args):
    C = _complex(args)
    f, shifts, probes = _mean_inputs(C, args)
    Y = _chain(C, args) if args.chain else _mean_inputs_shift(C, args)
    report = check_shift_invariance(f, shifts, probes, Y, args.strategy, args.cycles_only, args.tol)
    out = report.to_json()
    out["shift"] = chain_to_json(Y)
    out["seed"] = args.seed
    return out


COMMANDS = {
    ("complex", "validate"): cmd_complex_validate,
    ("chain", "boundary"): cmd_chain_boundary,
    ("chain", "mass"): cmd_chain_mass,
    ("chain", "flatnorm"): cmd_chain_flatnorm,
    ("form", "pair"): cmd_form_pair,
    ("form", "comass"): cmd_form_comass,
    ("form", "discretize"): cmd_form_discretize,
    ("gk", "eval"): cmd_gk_eval,
    ("gk", "lipcheck"): cmd_gk_lipcheck,
    ("ball", "enum"): cmd_ball_enum,
    ("ball", "sample"): cmd_ball_sample,
    ("cycles", "basis"): cmd_cycles_basis,
    ("mean", "estimate"): cmd_mean_estimate,
    ("mean", "shiftcheck"): cmd_mean_shiftcheck,
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="curr", description="Integral currents on simplicial complexes.")
    groups = parser.add_subparsers(dest="group", required=True, parser_class=_Parser)
    subs = {}
    for group, action in COMMANDS:
        if group not in subs:
            subs[group] = groups.add_parser(group).add_subparsers(dest="action", required=True, parser_class=_Parser)
        p = subs[group].add_parser(action)
        p.add_argument("--complex", required=True)
        p.add_argument("--chain")
        p.add_argument("--cochain")
        p.add_argument("--mode", choices=("real", "integer"), default="real")
        p.add_argument("--cap", type=_nonneg, default=4.0)
        p.add_argument("--dim", type=int)
        p.add_argument("--seed", type=_u64, default=0)
        p.add_argument("--shifts", type=int, default=8)
        p.add_argument("--probes", type=int, default=16)
        p.add_argument("--strategy", choices=("lp", "uniform"), default="lp")
        p.add_argument("--cycles-only", action="store_true")
        p.add_argument("--tol", type=float, default=1e-9)
        p.add_argument("--count", type=int, default=10)
        p.add_argument("--trials", type=int, default=100)
        p.add_argument("--form")
        p.add_argument("--order", type=int, choices=(1, 2), default=2)
        p.add_argument("--function", default="parity")
    return parser


def _jsonable(obj):
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        result = COMMANDS[(args.group, args.action)](args)
    except UsageError as exc:
        print(f"curr: error: {exc}", file=stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"curr: error: no such file: {exc.filename}", file=stderr)
        return 2
    except (ComplexFormatError, DegenerateSimplexError, ValueError, IndexError, TypeError) as exc:
        print(f"curr: error: {exc}", file=stderr)
        return 2
    except (SizeGuardError, SolverStalled, SamplingError, RuntimeError) as exc:
        print(f"curr: failed: {exc}", file=stderr)
        return 1
    stdout.write(json.dumps(result, indent=2, default=_jsonable) + "\n")
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
