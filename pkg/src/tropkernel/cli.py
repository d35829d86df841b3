"""Command-line interface.

Every subcommand prints a JSON report (and writes it to ``--report`` when
given).  Exit status: 0 when every check passes, 1 when a check fails (the
report carries a witness), 2 on usage or input-format errors.

The default seed is read from ``TROPKERNEL_SEED`` (falling back to 0) and is
echoed in the report, so a failing run can be replayed exactly.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from . import instances
from .instances import ConcaveGrid, build, example7_kernel_bounds
from .io import (
    FormatError,
    decode_vector,
    encode,
    kernel_to_json,
    load_json,
    matrix_from_json,
    operator_from_json,
    semimetric_from_json,
    semimetric_to_json,
    semimodule_from_json,
    semimodule_to_json,
    tabulated_to_json,
    write_json,
)
from .nuclearity import nuclear_decompose_identity
from .operator import DEFAULT_PROBES, TabulatedOperator, max_kernel
from .semimetric import (
    Lip_membership,
    Semimetric,
    lip_membership,
    lip_project,
    read_edge_list,
    star_closure,
)
from .semimodule import DomainError, GroundSet, Semimodule, membership
from .semiring import SemiringError, matmul, vecmat
from .theorems import THEOREM_IDS, check_theorem

SEED_ENV = "TROPKERNEL_SEED"
DEFAULT_TRIALS = 200
DEFAULT_SIZE = 4


class UsageError(ValueError):
    """Arguments are well-formed for argparse but unusable together."""


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {raw!r}") from None


def _close(a, b, tol: float) -> bool:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if tol == 0:
        return bool(np.array_equal(a, b))
    same_inf = (a == b) | (np.isfinite(a) & np.isfinite(b) & (np.abs(a - b) <= tol))
    return bool(np.all(same_inf))


def _read_vector(token: str, semiring):
    text = token.strip()
    if text.startswith("["):
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise FormatError(f"--vector: column {exc.colno}: {exc.msg}") from exc
    else:
        raw = load_json(text)
        if isinstance(raw, dict):
            raw = raw.get("vector")
    return decode_vector(raw, semiring, "vector")


def _read_matrix_args(args) -> tuple[np.ndarray, GroundSet, object]:
    if bool(args.matrix) == bool(args.edges):
        raise UsageError("give exactly one of --matrix or --edges")
    if args.edges:
        try:
            ground, m = read_edge_list(args.edges)
        except OSError as exc:
            raise FormatError(f"{args.edges}: {exc.strerror}") from exc
        return m, ground, "rmax-complete"
    return matrix_from_json(load_json(args.matrix), args.matrix)


def _load_instance(args):
    """A file path, or a named builtin built from ``--size`` and ``--seed``."""
    name = args.instance
    if name in instances.INSTANCE_NAMES:
        params = {"size": args.size, "seed": args.seed}
        if name == "example7-window":
            params["window"] = args.size
        return build(name, **params)
    if not Path(name).exists():
        raise UsageError(f"--instance: no such file or builtin {name!r}")
    doc = load_json(name)
    if not isinstance(doc, dict):
        raise FormatError(f"{name}: expected a JSON object")
    if "matrix" in doc:
        return semimetric_from_json(doc, name)
    V = semimodule_from_json(doc, name)
    if "values" in doc:
        return V, operator_from_json(doc, V, name)
    return V


# ---------------------------------------------------------------------------
# subcommands; each returns (exit code, report body)


def cmd_validate_semimetric(args, rng):
    m, ground, _ = _read_matrix_args(args)
    sq = matmul(m, m)
    mismatch = np.argwhere(~_elementwise_close(sq, m, args.tolerance))
    bad = [(ground.labels[i], ground.labels[j]) for i, j in mismatch]
    report = {"valid": not bad, "witness": list(bad[0]) if bad else None}
    if bad:
        i, j = ground.index(bad[0][0]), ground.index(bad[0][1])
        report["witness_values"] = {"d": m[i, j], "d_odot_d": sq[i, j]}
    report["reflexive"] = bool(np.all(np.diag(m) == 0.0))
    report["symmetric"] = bool(np.array_equal(m, m.T))
    return (0 if not bad else 1), report


def _elementwise_close(a, b, tol):
    if tol == 0:
        return a == b
    return (a == b) | (np.isfinite(a) & np.isfinite(b) & (np.abs(a - b) <= tol))


def cmd_closure(args, rng):
    m, ground, sr = _read_matrix_args(args)
    d = star_closure(m, ground, sr)
    return 0, {"closure": semimetric_to_json(d), "reflexive": d.reflexive, "symmetric": d.symmetric}


def cmd_lip_project(args, rng):
    doc = load_json(args.matrix)
    d = semimetric_from_json(doc, args.matrix)
    f = _read_vector(args.vector, d.semiring)
    if len(f) != len(d):
        raise FormatError("vector length differs from the semimetric's ground set")
    p = lip_project(f, d)
    in_lip = _close(vecmat(f, d.matrix), f, args.tolerance)
    return 0, {"projection": p, "in_lip": in_lip, "in_Lip": Lip_membership(f, d),
               "projection_in_lip": lip_membership(p, d)}


def cmd_membership(args, rng):
    V = semimodule_from_json(load_json(args.module), args.module)
    f = _read_vector(args.vector, V.semiring)
    if len(f) != V.n_points:
        raise FormatError("vector length differs from the module's ground set")
    res = membership(f, V)
    member = res.member
    if not member and args.tolerance > 0 and V.closure != "wedge-closed":
        member = _close(V.combine(V.coefficients(f)), f, args.tolerance)
    report = {"member": member, "certificate": res.certificate}
    if not member:
        report["witness"] = {"vector": f, "best_approximation": V.project(f)}
    return (0 if member else 1), report


def cmd_max_kernel(args, rng):
    V = semimodule_from_json(load_json(args.module), args.module)
    A = operator_from_json(load_json(args.operator), V, args.operator)
    if A.semiring != V.semiring:
        raise FormatError("operator and module use different semirings")
    if not isinstance(A, TabulatedOperator) and len(A.domain) != V.n_points:
        raise FormatError("kernel domain differs from the module's ground set")
    res = max_kernel(A, V, args.probes, rng)
    report = {"kernel": kernel_to_json(res.kernel, V.ground, A.codomain),
              "verified": res.verified, "witness": res.witness}
    return (0 if res.verified else 1), report


def cmd_decompose(args, rng):
    V = semimodule_from_json(load_json(args.module), args.module)
    dec = nuclear_decompose_identity(V, rng=rng, n_probes=args.probes)
    terms = [{"functional": f"δ[{V.ground.labels[x]}]", "target": t.target}
             for x, t in zip(np.flatnonzero(V.unit_mask), dec.decomposition.terms)]
    return (0 if dec.verified else 1), {"verified": dec.verified, "terms": terms,
                                        "witness": dec.witness}


def cmd_check_theorem(args, rng):
    inst = _load_instance(args)
    if isinstance(inst, (ConcaveGrid, tuple)) and not (
            isinstance(inst, tuple) and isinstance(inst[0], Semimodule)):
        raise UsageError(f"instance {args.instance!r} is not a semimodule or semimetric")
    if isinstance(inst, tuple) and args.id != "2":
        inst = inst[0]
    report = check_theorem(args.id, inst, rng, args.trials, args.probes, args.instance)
    return (0 if report["verdict"] == "PASS" else 1), report


def cmd_demo(args, rng):
    if args.name == "example7":
        if args.window <= 0:
            raise UsageError("--window must be positive")
        V, phi = instances.example7_window(args.window)
        bounds = example7_kernel_bounds(V, phi, x="0")
        res = max_kernel(phi, V, args.probes, rng)
        values = [b for _, b in bounds]
        decreasing = all(b < a for a, b in zip(values, values[1:]))
        report = {
            "window": args.window,
            "probes": [a for a, _ in bounds],
            "kernel_upper_bounds": values,
            "bounds_monotone_decreasing": decreasing,
            "max_kernel_at_0": res.kernel[V.ground.index("0"), 0],
            "phi_integral": res.verified,
            "phi_consistent_on_window": phi.check_consistency(rng, args.probes),
            "witness": res.witness,
        }
        ok = decreasing and not res.verified and values[-1] <= -args.window
        return (0 if ok else 1), report
    grid = ConcaveGrid(tuple(args.coords))
    f, g = grid.witness_pair()
    mid = len(grid.coords) // 2
    joined = grid.oplus(f, g)
    pointwise = np.maximum(f, g)
    ok = joined[mid] > pointwise[mid]
    report = {"coords": list(grid.coords), "f": f, "g": g, "concave_oplus": joined,
              "pointwise_max": pointwise, "middle": grid.ground.labels[mid],
              "delta_middle_additive": not ok}
    return (0 if ok else 1), report


def cmd_instance(args, rng):
    params = {"size": args.size, "seed": args.seed}
    if args.name == "example7-window":
        params["window"] = args.size
    obj = build(args.name, **params)
    if isinstance(obj, Semimodule):
        doc = semimodule_to_json(obj)
    elif isinstance(obj, Semimetric):
        doc = semimetric_to_json(obj)
    elif isinstance(obj, ConcaveGrid):
        doc = {"name": args.name, "coords": list(obj.coords)}
    elif isinstance(obj[1], TabulatedOperator):
        doc = tabulated_to_json(obj[1])
    else:
        ground, m = obj
        doc = {"semiring": "rmax-complete", "ground_set": list(ground.labels), "matrix": m}
    if args.out:
        write_json(doc, args.out)
    return 0, {"instance": doc}


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None,
                        help=f"random seed (default: ${SEED_ENV} or 0)")
    common.add_argument("--trials", type=int, default=DEFAULT_TRIALS)
    common.add_argument("--probes", type=int, default=DEFAULT_PROBES)
    common.add_argument("--tolerance", type=float, default=0.0,
                        help="absolute tolerance for float inputs (default: exact)")
    common.add_argument("--report", default=None, help="also write the report to this path")

    p = argparse.ArgumentParser(prog="tropkernel", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    for name, func, help_ in [("validate-semimetric", cmd_validate_semimetric, "check d = d ⊙ d"),
                              ("closure", cmd_closure, "least reflexive semimetric above a matrix")]:
        s = sub.add_parser(name, parents=[common], help=help_)
        s.add_argument("--matrix")
        s.add_argument("--edges", help="edge list with lines 'x y weight'")
        s.set_defaults(func=func)

    s = sub.add_parser("lip-project", parents=[common], help="project a vector onto lip(X, d)")
    s.add_argument("--matrix", required=True)
    s.add_argument("--vector", required=True, help="JSON list or path to a JSON file")
    s.set_defaults(func=cmd_lip_project)

    s = sub.add_parser("membership", parents=[common], help="test membership in a semimodule")
    s.add_argument("--module", required=True)
    s.add_argument("--vector", required=True, help="JSON list or path to a JSON file")
    s.set_defaults(func=cmd_membership)

    s = sub.add_parser("max-kernel", parents=[common], help="maximal kernel of an operator")
    s.add_argument("--module", required=True)
    s.add_argument("--operator", required=True)
    s.set_defaults(func=cmd_max_kernel)

    s = sub.add_parser("decompose", parents=[common], help="nuclear decomposition of the identity")
    s.add_argument("--module", required=True)
    s.set_defaults(func=cmd_decompose)

    s = sub.add_parser("check-theorem", parents=[common], help="run a theorem checker")
    s.add_argument("--id", required=True, choices=THEOREM_IDS)
    s.add_argument("--instance", required=True, help="instance file or builtin name")
    s.add_argument("--size", type=int, default=DEFAULT_SIZE)
    s.set_defaults(func=cmd_check_theorem)

    s = sub.add_parser("demo", parents=[common], help="worked counterexamples")
    s.add_argument("name", choices=("example7", "concave"))
    s.add_argument("--window", type=int, default=10)
    s.add_argument("--coords", type=float, nargs="+", default=[0.0, 1.0, 2.0])
    s.set_defaults(func=cmd_demo)

    s = sub.add_parser("instance", parents=[common], help="build a named instance")
    s.add_argument("action", choices=("build",))
    s.add_argument("--name", required=True, choices=instances.INSTANCE_NAMES)
    s.add_argument("--size", type=int, default=DEFAULT_SIZE)
    s.add_argument("--out")
    s.set_defaults(func=cmd_instance)
    return p


def run(argv: Sequence[str] | None = None) -> tuple[int, dict | None]:
    """Parse ``argv``, execute, and return the exit code with the JSON-ready report."""
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0), None
    try:
        if args.seed is None:
            args.seed = _default_seed()
        if args.tolerance < 0 or args.trials < 0 or args.probes < 0:
            raise UsageError("--tolerance, --trials and --probes must be nonnegative")
        rng = np.random.default_rng(args.seed)
        code, body = args.func(args, rng)
    except (FormatError, UsageError, DomainError, SemiringError) as exc:
        print(f"tropkernel: error: {exc}", file=sys.stderr)
        return 2, None
    report = {
        "command": argv,
        "config": {"seed": args.seed, "rng": "numpy.PCG64", "trials": args.trials,
                   "probes": args.probes, "tolerance": args.tolerance},
        "verdict": "PASS" if code == 0 else "FAIL",
        **body,
    }
    text = write_json(report, args.report)
    sys.stdout.write(text)
    return code, encode(report)


def main(argv: Sequence[str] | None = None) -> int:
    return run(argv)[0]


if __name__ == "__main__":
    sys.exit(main())
