"""Command-line front end.

One command per invocation; results go to --out or stdout as CSV, verify
reports as JSON-style text. Exit codes: 0 success (or all suites pass),
1 verification failure, 2 usage or input error, 3 numerical failure.
Unknown flags are an error. Output is deterministic for a fixed --seed.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .branches import bifurcation_csv, bifurcation_interval, branch_csv, \
    estimate_bifurcation_set, nodal_csv, nodal_solutions_at_unity, trace_branch
from .errors import HalfeigError, InputError
from .problems import load_problem
from .spectrum import eigenvalue, half_spectrum, spectrum_csv
from .verify import SUITES, run_suite


def _nu_value(text: str) -> int:
    if text == "+":
        return 1
    if text == "-":
        return -1
    raise argparse.ArgumentTypeError(f"nu must be '+' or '-', got {text!r}")


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="halfeig",
        description="Shooting-based solver for one-dimensional p-Laplacian "
                    "boundary value problems with jumping and perturbation "
                    "terms: spectra, solution branches, bifurcation "
                    "intervals, verification suites.")
    sub = ap.add_subparsers(dest="command", required=True)

    def add_problem(p):
        p.add_argument("--problem", required=True, help="problem file path")
        p.add_argument("--out", default=None, help="output path (default stdout)")

    p = sub.add_parser("spectrum", help="classical eigenvalues (no jumping)")
    add_problem(p)
    p.add_argument("--kmax", type=int, required=True)

    p = sub.add_parser("half-spectrum", help="half-eigenvalue pairs")
    add_problem(p)
    p.add_argument("--kmax", type=int, required=True)

    p = sub.add_parser("branch", help="trace one nodal solution branch")
    add_problem(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--nu", type=_nu_value, default=1, metavar="+|-")
    p.add_argument("--s-min", type=float, default=1e-4)
    p.add_argument("--s-max", type=float, default=1e4)
    p.add_argument("--points", type=int, default=25)

    p = sub.add_parser("nodal", help="solutions of the fixed problem by "
                                     "nodal class")
    add_problem(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--kmax", type=int, default=None,
                   help="solve classes k..kmax (default: k only)")
    p.add_argument("--nu", type=_nu_value, default=None, metavar="+|-",
                   help="restrict to one sign (default: both)")
    p.add_argument("--s-min", type=float, default=1e-4)
    p.add_argument("--s-max", type=float, default=1e4)
    p.add_argument("--points", type=int, default=25)

    p = sub.add_parser("intervals", help="bifurcation intervals "
                                         "[lambda_k - M/a0, lambda_k + M/a0]")
    add_problem(p)
    p.add_argument("--M", type=float, required=True)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--kmax", type=int, default=None)

    p = sub.add_parser("estimate-bifurcation",
                       help="small-amplitude probe of the bifurcation set")
    add_problem(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--nu", type=_nu_value, default=1, metavar="+|-")
    p.add_argument("--samples", type=int, default=24,
                   help="number of probe amplitudes")

    p = sub.add_parser("verify", help="run a named verification suite")
    p.add_argument("--suite", required=True,
                   help="suite name, or 'all' (" + ", ".join(SUITES) + ")")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--out", default=None)

    return ap


def _cmd_spectrum(args) -> int:
    spec = load_problem(args.problem)
    if args.kmax < 1:
        raise InputError(f"--kmax must be >= 1, got {args.kmax}")
    pairs = [eigenvalue(spec, k) for k in range(1, args.kmax + 1)]
    _emit(spectrum_csv(pairs), args.out)
    return 0


def _cmd_half_spectrum(args) -> int:
    spec = load_problem(args.problem)
    _emit(spectrum_csv(half_spectrum(spec, args.kmax)), args.out)
    return 0


def _cmd_branch(args) -> int:
    spec = load_problem(args.problem)
    br = trace_branch(spec, args.k, args.nu, args.s_min, args.s_max, args.points)
    _emit(branch_csv(br), args.out)
    return 0


def _cmd_nodal(args) -> int:
    spec = load_problem(args.problem)
    hi = args.k if args.kmax is None else args.kmax
    if hi < args.k:
        raise InputError(f"--kmax ({hi}) must be >= --k ({args.k})")
    nus = (1, -1) if args.nu is None else (args.nu,)
    sols = nodal_solutions_at_unity(spec, range(args.k, hi + 1), nus=nus,
                                    s_min=args.s_min, s_max=args.s_max,
                                    n_points=args.points)
    _emit(nodal_csv(sols), args.out)
    return 0


def _cmd_intervals(args) -> int:
    spec = load_problem(args.problem)
    if (args.k is None) == (args.kmax is None):
        raise InputError("give exactly one of --k or --kmax")
    ks = [args.k] if args.k is not None else list(range(1, args.kmax + 1))
    if ks[-1] < 1:
        raise InputError("interval indices must be >= 1")
    lines = ["k,lambda_lo,lambda_hi"]
    for k in ks:
        lo, hi = bifurcation_interval(spec, k, args.M)
        lines.append(f"{k},{format(lo, '.17g')},{format(hi, '.17g')}")
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def _cmd_estimate(args) -> int:
    spec = load_problem(args.problem)
    if args.samples < 1:
        raise InputError(f"--samples must be >= 1, got {args.samples}")
    probes = np.geomspace(1e-4, 1e-2, args.samples)
    ests = estimate_bifurcation_set(spec, args.k, args.nu, s_probe=probes)
    _emit(bifurcation_csv(ests), args.out)
    return 0


def _cmd_verify(args) -> int:
    names = list(SUITES) if args.suite == "all" else [args.suite]
    reports = [run_suite(name, seed=args.seed) for name in names]
    _emit("".join(rep.to_json() for rep in reports), args.out)
    failed = [r.suite for r in reports if not r.ok]
    if failed:
        print("verification failed: " + ", ".join(failed), file=sys.stderr)
        return 1
    return 0


_DISPATCH = {
    "spectrum": _cmd_spectrum,
    "half-spectrum": _cmd_half_spectrum,
    "branch": _cmd_branch,
    "nodal": _cmd_nodal,
    "intervals": _cmd_intervals,
    "estimate-bifurcation": _cmd_estimate,
    "verify": _cmd_verify,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _DISPATCH[args.command](args)
    except InputError as exc:
        print(exc.oneline(), file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"input_error: {exc}", file=sys.stderr)
        return 2
    except HalfeigError as exc:
        print(exc.oneline(), file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
