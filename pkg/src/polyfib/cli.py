"""Command-line entry point.

Exit codes: 0 when everything passes, 1 when a suite or extraction fails,
2 for unreadable or ill-typed input.
"""

from __future__ import annotations

import argparse
import json
import sys

from .examples import (
    PreconditionError,
    cyclic_group,
    disjoint_union,
    gset_fixed_points,
    mono_preservation_suite,
    orbit_fixed_adjunction_suite,
    regular_gset,
    strength_impossible,
    trivial_gset,
)
from .extract import extract_polynomial
from .fibspan import Budget
from .finset import StructureError
from .laws import laws_suite
from .poly import Polynomial, eval_plain
from .registry import build_box
from .report import FAIL, PASS, ExtractionError, Report
from .slice import SliceObj

OK, FAILED, BAD_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _load(path: str, parse):
    try:
        with open(path) as fh:
            data = json.load(fh)
        return parse(data)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from None
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{path} does not describe the expected object: {exc}") from None


def _emit(report: Report, as_json: bool) -> int:
    if as_json:
        print(report.dumps())
    else:
        print(f"{report.name}: {report.verdict}")
        print(f"  bounds: {json.dumps(report.bounds, sort_keys=True)}")
        if report.witness is not None:
            print(f"  witness: {json.dumps(report.witness, sort_keys=True)}")
        for key in sorted(report.details):
            print(f"  {key}: {json.dumps(report.details[key], sort_keys=True)}")
    return OK if report.ok else FAILED


def cmd_eval(args) -> int:
    P = _load(args.polynomial, Polynomial.from_json)
    X = _load(args.sliceobj, SliceObj.from_json)
    try:
        Y = eval_plain(P, X)
    except StructureError as exc:
        raise InputError(str(exc)) from None
    if args.json:
        print(json.dumps({"result": Y.to_json(), "fiber_sizes": list(Y.fiber_sizes())}, sort_keys=True, indent=2))
    else:
        print(json.dumps(Y.to_json(), sort_keys=True))
        print("j  |P(X)_j|")
        for j, n in enumerate(Y.fiber_sizes()):
            print(f"{j:<2} {n}")
    return OK


def cmd_laws(args) -> int:
    return _emit(laws_suite(args.bound, args.seed, args.inject_fault), args.json)


def cmd_extract(args) -> int:
    try:
        R = _load(args.box_spec, build_box)
    except StructureError as exc:
        raise InputError(str(exc)) from None
    budget = Budget(max_size=args.bound, seed=args.seed)
    try:
        P, report = extract_polynomial(R, size_bound=args.size_bound, budget=budget)
    except ExtractionError as exc:
        exc.report.details.setdefault("message", str(exc))
        return _emit(exc.report, args.json)
    if not args.json:
        print(repr(P))
    return _emit(report, args.json)


def _gset_report(bound: int) -> Report:
    G = cyclic_group(2)
    reg = regular_gset(G)
    cases = {}
    for name, I in (("regular", reg), ("two_regular", disjoint_union(reg, reg))):
        cases[name] = strength_impossible(I).to_json()
    try:
        strength_impossible(trivial_gset(G, 1))
        control = "no precondition failure"
    except PreconditionError as exc:
        control = str(exc)
    adj = orbit_fixed_adjunction_suite(G, bound)
    ok = all(c["verdict"] == PASS for c in cases.values()) and adj.ok and "fixed point" in control
    return Report(
        "gset",
        PASS if ok else FAIL,
        {"group": "Z/2", "max_carrier": bound},
        None,
        {
            "fixed_points_of_regular": gset_fixed_points(reg).carrier.size,
            "strength": cases,
            "trivial_point_control": control,
            "adjunction": adj.to_json(),
        },
    )


def cmd_examples(args) -> int:
    if args.name == "weber":
        report = mono_preservation_suite(args.bound)
    else:
        report = _gset_report(args.bound)
    return _emit(report, args.json)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="polyfib", description="Finite polynomial functors and fibered slices.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate a polynomial on an object over I")
    p.add_argument("polynomial")
    p.add_argument("sliceobj")
    p.add_argument("--json", action="store_true")
    p.set_defaults(run=cmd_eval)

    p = sub.add_parser("laws", help="adjoint triple, Beck-Chevalley and bifibration suites")
    p.add_argument("--bound", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--inject-fault", action="store_true", help="swap in broken constructions")
    p.add_argument("--json", action="store_true")
    p.set_defaults(run=cmd_laws)

    p = sub.add_parser("extract", help="recover a polynomial from a named box family")
    p.add_argument("box_spec")
    p.add_argument("--size-bound", type=int, default=9)
    p.add_argument("--bound", type=int, default=3, help="size bound for audits and verification")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true")
    p.set_defaults(run=cmd_extract)

    p = sub.add_parser("examples", help="subdivision and G-set counterexamples")
    p.add_argument("name", choices=["weber", "gset"])
    p.add_argument("--bound", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true")
    p.set_defaults(run=cmd_examples)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    for flag in ("bound", "size_bound"):
        if getattr(args, flag, 0) < 0:
            print(f"error: --{flag.replace('_', '-')} must be non-negative", file=sys.stderr)
            return BAD_INPUT
    try:
        return args.run(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
