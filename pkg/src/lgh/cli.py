"""``lgh`` command-line entry point.

Exit codes: 0 success, 1 failed checks, 2 unreadable input, 3 non-admissible
right-hand side, 4 a certified verdict was required but not reached.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .diagnostics import NO_CERTIFIED, YES_CERTIFIED, diagnose
from .fixtures import FIXTURES, fixture, run_fixture
from .formats import FormatError, read_rhs, read_spec, write_coef
from .normal_form import mu_max, build_conjugators, psi_band, solve_full, verify_cohomology
from .product import decay_classify
from .reports import analysis_report, normal_form_report, obstruction_report, solve_report
from .solver import NotAdmissible
from .verify import SUITES, run_suite

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_PARSE = 2
EXIT_NOT_ADMISSIBLE = 3
EXIT_INCONCLUSIVE = 4


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_analyze(args) -> int:
    spec = read_spec(args.spec, args.trunc1, args.trunc2)
    d = diagnose(spec)
    _emit(analysis_report(d), args.out)
    certified = {YES_CERTIFIED, NO_CERTIFIED}
    if args.require_certified and not (d.gh.value in certified and d.gs.value in certified):
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def cmd_solve(args) -> int:
    spec = read_spec(args.spec, args.trunc1, args.trunc2)
    rhs = read_rhs(args.rhs, spec.group)
    try:
        sol = solve_full(spec, rhs, project=args.project, tol=args.tol)
    except NotAdmissible as exc:
        _emit(obstruction_report(spec, exc.report), args.report)
        return EXIT_NOT_ADMISSIBLE
    Path(args.out).write_text(write_coef(sol.table))
    _emit(solve_report(spec, sol, decay_classify(sol.table)), args.report)
    return EXIT_OK


def cmd_normal_form(args) -> int:
    spec = read_spec(args.spec, args.trunc1, args.trunc2)
    bundle = build_conjugators(spec)
    band = None
    if bundle.A is not None:
        band = psi_band(bundle, spec.group.factor1.trunc, mu_max(spec.group.factor2))
    _emit(normal_form_report(spec, bundle, verify_cohomology(spec, bundle), band), args.out)
    return EXIT_OK


def cmd_example(args) -> int:
    names = [c.name for c in FIXTURES] if args.name == "all" else [args.name]
    ok = True
    for name in names:
        run = run_fixture(fixture(name), args.trunc1, args.trunc2)
        print(f"{name}: {'PASS' if run.passed else 'FAIL'}")
        for check in run.checks:
            print("  " + check.line())
        ok &= run.passed
    return EXIT_OK if ok else EXIT_FAILED


def cmd_verify(args) -> int:
    checks = run_suite(args.suite)
    for c in checks:
        print(c.line())
    return EXIT_OK if all(c.passed for c in checks) else EXIT_FAILED


def _truncs(p: argparse.ArgumentParser) -> None:
    p.add_argument("--trunc1", type=int, default=None, help="first-factor truncation (K, or two_ell_max)")
    p.add_argument("--trunc2", type=int, default=None, help="second-factor truncation")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lgh", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="zero set, gap profile and GH/GS verdicts")
    p.add_argument("--spec", required=True)
    _truncs(p)
    p.add_argument("--out")
    p.add_argument("--require-certified", action="store_true", help="exit 4 unless both verdicts are certified")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("solve", help="solve L u = f from a coefficient or grid file")
    p.add_argument("--spec", required=True)
    p.add_argument("--rhs", required=True)
    p.add_argument("--out", required=True, help="coefficient file for the solution")
    p.add_argument("--report", help="report path (default: stdout)")
    p.add_argument("--project", action="store_true", help="drop content on symbol zeros instead of rejecting")
    p.add_argument("--tol", type=float, default=1e-10)
    _truncs(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("normal-form", help="conjugators A, Q and their residuals")
    p.add_argument("--spec", required=True)
    p.add_argument("--out")
    _truncs(p)
    p.set_defaults(func=cmd_normal_form)

    p = sub.add_parser("example", help="run a worked example and check its expectations")
    p.add_argument("name", choices=[c.name for c in FIXTURES] + ["all"])
    _truncs(p)
    p.set_defaults(func=cmd_example)

    p = sub.add_parser("verify", help="run an invariant suite")
    p.add_argument("suite", choices=sorted(SUITES))
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FormatError as exc:
        print(f"lgh: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
