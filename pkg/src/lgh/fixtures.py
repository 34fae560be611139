"""Worked operators with their expected verdicts, runnable end to end.

Expectations are plain data (``FIXTURES``) so they can be reviewed on their own;
``run_fixture`` checks a case and returns one line per expectation.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import su2
from .diagnostics import (
    NO_CERTIFIED,
    YES_CERTIFIED,
    build_kernel_counterexample,
    build_nonsolvable_rhs,
    diagnose,
)
from .normal_form import (
    build_conjugators,
    conjugation_residual_exp,
    conjugation_residual_psi,
    manufactured_rhs,
    solve_full,
    verify_cohomology,
)
from .product import Factor, FourierTable, ProductGroup, decay_classify, plancherel_norm, random_table
from .scalars import parse_scalar
from .solver import NotAdmissible
from .symbols import OperatorSpec, TrigPoly, apply_operator_spectral

__all__ = ["FixtureCase", "FIXTURES", "DEFAULT_TRUNC", "fixture", "build_spec", "run_fixture", "euler_tr", "euler_h"]

DEFAULT_TRUNC = {"T1": 32, "SU2": 16, "TRIVIAL": 0}

# trig polynomials [c_-1, c_0, c_1]
SIN_PLUS_SQRT2 = "[complex:0+1/2*i, quadratic:0+1*sqrt(2), complex:0-1/2*i]"
SIN_MINUS_SQRT2 = "[complex:0+1/2*i, quadratic:0-1*sqrt(2), complex:0-1/2*i]"

CONJUGATION_TOL = 1e-8


@dataclass(frozen=True)
class FixtureCase:
    name: str
    factors: tuple[str, str]
    a: str
    gh: str
    gs: str
    q: str | None = None  # scalar literal or the name of a sampled function
    q0: str | None = None
    Q: str | None = None
    artifacts: tuple = ()
    reason: str = ""


FIXTURES: tuple[FixtureCase, ...] = (
    FixtureCase(
        "t2-sqrt2", ("T1", "T1"), "quadratic:0+1*sqrt(2)", YES_CERTIFIED, YES_CERTIFIED,
        reason="irrational non-Liouville slope: only (0,0) is a zero and gaps are bounded below polynomially",
    ),
    FixtureCase(
        "t2-liouville", ("T1", "T1"), "liouville:5", NO_CERTIFIED, NO_CERTIFIED,
        artifacts=("nonsolvable-rhs",),
        reason="Liouville slope: convergents beat every polynomial gap bound",
    ),
    FixtureCase(
        "t2-rational-2-3", ("T1", "T1"), "rational:2/3", NO_CERTIFIED, YES_CERTIFIED,
        artifacts=("kernel-counterexample",),
        reason="rational slope: the line k + 2l/3 = 0 carries infinitely many zeros, off it gaps are >= 1/3",
    ),
    FixtureCase(
        "t2-imag", ("T1", "T1"), "complex:0+1*i", YES_CERTIFIED, YES_CERTIFIED,
        reason="nonzero imaginary part: only (0,0) is a zero and |k + i l| >= 1 elsewhere",
    ),
    FixtureCase(
        "t1s3-sqrt2", ("T1", "SU2"), "quadratic:0+1*sqrt(2)", NO_CERTIFIED, YES_CERTIFIED,
        artifacts=("kernel-counterexample",),
        reason="every integer spin has a mu = 0 row, so (0, l) is a zero for all such l",
    ),
    FixtureCase(
        "s3-q-const-sqrt2", ("TRIVIAL", "SU2"), "rational:1", YES_CERTIFIED, YES_CERTIFIED, q="quadratic:0+1*sqrt(2)",
        reason="mu - i sqrt(2) never vanishes and is bounded below by sqrt(2)",
    ),
    FixtureCase(
        "s3-q-const-3i2", ("TRIVIAL", "SU2"), "rational:1", NO_CERTIFIED, YES_CERTIFIED, q="complex:0+3/2*i",
        artifacts=("kernel-counterexample",),
        reason="mu = -3/2 occurs in every spin l >= 3/2",
    ),
    FixtureCase(
        "s3-q-func", ("TRIVIAL", "SU2"), "rational:1", YES_CERTIFIED, YES_CERTIFIED,
        q="h+sqrt2", q0="quadratic:0+1*sqrt(2)", Q="tr", artifacts=("conjugation",),
        reason="X tr = h, so the operator is conjugate to X + sqrt(2)",
    ),
    FixtureCase(
        "t2-q-sin", ("T1", "T1"), "rational:1", NO_CERTIFIED, YES_CERTIFIED,
        q="sin(t+x)", q0="rational:0", Q="-cos(t+x)/2", artifacts=("conjugation",),
        reason="conjugate to d/dt + d/dx, whose zeros fill the line k + l = 0",
    ),
    FixtureCase(
        "t1t1-variable", ("T1", "T1"), SIN_PLUS_SQRT2, YES_CERTIFIED, YES_CERTIFIED,
        artifacts=("psi-conjugation", "full-solve"),
        reason="normal form with a0 = sqrt(2) on the torus",
    ),
    FixtureCase(
        "t1s3-variable", ("T1", "SU2"), SIN_MINUS_SQRT2, NO_CERTIFIED, YES_CERTIFIED,
        artifacts=("psi-conjugation", "full-solve", "admissibility-obstruction"),
        reason="normal form with a0 = -sqrt(2); mu = 0 rows give infinitely many zeros",
    ),
    FixtureCase(
        "t1s3-aq", ("T1", "SU2"), SIN_PLUS_SQRT2, YES_CERTIFIED, YES_CERTIFIED,
        q="cos(t)+a(t)h+1", q0="rational:1", Q="sin(t)+tr", artifacts=("psi-conjugation", "conjugation", "full-solve"),
        reason="normal form d/dt + sqrt(2) X + 1 has no zeros and a quadratic gap bound",
    ),
    FixtureCase(
        "t1s3-aq-imag", ("T1", "SU2"), SIN_PLUS_SQRT2, NO_CERTIFIED, YES_CERTIFIED,
        q="cos(t)+a(t)h+i", q0="complex:0+1*i", Q="sin(t)+tr", artifacts=("conjugation", "full-solve"),
        reason="normal form d/dt + sqrt(2) X + i vanishes at k = -1, mu = 0 for every integer spin",
    ),
)


def fixture(name: str) -> FixtureCase:
    for case in FIXTURES:
        if case.name == name:
            return case
    raise KeyError(f"unknown example {name!r}; choose from {', '.join(c.name for c in FIXTURES)}")


# ------------------------------------------------------------ sampled data


def euler_tr(phi, theta, psi):
    """Trace of the SU(2) element with Euler angles ``(phi, theta, psi)``."""
    return su2.euler_tr((phi, theta, psi))


def euler_h(phi, theta, psi):
    """``X tr``: derivative of the trace along the distinguished field."""
    return su2.euler_h((phi, theta, psi))


def _sin_plus_sqrt2(t):
    return np.sin(t) + np.sqrt(2.0)


# Functions of the grid coordinates (x1 coords..., x2 coords...).
_SAMPLED = {
    "h+sqrt2": lambda phi, theta, psi: euler_h(phi, theta, psi) + np.sqrt(2.0),
    "tr": euler_tr,
    "sin(t+x)": lambda t, x: np.sin(t + x),
    "-cos(t+x)/2": lambda t, x: -0.5 * np.cos(t + x),
    "cos(t)+a(t)h+1": lambda t, phi, theta, psi: np.cos(t) + _sin_plus_sqrt2(t) * euler_h(phi, theta, psi) + 1.0,
    "cos(t)+a(t)h+i": lambda t, phi, theta, psi: np.cos(t) + _sin_plus_sqrt2(t) * euler_h(phi, theta, psi) + 1j,
    "sin(t)+tr": lambda t, phi, theta, psi: np.sin(t) + euler_tr(phi, theta, psi),
}

# Sampling band for q and Q: all of them are band-limited with band <= 1.
_SAMPLE_BAND = 2


def _coefficient(text: str):
    return TrigPoly.parse(text) if text.startswith("[") else parse_scalar(text)


def build_spec(case: FixtureCase, trunc1: int | None = None, trunc2: int | None = None) -> OperatorSpec:
    k1, k2 = case.factors
    t1 = DEFAULT_TRUNC[k1] if trunc1 is None else trunc1
    t2 = DEFAULT_TRUNC[k2] if trunc2 is None else trunc2
    group = ProductGroup(Factor(k1, 0 if k1 == "TRIVIAL" else t1), Factor(k2, t2))
    sample_grid = group.grid(_SAMPLE_BAND, _SAMPLE_BAND)
    q = None
    if case.q is not None:
        q = sample_grid.sample(_SAMPLED[case.q]) if case.q in _SAMPLED else parse_scalar(case.q)
    Q = sample_grid.sample(_SAMPLED[case.Q]) if case.Q is not None else None
    q0 = parse_scalar(case.q0) if case.q0 is not None else None
    return OperatorSpec(group, _coefficient(case.a), q=q, q0=q0, Q=Q, name=case.name)


# ---------------------------------------------------------------- checks


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}" + (f": {self.detail}" if self.detail else "")


@dataclass
class FixtureRun:
    case: FixtureCase
    report: object
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def _small_group(spec: OperatorSpec) -> ProductGroup:
    """Truncation used for random-input identity checks."""
    f1, f2 = spec.group.factor1, spec.group.factor2
    return ProductGroup(f1.with_trunc(min(f1.trunc, 4)), f2.with_trunc(min(f2.trunc, 4)))


def _kernel_check(spec: OperatorSpec) -> CheckResult:
    const = spec.constant_part()
    ce = build_kernel_counterexample(const)
    image = apply_operator_spectral(const, ce.table)
    fit = decay_classify(ce.table)
    ok = image.is_exactly_zero() and fit.classification == "non-decaying" and not ce.degenerate
    return CheckResult(
        "kernel-counterexample", ok, f"L(table) exactly zero: {image.is_exactly_zero()}, decay {fit.classification}"
    )


def _nonsolvable_check(spec: OperatorSpec, depth: int = 3) -> CheckResult:
    rhs = build_nonsolvable_rhs(spec, depth)
    rows = []
    ok = True
    for w, mag in rhs.formal_solution_magnitudes():
        ok &= mag > w.shell**w.M
        rows.append(f"(k={w.k}, l={w.ell}, M={w.M})")
    return CheckResult("nonsolvable-rhs", ok, "formal solution beats shell^M at " + ", ".join(rows))


def _conjugation_checks(spec: OperatorSpec, case: FixtureCase, rng) -> list[CheckResult]:
    out = []
    bundle = build_conjugators(spec)
    coh = verify_cohomology(spec, bundle)
    out.append(CheckResult("cohomology", all(v <= CONJUGATION_TOL for v in coh.values()),
                           ", ".join(f"{k}={v:.3e}" for k, v in sorted(coh.items()))))
    u = random_table(_small_group(spec), rng)
    norm = plancherel_norm(u)
    if "psi-conjugation" in case.artifacts:
        r = conjugation_residual_psi(spec, u, bundle)
        out.append(CheckResult("psi-conjugation", r <= CONJUGATION_TOL * norm, f"residual/|u| = {r / norm:.3e}"))
    if "conjugation" in case.artifacts:
        r = conjugation_residual_exp(spec, u, bundle)
        out.append(CheckResult("exp-conjugation", r <= CONJUGATION_TOL * norm, f"residual/|u| = {r / norm:.3e}"))
    return out


def _full_solve_check(spec: OperatorSpec, rng) -> CheckResult:
    group = _small_group(spec)
    f = manufactured_rhs(spec, random_table(group, rng))
    sol = solve_full(spec, f)
    return CheckResult("full-solve", sol.relative_residual <= 1e-7, f"relative residual {sol.relative_residual:.3e}")


def _obstruction_check(spec: OperatorSpec) -> CheckResult:
    # the constant function 1 on the second factor lies in the kernel direction (k = 0, mu = 0)
    group = _small_group(spec)
    f = FourierTable.zeros(group)
    f.set_entry((0, 0), 0, 0, 0, 0, 1.0)
    f.set_entry((1, 1), 0, 0, 0, 0, 1.0)
    try:
        solve_full(spec, f)
    except NotAdmissible as exc:
        sol = solve_full(spec, f, project=True)
        ok = len(exc.report.offending) > 0 and sol.relative_residual <= 1e-7
        return CheckResult(
            "admissibility-obstruction",
            ok,
            f"{len(exc.report.offending)} obstruction entries; projected solve residual {sol.relative_residual:.3e}",
        )
    return CheckResult("admissibility-obstruction", False, "kernel-direction content was accepted")


def run_fixture(case: FixtureCase, trunc1: int | None = None, trunc2: int | None = None, seed: int = 0) -> FixtureRun:
    spec = build_spec(case, trunc1, trunc2)
    report = diagnose(spec)
    run = FixtureRun(case, report)
    checks = run.checks
    checks.append(CheckResult("GH", report.gh.value == case.gh, f"{report.gh.value} (expected {case.gh})"))
    checks.append(CheckResult("GS", report.gs.value == case.gs, f"{report.gs.value} (expected {case.gs})"))
    checks.append(CheckResult("GH implies GS", (not report.gh.yes) or report.gs.yes))
    checks.append(CheckResult("GH mod kernel equals GS", report.gh_mod_kernel == report.gs))
    rng = np.random.default_rng(seed)
    if "kernel-counterexample" in case.artifacts:
        checks.append(_kernel_check(spec))
    if "nonsolvable-rhs" in case.artifacts:
        checks.append(_nonsolvable_check(spec))
    if {"psi-conjugation", "conjugation"} & set(case.artifacts):
        checks.extend(_conjugation_checks(spec, case, rng))
    if "full-solve" in case.artifacts:
        checks.append(_full_solve_check(spec, rng))
    if "admissibility-obstruction" in case.artifacts:
        checks.append(_obstruction_check(spec))
    return run
