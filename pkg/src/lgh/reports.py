"""Deterministic text reports for the command-line tool."""
from __future__ import annotations

from .diagnostics import DiagnosticsReport
from .formats import Report, fmt_float, spec_lines
from .normal_form import ConjugatorBundle, FullSolution
from .product import DecayFit, plancherel_norm
from .solver import AdmissibilityReport
from .symbols import OperatorSpec

__all__ = ["analysis_report", "solve_report", "obstruction_report", "normal_form_report"]


def _operator(rep: Report, spec: OperatorSpec) -> None:
    rep.section("operator")
    for k, v in spec_lines(spec):
        rep.kv(k, v)
    rep.end()


def _decay(rep: Report, name: str, fit: DecayFit) -> None:
    rep.section(name)
    rep.kv("classification", fit.classification)
    rep.kv("slope", fit.slope)
    rep.kv("r2", fit.r2)
    rep.kv("reaches_edge", fit.reaches_edge)
    rep.section("shell_maxima")
    for s, v in fit.shells:
        rep.item(f"shell={s} max_block_norm={fmt_float(v)}")
    rep.end().end()


def analysis_report(d: DiagnosticsReport) -> str:
    rep = Report("analyze")
    _operator(rep, d.spec)
    if d.diagnosed is not d.spec:
        rep.section("normal_form")
        rep.kv("a0", d.diagnosed.a.text())
        rep.kv("q0", None if d.diagnosed.q is None else d.diagnosed.q.text())
        rep.end()
    rep.section("verdicts")
    rep.kv("GH", d.gh.value).kv("GH_evidence", d.gh.evidence)
    rep.kv("GS", d.gs.value).kv("GS_evidence", d.gs.evidence)
    rep.kv("GH_mod_kernel", d.gh_mod_kernel.value)
    rep.end()
    rep.section("zero_set")
    rep.kv("finiteness", d.singular.finiteness)
    rep.kv("heuristic", d.singular.heuristic)
    rep.kv("count", len(d.singular.entries))
    rep.section("notes")
    for n in d.singular.notes:
        rep.item(n)
    rep.end()
    rep.section("entries")
    for e in d.singular.entries:
        rep.item(f"idx1={e.idx1} idx2={e.idx2} lam2={e.lam2} mu2={e.mu2}")
    rep.end().end()
    rep.section("certificate")
    if d.certificate is None:
        rep.kv("kind", None)
    else:
        c = d.certificate
        rep.kv("kind", c.kind).kv("C", f"{c.C.numerator}/{c.C.denominator}").kv("M", c.M).kv("note", c.note)
    rep.end()
    f = d.fit
    rep.section("diophantine_fit")
    rep.kv("status", f.status).kv("C", f.C).kv("M", f.M).kv("r2", f.r2)
    rep.section("probe_exponents")
    for x in f.exponents:
        rep.item(fmt_float(x))
    rep.end().end()
    rep.section("liouville_witnesses")
    for w in d.witnesses:
        rep.item(f"k={w.k} l={w.ell} shell={w.shell} M={w.M} gap={fmt_float(float(w.gap))}")
    rep.end()
    rep.section("gap_profile")
    for p in d.profile.points():
        rep.item(
            f"shell={p.shell} min_gap={fmt_float(p.gap)} lower={fmt_float(p.lower)} "
            f"key=({p.key[0]},{p.key[1]}) lam2={p.lam2} mu2={p.mu2} probe={'true' if p.probe else 'false'}"
        )
    rep.end()
    rep.section("notes")
    for n in d.notes:
        rep.item(n)
    rep.end()
    return rep.text()


def obstruction_report(spec: OperatorSpec, report: AdmissibilityReport) -> str:
    rep = Report("solve")
    _operator(rep, spec)
    rep.section("admissibility")
    rep.kv("admissible", False).kv("tolerance", report.tol).kv("heuristic", report.heuristic)
    rep.kv("count", len(report.offending))
    rep.section("offending")
    for line in report.lines():
        rep.item(line)
    rep.end().end()
    return rep.text()


def solve_report(spec: OperatorSpec, sol: FullSolution, fit: DecayFit) -> str:
    rep = Report("solve")
    _operator(rep, spec)
    rep.section("admissibility")
    rep.kv("admissible", sol.report.admissible).kv("tolerance", sol.report.tol)
    rep.kv("projected", sol.removed is not None)
    rep.kv("removed_norm", None if sol.removed is None else plancherel_norm(sol.removed))
    rep.end()
    rep.section("solution")
    t1, t2 = sol.table.group.truncs
    rep.kv("trunc1", t1).kv("trunc2", t2)
    rep.kv("residual", sol.residual).kv("relative_residual", sol.relative_residual)
    rep.end()
    _decay(rep, "solution_decay", fit)
    return rep.text()


def normal_form_report(spec: OperatorSpec, bundle: ConjugatorBundle, residuals: dict, psi_band: int | None) -> str:
    rep = Report("normal-form")
    _operator(rep, spec)
    rep.section("conjugators")
    rep.kv("a0", bundle.a0.text())
    rep.kv("q0", None if bundle.q0 is None else bundle.q0.text())
    rep.section("A_coefficients")
    if bundle.A is not None:
        K = bundle.A.K
        for k, c in zip(range(-K, K + 1), bundle.A.values):
            rep.item(f"k={k} re={fmt_float(c.real)} im={fmt_float(c.imag)}")
    rep.end()
    if bundle.Q is not None:
        g = bundle.Q.grid
        rep.kv("Q", f"grid function ({g.g1.kind} band {g.g1.band}, {g.g2.kind} band {g.g2.band})")
    rep.kv("psi_grid_band", psi_band)
    rep.end()
    rep.section("cohomology_residuals")
    for k in sorted(residuals):
        rep.kv(k, residuals[k])
    rep.end()
    return rep.text()
