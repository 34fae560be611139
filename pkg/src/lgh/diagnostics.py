"""Finite-scale verdicts for global hypoellipticity (GH) and global solvability (GS).

Verdicts come in two strengths.  ``certified`` verdicts rest on an exact
argument from a fixed catalogue (lattice structure of the zero set, a constant
or quadratic-irrational gap bound, an exhibited Liouville ladder).  ``evidence``
verdicts come from regressions over the truncation and prove nothing.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .product import DecayFit, Factor, FourierTable, ProductGroup, decay_classify, shell_index
from .scalars import (
    LiouvilleTruncation,
    Surd,
    as_complex_const,
    convergents,
    liouville_convergents,
    symbol_form,
)
from .symbols import (
    FINITE_CERTIFIED,
    INFINITE_PATTERN,
    OperatorSpec,
    SingularSet,
    _step,
    enumerate_singular_set,
    symbol_value,
)

__all__ = [
    "YES_CERTIFIED",
    "YES_EVIDENCE",
    "NO_CERTIFIED",
    "NO_EVIDENCE",
    "INCONCLUSIVE",
    "ShellMinimum",
    "ShellGapProfile",
    "DiophantineFit",
    "GapCertificate",
    "LiouvilleWitness",
    "Verdict",
    "DiagnosticsReport",
    "shell_profile",
    "fit_diophantine",
    "certify_gap",
    "liouville_witnesses",
    "gh_verdict",
    "gs_verdict",
    "diagnose",
    "build_kernel_counterexample",
    "build_nonsolvable_rhs",
    "membership_M_classifier",
]

YES_CERTIFIED = "yes-certified"
YES_EVIDENCE = "yes-evidence"
NO_CERTIFIED = "no-certified"
NO_EVIDENCE = "no-evidence"
INCONCLUSIVE = "inconclusive"

M_MAX = 12
CF_PROBE_TERMS = 12


# ------------------------------------------------------------------ profiles


@dataclass(frozen=True)
class ShellMinimum:
    shell: int
    gap: float  # smallest nonzero |lambda + a mu - i q| in the shell
    lower: float  # certified lower bound of that value (0 for float kinds)
    key: tuple
    lam2: int
    mu2: int
    probe: bool = False  # True for continued-fraction convergent slots


@dataclass(frozen=True)
class ShellGapProfile:
    shells: tuple
    probes: tuple = ()

    def minima(self) -> dict[int, float]:
        return {s.shell: s.gap for s in self.shells}

    def points(self) -> list[ShellMinimum]:
        """Shell minima and probes ordered by shell, probes after in-truncation data."""
        return sorted(self.shells + self.probes, key=lambda p: (p.shell, p.probe))


def _shell_of(f1: Factor, i1: int, f2: Factor, i2: int) -> int:
    return shell_index(f1, i1, f2, i2)


def _min_rep(f: Factor, lam2: int) -> Optional[int]:
    """Smallest rep carrying the doubled eigenvalue ``lam2`` (ignoring truncation)."""
    if f.kind == "T1":
        return lam2 // 2 if lam2 % 2 == 0 else None
    if f.kind == "SU2":
        return abs(lam2)
    return 0 if lam2 == 0 else None


def shell_profile(spec: OperatorSpec, probes: bool = True) -> ShellGapProfile:
    """Per-shell minimum of the nonzero symbol moduli over all rows of all rep pairs."""
    if not spec.is_constant:
        spec = spec.constant_part()
    f1, f2 = spec.group.factor1, spec.group.factor2
    best: dict[int, ShellMinimum] = {}
    for i1 in f1.reps():
        w1 = f1.weight(i1)
        for i2 in f2.reps():
            s = int(round(w1 + f2.weight(i2)))
            for l2 in f1.lam2(i1):
                for m2 in f2.lam2(i2):
                    g = symbol_value(l2, m2, spec.a, spec.q)
                    if g.exact_zero or g.magnitude == 0.0:
                        continue
                    cur = best.get(s)
                    if cur is None or g.magnitude < cur.gap:
                        best[s] = ShellMinimum(s, g.magnitude, float(g.lower), (i1, i2), l2, m2)
    shells = tuple(best[s] for s in sorted(best))
    return ShellGapProfile(shells, _probe_points(spec) if probes else ())


def _probe_pairs(spec: OperatorSpec) -> list[tuple[int, int]]:
    """Doubled eigenvalue pairs at continued-fraction convergents of the real part of ``a``."""
    a, q = as_complex_const(spec.a), as_complex_const(spec.q)
    f1, f2 = spec.group.factor1, spec.group.factor2
    if "TRIVIAL" in (f1.kind, f2.kind) or not (a.exact and q.exact):
        return []
    if not (a.im.surd().is_zero() and q.re.surd().is_zero() and q.im.surd().is_zero()):
        return []
    if isinstance(a.re, LiouvilleTruncation):
        pairs = liouville_convergents(a.re.depth)
    else:
        pairs = convergents(a.re.surd(), CF_PROBE_TERMS)
    return [(-2 * p, 2 * qq) for p, qq in pairs]


def _probe_points(spec: OperatorSpec) -> tuple:
    f1, f2 = spec.group.factor1, spec.group.factor2
    out = []
    for l2, m2 in _probe_pairs(spec):
        i1, i2 = _min_rep(f1, l2), _min_rep(f2, m2)
        if i1 is None or i2 is None:
            continue
        g = symbol_form(l2, m2, spec.a, spec.q)
        if g.exact_zero:
            continue
        s = _shell_of(f1, i1, f2, i2)
        out.append(ShellMinimum(s, _gap_float(g), float(g.lower), (i1, i2), l2, m2, probe=True))
    return tuple(out)


def _gap_float(g) -> float:
    if g.magnitude > 0:
        return g.magnitude
    return float(g.lower)


# ---------------------------------------------------------- Diophantine fits


@dataclass(frozen=True)
class DiophantineFit:
    status: str  # "fitted", "no-polynomial-bound" or "inconclusive"
    C: Optional[float] = None
    M: Optional[float] = None
    r2: Optional[float] = None
    records: tuple = ()
    exponents: tuple = ()  # pointwise exponents -log(gap)/log(s) along probes

    @property
    def no_polynomial_bound(self) -> bool:
        return self.status == "no-polynomial-bound"


def _log_gap(p: ShellMinimum) -> float:
    return math.log(p.gap) if p.gap > 0 else math.log(max(p.lower, 1e-300))


def fit_diophantine(profile: ShellGapProfile, m_max: float = M_MAX) -> DiophantineFit:
    """Fit ``min gap ~ C s^-M`` on the lower envelope (running record minima).

    The no-polynomial-bound flag is raised when some point has pointwise
    exponent above ``m_max``, or when the exponents along the convergent probes
    keep climbing (three consecutive increases of at least 0.5 each).
    """
    pts = [p for p in profile.points() if p.shell >= 2]
    if len(pts) < 4:
        return DiophantineFit(INCONCLUSIVE)
    # lower envelope: running minimum of the gap over all shells up to s
    envelope, records, low = [], [], math.inf
    for p in pts:
        lg = _log_gap(p)
        if lg < low - 1e-12:
            records.append(p)
            low = lg
        envelope.append((math.log(p.shell), low))
    exps = tuple(-_log_gap(p) / math.log(p.shell) for p in pts if p.probe)
    steps = np.diff(exps) if len(exps) > 1 else np.array([])
    climbing = any(all(d >= 0.5 for d in steps[i : i + 3]) for i in range(len(steps) - 2))
    steep = any(-_log_gap(p) / math.log(p.shell) > m_max for p in pts)
    xs = np.array([x for x, _ in envelope])
    ys = np.array([y for _, y in envelope])
    slope, icept = np.polyfit(xs, ys, 1)
    resid = ys - (slope * xs + icept)
    ss = float(np.sum((ys - ys.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss if ss > 0 else 1.0
    M = max(0.0, -float(slope))
    C = min(math.exp(_log_gap(p) + M * math.log(p.shell)) for p in pts)
    status = "no-polynomial-bound" if (steep or climbing) else "fitted"
    return DiophantineFit(status, C, M, r2, tuple(records), exps)


# -------------------------------------------------------------- certificates


@dataclass(frozen=True)
class GapCertificate:
    """``|lambda + a mu - i q| >= C (<xi> + <eta>)^-M`` off the zero set, proved exactly."""

    kind: str  # "floor" or "quadratic"
    C: Fraction
    M: int
    note: str


def _dist_excluding(x: Surd, f: Factor) -> Optional[Fraction]:
    """Lower bound of ``min |x - p|`` over eigenvalues ``p != x`` of the factor."""
    step = _step(f)
    if step is None:
        return None if x.is_zero() else x.abs_lower_bound()
    y = x * step
    fl = y.floor()
    cands = [y - fl, Surd(Fraction(fl + 1)) - y]
    if y.is_rational and y.alpha.denominator == 1:
        cands = [Surd(Fraction(1))]
    lows = [c.abs_lower_bound() for c in cands if not c.is_zero()]
    return min(lows) / step


def _lcm(*xs: int) -> int:
    out = 1
    for x in xs:
        out = out * x // math.gcd(out, x)
    return out


def _upper(x: Surd) -> Fraction:
    lo, hi = x.interval()
    return max(abs(lo), abs(hi))


def certify_gap(spec: OperatorSpec) -> Optional[GapCertificate]:
    """A catalogue gap bound for constant exact ``a, q``, or None."""
    a, q = as_complex_const(spec.a), as_complex_const(spec.q)
    if not (a.exact and q.exact):
        return None
    if any(isinstance(c, LiouvilleTruncation) for c in (a.re, a.im, q.re, q.im)):
        return None
    f1, f2 = spec.group.factor1, spec.group.factor2
    try:
        ar, ai, qr, qi = (c.surd() for c in (a.re, a.im, q.re, q.im))
        if not ai.is_zero():
            mu_star = qr * ai.reciprocal()
            bounds = []
            d2 = _dist_excluding(mu_star, f2)
            if d2 is not None:
                bounds.append(ai.abs_lower_bound() * d2)
            if _on(mu_star, f2):
                c = ar * mu_star + qi
                d1 = _dist_excluding(Surd(Fraction(0)) - c, f1)
                if d1 is not None:
                    bounds.append(d1)
            if not bounds:
                return None
            return GapCertificate("floor", min(bounds), 0, "Im(a) != 0: imaginary part bounded away from 0 off mu = Re(q)/Im(a)")
        if not qr.is_zero():
            return GapCertificate("floor", qr.abs_lower_bound(), 0, "|Im(symbol)| = |Re(q)| > 0")
        s1, s2 = _step(f1) or 1, _step(f2) or 1
        if ar.is_rational and qi.is_rational:
            D = _lcm(s1, s2 * ar.alpha.denominator, qi.alpha.denominator)
            return GapCertificate("floor", Fraction(1, D), 0, f"rational data: symbol values lie in (1/{D})Z")
        if qi.d not in (0, ar.d):
            return None
        u, v, d = ar.alpha, ar.beta, ar.d
        alpha, beta = qi.alpha, qi.beta
        Dx = _lcm(s1, s2 * u.denominator, alpha.denominator)
        Dy = _lcm(s2 * v.denominator, beta.denominator)
        D = _lcm(Dx, Dy)
        root = _upper(Surd(Fraction(0), Fraction(1), d))
        c1 = max(Fraction(1), abs(u) + abs(v) * root)
        c0 = abs(alpha) + abs(beta) * root
        C = Fraction(1, D * D) / (c1 + c0)
        return GapCertificate(
            "quadratic",
            C,
            1,
            f"quadratic irrational a: |x + y sqrt({d})| >= |x^2 - {d} y^2| / |x - y sqrt({d})| with denominators <= {D}",
        )
    except ValueError:
        return None


def _on(x: Surd, f: Factor) -> bool:
    from .symbols import _on_lattice

    return _on_lattice(x, f)


# ------------------------------------------------------ Liouville witnesses


@dataclass(frozen=True)
class LiouvilleWitness:
    k: int
    ell: int
    gap: Fraction
    shell: int
    M: int  # largest M with 0 < gap <= (|k|+|ell|)^-M and gap * shell^M < 1

    @property
    def exponent(self) -> float:
        return -math.log(float(self.gap)) / math.log(abs(self.k) + abs(self.ell))


def _witness_level(gap: Fraction, k: int, ell: int, shell: int, cap: int = 64) -> int:
    size = abs(k) + abs(ell)
    M = 0
    while M < cap and gap * size ** (M + 1) <= 1 and gap * shell ** (M + 1) < 1:
        M += 1
    return M


def liouville_witnesses(spec: OperatorSpec) -> list[LiouvilleWitness]:
    """Convergent slots of a Liouville truncation with exact gaps and violation levels."""
    if not spec.is_constant:
        spec = spec.constant_part()
    a = as_complex_const(spec.a)
    if not isinstance(a.re, LiouvilleTruncation) or spec.q is not None:
        return []
    f1, f2 = spec.group.factor1, spec.group.factor2
    if "TRIVIAL" in (f1.kind, f2.kind):
        return []
    value = a.re.value
    out = []
    for p, qq in liouville_convergents(a.re.depth)[:-1]:
        k, ell = -p, qq
        gap = abs(k + value * ell)
        if gap == 0:
            continue
        i1, i2 = _min_rep(f1, 2 * k), _min_rep(f2, 2 * ell)
        shell = _shell_of(f1, i1, f2, i2)
        out.append(LiouvilleWitness(k, ell, gap, shell, _witness_level(gap, k, ell, shell)))
    return out


def _ladder_complete(ws: list[LiouvilleWitness], depth: int) -> bool:
    need = max(1, depth - 2)
    levels = {w.M for w in ws}
    top = max(levels, default=0)
    return top >= need


# --------------------------------------------------------------- verdicts


@dataclass(frozen=True)
class Verdict:
    value: str
    evidence: str

    @property
    def yes(self) -> bool:
        return self.value.startswith("yes")


@dataclass(frozen=True)
class DiagnosticsReport:
    spec: OperatorSpec
    diagnosed: OperatorSpec  # the constant-coefficient operator actually diagnosed
    singular: SingularSet
    profile: ShellGapProfile
    fit: DiophantineFit
    certificate: Optional[GapCertificate]
    witnesses: tuple
    gh: Verdict
    gs: Verdict
    notes: tuple = ()

    @property
    def gh_mod_kernel(self) -> Verdict:
        return self.gs


def gs_verdict(spec: OperatorSpec, cert=None, witnesses=None, fit=None) -> Verdict:
    if not spec.is_constant:
        return gs_verdict(spec.constant_part(), cert, witnesses, fit)
    cert = certify_gap(spec) if cert is None else cert
    if cert is not None:
        return Verdict(YES_CERTIFIED, f"{cert.kind} gap bound C={float(cert.C):.6g}, M={cert.M}: {cert.note}")
    ws = liouville_witnesses(spec) if witnesses is None else witnesses
    a = as_complex_const(spec.a)
    if ws and isinstance(a.re, LiouvilleTruncation) and _ladder_complete(ws, a.re.depth):
        levels = ", ".join(f"(k={w.k}, l={w.ell}, M={w.M})" for w in ws if w.M > 0)
        return Verdict(NO_CERTIFIED, f"Liouville ladder violates every bound up to M={max(w.M for w in ws)}: {levels}")
    fit = fit_diophantine(shell_profile(spec)) if fit is None else fit
    if fit.no_polynomial_bound:
        return Verdict(NO_EVIDENCE, "gap minima decay faster than any fitted power")
    if fit.status == "fitted":
        return Verdict(YES_EVIDENCE, f"fitted bound C={fit.C:.6g}, M={fit.M:.3f}, r2={fit.r2:.3f}")
    return Verdict(INCONCLUSIVE, "too few shells for a gap fit")


def gh_verdict(spec: OperatorSpec, singular=None, gs=None) -> Verdict:
    if not spec.is_constant:
        return gh_verdict(spec.constant_part(), singular, gs)
    singular = enumerate_singular_set(spec) if singular is None else singular
    gs = gs_verdict(spec) if gs is None else gs
    if singular.finiteness == INFINITE_PATTERN:
        return Verdict(NO_CERTIFIED, "infinite zero set: " + "; ".join(singular.notes))
    if gs.value == NO_CERTIFIED:
        return Verdict(NO_CERTIFIED, "no polynomial gap bound (" + gs.evidence + ")")
    if singular.finiteness == FINITE_CERTIFIED and gs.value == YES_CERTIFIED:
        return Verdict(YES_CERTIFIED, "finite zero set and " + gs.evidence)
    if gs.value == NO_EVIDENCE:
        return Verdict(NO_EVIDENCE, gs.evidence)
    touches = any(
        spec.group.factor1.at_edge(e.idx1) or spec.group.factor2.at_edge(e.idx2) for e in singular.entries
    )
    if touches:
        return Verdict(NO_EVIDENCE, "symbol zeros reach the truncation edge")
    if gs.yes:
        return Verdict(YES_EVIDENCE, "zero set bounded inside the truncation and " + gs.evidence)
    return Verdict(INCONCLUSIVE, "no certificate and no decisive evidence")


def diagnose(spec: OperatorSpec) -> DiagnosticsReport:
    """Full report; variable-coefficient operators are diagnosed through ``L_{a0 q0}``."""
    notes = []
    target = spec
    if not spec.is_constant:
        target = spec.constant_part()
        notes.append(
            f"verdicts transported from the normal form with a0 = {target.a.text()}"
            + (f", q0 = {target.q.text()}" if target.q is not None else "")
        )
    singular = enumerate_singular_set(target)
    profile = shell_profile(target)
    fit = fit_diophantine(profile)
    cert = certify_gap(target)
    ws = liouville_witnesses(target)
    gs = gs_verdict(target, cert, ws, fit)
    gh = gh_verdict(target, singular, gs)
    if gh.yes and not gs.yes:
        gh = Verdict(INCONCLUSIVE, "GH evidence without GS support: " + gh.evidence)
    return DiagnosticsReport(spec, target, singular, profile, fit, cert, tuple(ws), gh, gs, tuple(notes))


# ----------------------------------------------------------- constructions


@dataclass(frozen=True)
class Counterexample:
    table: FourierTable
    degenerate: bool
    note: str


def build_kernel_counterexample(spec: OperatorSpec, singular: SingularSet | None = None) -> Counterexample:
    """Table with 1 at every zero-set slot (first columns ``n = s = 1``), 0 elsewhere."""
    singular = enumerate_singular_set(spec) if singular is None else singular
    if not singular.entries:
        raise ValueError("the zero set is empty within the truncation: no kernel counterexample")
    table = FourierTable.zeros(spec.group)
    for e in singular.entries:
        table.set_entry(e.key, e.row1, 0, e.row2, 0, 1.0)
    keys = singular.keys
    degenerate = keys == [(0, 0)]
    note = (
        "degenerate: only the trivial pair, i.e. a constant function, which is smooth"
        if degenerate
        else f"{len(singular.entries)} kernel slots ({singular.finiteness})"
    )
    return Counterexample(table, degenerate, note)


@dataclass(frozen=True)
class NonsolvableRHS:
    table: FourierTable
    witnesses: tuple
    depth: int

    def formal_solution_magnitudes(self) -> list[tuple[LiouvilleWitness, float]]:
        return [(w, 1.0 / float(w.gap)) for w in self.witnesses]


def build_nonsolvable_rhs(spec: OperatorSpec, depth: int) -> NonsolvableRHS:
    """Admissible right-hand side whose formal solution outgrows ``s^M`` for each ``M <= depth``."""
    if certify_gap(spec) is not None:
        raise ValueError("a certified gap bound excludes a violating sequence")
    ws = liouville_witnesses(spec)
    chosen = []
    for M in range(1, depth + 1):
        hits = [w for w in ws if w.M >= M]
        if not hits:
            raise ValueError(f"no violating sequence found for M={M}")
        w = min(hits, key=lambda w: abs(w.ell))
        if w not in chosen:
            chosen.append(w)
    f1, f2 = spec.group.factor1, spec.group.factor2
    t1 = max(abs(_min_rep(f1, 2 * w.k)) for w in chosen)
    t2 = max(abs(_min_rep(f2, 2 * w.ell)) for w in chosen)
    group = spec.group.with_truncs(max(t1, f1.trunc), max(t2, f2.trunc))
    table = FourierTable.zeros(group)
    for w in chosen:
        i1, i2 = _min_rep(f1, 2 * w.k), _min_rep(f2, 2 * w.ell)
        r1 = group.factor1.lam2(i1).index(2 * w.k)
        r2 = group.factor2.lam2(i2).index(2 * w.ell)
        table.set_entry((i1, i2), r1, 0, r2, 0, 1.0)
    return NonsolvableRHS(table, tuple(chosen), depth)


def membership_M_classifier(u: FourierTable, spec: OperatorSpec) -> tuple[bool, DecayFit]:
    """Decay of ``u`` restricted to zero-set slots; smooth-like restriction means membership."""
    singular = enumerate_singular_set(spec.with_truncs(*u.group.truncs))
    restricted = u.restrict(lambda key: singular.mask(u.group, key))
    fit = decay_classify(restricted)
    return fit.smooth_like, fit
