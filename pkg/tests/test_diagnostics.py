from fractions import Fraction

import numpy as np
import pytest

from lgh.diagnostics import (
    NO_CERTIFIED,
    YES_CERTIFIED,
    build_kernel_counterexample,
    build_nonsolvable_rhs,
    certify_gap,
    diagnose,
    fit_diophantine,
    liouville_witnesses,
    membership_M_classifier,
    shell_profile,
)
from lgh.product import FourierTable, decay_classify, random_table
from lgh.scalars import liouville_convergents, liouville_value
from lgh.symbols import apply_operator_spectral

SQRT2 = "quadratic:0+1*sqrt(2)"


def torus(make_spec, a, trunc=32):
    return make_spec(factor1="T1", factor2="T1", trunc1=trunc, trunc2=trunc, a=a)


def test_rational_shell_floor(make_spec):
    spec = torus(make_spec, "rational:2/3", 30)
    assert min(shell_profile(spec).minima().values()) >= 1 / 3 - 1e-15
    cert = certify_gap(spec)
    assert cert.C == Fraction(1, 3) and cert.M == 0
    assert fit_diophantine(shell_profile(spec)).M == pytest.approx(0.0, abs=0.3)


def test_sqrt2_shell_minima(make_spec):
    spec = torus(make_spec, SQRT2, 100)
    prof = shell_profile(spec, probes=False)
    assert all(m.gap >= 1 / (3 * m.shell) for m in prof.shells if m.shell <= 100)
    assert all(m.lower <= m.gap for m in prof.shells)
    fit = fit_diophantine(shell_profile(spec))
    assert fit.status == "fitted" and fit.M == pytest.approx(1.0, abs=0.3)
    assert certify_gap(spec).M == 1


def test_liouville_probe_shell(make_spec):
    p3, q3 = liouville_convergents(3)[-1]
    probes = shell_profile(torus(make_spec, "liouville:4")).probes
    hit = [p for p in probes if p.key == (-p3, q3)]
    assert hit and hit[0].gap <= q3**-3 * (1 + 1e-12)


def test_liouville_no_polynomial_bound(make_spec):
    spec = torus(make_spec, "liouville:5")
    assert fit_diophantine(shell_profile(spec)).no_polynomial_bound
    assert certify_gap(spec) is None


def test_liouville_witness_gaps(make_spec):
    value = liouville_value(5)
    ws = liouville_witnesses(torus(make_spec, "liouville:5"))
    assert [(w.k, w.ell) for w in ws] == [(-p, q) for p, q in liouville_convergents(4)]
    for w in ws:
        assert w.gap == abs(w.k + value * w.ell)
        assert 0 < w.gap <= Fraction(1, abs(w.k) + abs(w.ell)) ** w.M
    # the j-th convergent reaches level j - 1
    assert [w.M for w in ws] == [0, 1, 2, 3]


@pytest.mark.parametrize(
    "kw, gh, gs",
    [
        (dict(factor1="T1", factor2="T1", a=SQRT2), YES_CERTIFIED, YES_CERTIFIED),
        (dict(factor1="T1", factor2="T1", a="complex:0+1*i"), YES_CERTIFIED, YES_CERTIFIED),
        (dict(factor1="T1", factor2="T1", a="rational:2/3"), NO_CERTIFIED, YES_CERTIFIED),
        (dict(factor1="T1", factor2="T1", a="liouville:5"), NO_CERTIFIED, NO_CERTIFIED),
        (dict(factor1="T1", factor2="SU2", a=SQRT2), NO_CERTIFIED, YES_CERTIFIED),
        (dict(factor1="T1", factor2="SU2", a="rational:-3/5"), NO_CERTIFIED, YES_CERTIFIED),
    ],
)
def test_verdicts(make_spec, kw, gh, gs):
    d = diagnose(make_spec(trunc1=12, trunc2=12, **kw))
    assert (d.gh.value, d.gs.value) == (gh, gs)
    assert d.gh_mod_kernel == d.gs
    assert (not d.gh.yes) or d.gs.yes


def test_liouville_report_lists_witnesses(make_spec):
    d = diagnose(torus(make_spec, "liouville:5"))
    assert d.witnesses and all(w.gap > 0 for w in d.witnesses)


def test_float_slope_is_evidence_only(make_spec):
    d = diagnose(torus(make_spec, "float:1.4142135623730951", 12))
    assert d.gh.value not in (YES_CERTIFIED, NO_CERTIFIED)


def test_kernel_counterexample_sphere(make_spec):
    spec = make_spec(factor1="T1", factor2="SU2", trunc1=16, trunc2=16, a=SQRT2)
    ce = build_kernel_counterexample(spec)
    assert sorted(ce.table.nonzero_keys()) == [(0, l) for l in range(0, 17, 2)]
    assert apply_operator_spectral(spec, ce.table).is_exactly_zero()
    assert decay_classify(ce.table).classification == "non-decaying"
    member, _ = membership_M_classifier(ce.table, spec)
    assert not member


def test_kernel_counterexample_diagonal(make_spec):
    spec = torus(make_spec, "rational:1", 12)
    ce = build_kernel_counterexample(spec)
    assert all(k + l == 0 for k, l in ce.table.nonzero_keys())
    assert apply_operator_spectral(spec, ce.table).is_exactly_zero()


def test_degenerate_counterexample(make_spec):
    ce = build_kernel_counterexample(torus(make_spec, SQRT2, 8))
    assert ce.degenerate and "constant" in ce.note


def test_empty_zero_set_rejected(make_spec):
    with pytest.raises(ValueError):
        build_kernel_counterexample(make_spec(factor1="TRIVIAL", factor2="SU2", trunc2=4, a="rational:1", q=SQRT2))


def test_nonsolvable_rhs(make_spec):
    rhs = build_nonsolvable_rhs(torus(make_spec, "liouville:5"), 3)
    for w, mag in rhs.formal_solution_magnitudes():
        assert mag > w.shell**3 or mag > w.shell**w.M
    assert max(w.M for w in rhs.witnesses) >= 3


@pytest.mark.parametrize("a", [SQRT2, "rational:2/3"])
def test_nonsolvable_rhs_rejected(make_spec, a):
    with pytest.raises(ValueError):
        build_nonsolvable_rhs(torus(make_spec, a, 8), 2)


def test_membership_trivial_cases(make_spec):
    spec = make_spec(factor1="T1", factor2="SU2", trunc1=6, trunc2=6, a=SQRT2)
    assert membership_M_classifier(FourierTable.zeros(spec.group), spec)[0]
    small = random_table(spec.group.with_truncs(2, 2), np.random.default_rng(0))
    u = FourierTable(spec.group, dict(small.blocks))  # band-limited, well inside the truncation
    assert membership_M_classifier(u, spec)[0]
