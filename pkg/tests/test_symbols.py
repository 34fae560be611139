import numpy as np
import pytest

from lgh.product import FourierTable, double_forward, double_inverse, plancherel_norm, random_table
from lgh.scalars import parse_scalar
from lgh.symbols import (
    OperatorSpec,
    TrigPoly,
    apply_operator_grid,
    apply_operator_spectral,
    enumerate_singular_set,
    full_symbol,
    zero_structure,
)

SQRT2 = "quadratic:0+1*sqrt(2)"


def test_full_symbol_values(make_spec):
    spec = make_spec(factor1="T1", factor2="T1", trunc1=4, trunc2=4, a=SQRT2)
    assert full_symbol(spec, 0, 0) == 0
    assert full_symbol(spec, 2, 2) == pytest.approx(1j * (1 + np.sqrt(2)))
    s3 = make_spec(factor1="TRIVIAL", factor2="SU2", trunc2=2, a="rational:1", q="complex:0+1/2*i")
    assert full_symbol(s3, 0, 1) == pytest.approx(1j)


def test_variable_spec_has_no_constant_symbol(make_spec):
    spec = make_spec(factor1="T1", factor2="T1", trunc1=4, trunc2=4, a="trigpoly:[-0.5j, rational:1, 0.5j]")
    with pytest.raises(ValueError):
        full_symbol(spec, 2, 2)


def test_trigpoly():
    p = TrigPoly.parse("[0.5, quadratic:0+1*sqrt(2), 0.5]")
    assert p.K == 1 and p.mean == parse_scalar(SQRT2)
    assert p(0.0) == pytest.approx(1 + np.sqrt(2))
    assert TrigPoly.parse(p.text()) == p
    assert not TrigPoly.parse("[1j, 0, 1j]").is_real()
    with pytest.raises(ValueError):
        TrigPoly.parse("[1, 2]")


def test_complex_variable_coefficient_rejected(make_spec):
    with pytest.raises(ValueError):
        make_spec(factor1="T1", factor2="T1", trunc1=2, trunc2=2, a="trigpoly:[1j, 0, 1j]")


def test_irrational_torus_zero_set(make_spec):
    ss = enumerate_singular_set(make_spec(factor1="T1", factor2="T1", trunc1=12, trunc2=12, a=SQRT2))
    assert ss.keys == [(0, 0)]
    assert ss.finiteness == "finite-certified"


def test_rational_torus_zero_line(make_spec):
    spec = make_spec(factor1="T1", factor2="T1", trunc1=6, trunc2=6, a="rational:2/3")
    ss = enumerate_singular_set(spec)
    # k + 2l/3 = 0 with |k|, |l| <= 6
    assert sorted(ss.keys) == [(-4, 6), (-2, 3), (0, 0), (2, -3), (4, -6)]
    assert zero_structure(spec)[0] == "infinite-pattern-detected"


def test_circle_times_sphere_zero_set(make_spec):
    ss = enumerate_singular_set(make_spec(factor1="T1", factor2="SU2", trunc1=8, trunc2=6, a=SQRT2))
    assert ss.keys == [(0, 0), (0, 2), (0, 4), (0, 6)]
    assert all(e.mu2 == 0 and e.lam2 == 0 for e in ss.entries)
    assert ss.finiteness == "infinite-pattern-detected"


def test_sphere_perturbation_zero_sets(make_spec):
    half = make_spec(factor1="TRIVIAL", factor2="SU2", trunc2=6, a="rational:1", q="complex:0+3/2*i")
    ss = enumerate_singular_set(half)
    assert ss.keys == [(0, 3), (0, 5)] and all(e.mu2 == -3 for e in ss.entries)
    other = make_spec(factor1="TRIVIAL", factor2="SU2", trunc2=6, a="rational:1", q="complex:0+1/3*i")
    assert enumerate_singular_set(other).entries == ()
    assert zero_structure(other)[0] == "finite-certified"


def test_float_data_is_heuristic(make_spec):
    ss = enumerate_singular_set(make_spec(factor1="T1", factor2="T1", trunc1=3, trunc2=3, a="float:-1"))
    assert ss.heuristic and (1, 1) in ss.keys


def test_constants_are_killed(make_spec):
    spec = make_spec(factor1="T1", factor2="SU2", trunc1=3, trunc2=3, a=SQRT2)
    one = FourierTable.zeros(spec.group)
    one.set_entry((0, 0), 0, 0, 0, 0, 1.0)
    assert apply_operator_spectral(spec, one).is_exactly_zero()


def test_symbol_zero_slot(make_spec):
    spec = make_spec(factor1="T1", factor2="T1", trunc1=3, trunc2=3, a="rational:-1")
    u = FourierTable.zeros(spec.group)
    u.set_entry((1, 1), 0, 0, 0, 0, 1.0)
    assert apply_operator_spectral(spec, u).is_exactly_zero()


@pytest.mark.parametrize(
    "kw",
    [
        dict(factor1="T1", factor2="T1", trunc1=8, trunc2=8, a=SQRT2),
        dict(factor1="T1", factor2="SU2", trunc1=6, trunc2=6, a="complex:1/2+1*i", q="rational:3"),
        dict(factor1="TRIVIAL", factor2="SU2", trunc2=8, a="rational:1", q="complex:0+3/2*i"),
    ],
)
def test_spectral_matches_grid(make_spec, kw):
    spec = make_spec(**kw)
    u = random_table(spec.group, np.random.default_rng(0))
    grid = spec.group.grid(*(2 * t for t in spec.group.truncs))
    direct = double_forward(apply_operator_grid(spec, double_inverse(u, grid)), spec.group)
    assert plancherel_norm(apply_operator_spectral(spec, u) - direct) <= 1e-9 * plancherel_norm(u)


def test_spec_fields(make_spec):
    spec = make_spec(factor1="T1", factor2="T1", trunc1=2, trunc2=2, a="trigpoly:[0.5, quadratic:0+1*sqrt(2), 0.5]")
    assert isinstance(spec, OperatorSpec) and spec.variable_a and not spec.is_constant
    assert spec.a0 == parse_scalar(SQRT2)
    assert spec.constant_part().is_constant
