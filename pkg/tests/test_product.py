import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lgh import su2
from lgh.product import (
    Factor,
    FourierTable,
    ProductGroup,
    decay_classify,
    double_forward,
    double_inverse,
    forward_x1,
    inverse_x1,
    l2_norm,
    partial_forward_x2,
    partial_inverse_x2,
    plancherel_norm,
    random_table,
    resample,
    shell_index,
)

GROUPS = {
    "T2": ProductGroup(Factor("T1", 5), Factor("T1", 4)),
    "T1xS3": ProductGroup(Factor("T1", 4), Factor("SU2", 5)),
    "S3": ProductGroup(Factor("TRIVIAL", 0), Factor("SU2", 6)),
    "S3xS3": ProductGroup(Factor("SU2", 3), Factor("SU2", 2)),
}
seeds = st.integers(0, 2**32 - 1)


def test_factor_basics():
    t, s = Factor("T1", 3), Factor("SU2", 3)
    assert list(t.reps()) == [-3, -2, -1, 0, 1, 2, 3]
    assert list(s.reps()) == [0, 1, 2, 3]
    assert t.lam2(-2) == [-4] and s.lam2(3) == [-3, -1, 1, 3]
    assert s.dim(3) == 4 and t.dim(5) == 1
    assert t.at_edge(-3) and not t.at_edge(2)
    with pytest.raises(ValueError):
        Factor("SO3", 2)


def test_shell_index():
    t = Factor("T1", 10)
    assert shell_index(t, 0, t, 0) == 2
    assert shell_index(t, 3, t, -4) == round(np.sqrt(10) + np.sqrt(17))
    # huge labels stay exact: <k> ~ |k|
    big = 10**24
    assert shell_index(t, -big, t, 1) == big + 1


def test_constant_function():
    g = GROUPS["T1xS3"]
    tab = double_forward(g.grid(4, 5).constant(1.0), g)
    assert tab.blocks[(0, 0)].reshape(-1)[0] == pytest.approx(1.0)
    assert tab.max_abs() == pytest.approx(1.0)
    assert sum(np.sum(np.abs(b) > 1e-13) for b in tab.blocks.values()) == 1
    assert plancherel_norm(tab) == pytest.approx(1.0)
    assert plancherel_norm(FourierTable.zeros(g)) == 0


def test_matrix_entry_product():
    # xi_11(x1) eta_11(x2) has the single coefficient 1/(d_xi d_eta)
    g = GROUPS["S3xS3"]

    def f(p1, t1, s1, p2, t2, s2):
        a = np.exp(-0.5j * (p1 + s1)) * su2.wigner_little_d(1, -1, -1, t1)
        b = np.exp(-1j * (p2 + s2)) * su2.wigner_little_d(2, -2, -2, t2)
        return a * b

    tab = double_forward(g.grid(3, 2).sample(f), g)
    blk = tab.blocks[(1, 2)]
    assert blk[0, 0, 0, 0] == pytest.approx(1 / 6, abs=1e-14)
    blk = blk.copy()
    blk[0, 0, 0, 0] = 0
    rest = max(np.max(np.abs(b)) for k, b in tab.blocks.items() if k != (1, 2))
    assert max(rest, np.max(np.abs(blk))) < 1e-13


@pytest.mark.parametrize("name", sorted(GROUPS))
@settings(max_examples=8, deadline=None)
@given(seed=seeds)
def test_plancherel_and_roundtrip(name, seed):
    g = GROUPS[name]
    u = random_table(g, np.random.default_rng(seed))
    f = double_inverse(u, g.grid(*g.truncs))
    assert l2_norm(f) == pytest.approx(plancherel_norm(u), rel=1e-10)
    back = double_forward(f, g)
    assert plancherel_norm(back - u) < 1e-11 * plancherel_norm(u)


@pytest.mark.parametrize("name", ["T2", "T1xS3"])
def test_partial_transforms_compose(name):
    g = GROUPS[name]
    u = random_table(g, np.random.default_rng(2))
    grid = g.grid(*g.truncs)
    f = double_inverse(u, grid)
    field = partial_forward_x2(f, g.factor2)
    assert plancherel_norm(forward_x1(field, g.factor1) - u) < 1e-11 * plancherel_norm(u)
    again = partial_inverse_x2(inverse_x1(u, grid.g1), grid.g2)
    assert l2_norm(again - f) < 1e-11 * l2_norm(f)


def test_resample_preserves_band_limited():
    g = GROUPS["T1xS3"]
    u = random_table(g, np.random.default_rng(4))
    coarse = double_inverse(u, g.grid(*g.truncs))
    fine = resample(coarse, g.grid(9, 8))
    assert plancherel_norm(double_forward(fine, g) - u) < 1e-11 * plancherel_norm(u)


def test_dense_roundtrip_and_algebra():
    g = GROUPS["T2"]
    u = random_table(g, np.random.default_rng(5))
    assert plancherel_norm(FourierTable.from_dense(g, u.to_dense()) - u) == 0
    assert plancherel_norm(u * 2 - u - u) == 0
    assert (-u + u).is_exactly_zero()


def _table_from(group, fn):
    tab = FourierTable.zeros(group)
    for k in group.factor1.reps():
        for l in group.factor2.reps():
            v = fn(k, l)
            if v:
                tab.set_entry((k, l), 0, 0, 0, 0, v)
    return tab


def test_decay_smooth_like():
    g = ProductGroup(Factor("T1", 24), Factor("T1", 24))
    tab = _table_from(g, lambda k, l: np.exp(-(np.hypot(1, k) + np.hypot(1, l))))
    fit = decay_classify(tab)
    assert fit.classification == "smooth-like"
    assert fit.slope <= -4


def test_decay_non_decaying_family():
    g = ProductGroup(Factor("T1", 24), Factor("T1", 24))
    fit = decay_classify(_table_from(g, lambda k, l: 1.0 if k + l == 0 else 0.0))
    assert fit.classification == "non-decaying"
    assert fit.reaches_edge


def test_decay_trivial_tables():
    g = ProductGroup(Factor("T1", 8), Factor("T1", 8))
    assert decay_classify(FourierTable.zeros(g)).classification == "smooth-like"
    single = FourierTable.zeros(g)
    single.set_entry((1, 1), 0, 0, 0, 0, 1.0)
    assert decay_classify(single).classification == "smooth-like"
