import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lgh import su2
from lgh.verify import _gram_residual


def _jy(two_ell: int) -> np.ndarray:
    """Spin-l generator J_y in the ascending-m basis, built from ladder operators."""
    ell = two_ell / 2
    ms = np.arange(-two_ell, two_ell + 1, 2) / 2
    jp = np.zeros((two_ell + 1, two_ell + 1))
    for i in range(two_ell):
        jp[i + 1, i] = math.sqrt(ell * (ell + 1) - ms[i] * (ms[i] + 1))
    return (jp - jp.T) / 2j


def _expm_rotation(two_ell: int, theta: float) -> np.ndarray:
    w, v = np.linalg.eigh(_jy(two_ell))
    return (v * np.exp(-1j * theta * w)) @ v.conj().T


def test_little_d_closed_forms():
    assert su2.wigner_little_d(0, 0, 0, 0.9) == pytest.approx(1.0)
    for th in (0.0, 0.4, 2.5):
        assert su2.wigner_little_d(1, 1, 1, th) == pytest.approx(math.cos(th / 2))
        assert su2.wigner_little_d(2, 0, 0, th) == pytest.approx(math.cos(th))


def test_parity_mismatch_rejected():
    with pytest.raises(ValueError):
        su2.wigner_little_d(2, 1, 0, 0.3)


@pytest.mark.parametrize("two_ell", [1, 2, 3, 6, 9])
def test_little_d_matches_matrix_exponential(two_ell):
    assert np.max(np.abs(su2.wigner_d_matrix(two_ell, 0.4) - _expm_rotation(two_ell, 0.4))) < 1e-10


def test_identity_and_explicit_matrix():
    e = su2.EulerAngles(0.0, 0.0, 0.0)
    for l in range(5):
        assert np.allclose(su2.rep_matrix(l, e), np.eye(l + 1))
    x = su2.EulerAngles(0.3, 1.1, -0.7)
    c, s = math.cos(0.55), math.sin(0.55)
    explicit = np.array(
        [[c * np.exp(1j * (0.3 - 0.7) / 2), 1j * s * np.exp(1j * (0.3 + 0.7) / 2)],
         [1j * s * np.exp(-1j * (0.3 + 0.7) / 2), c * np.exp(-1j * (0.3 - 0.7) / 2)]]
    )
    assert np.allclose(su2.su2_matrix(x), explicit)
    # ascending-m ordering reverses the rows and columns of the defining matrix
    assert np.allclose(su2.rep_matrix(1, x), explicit[::-1, ::-1], atol=1e-14)


angles = st.tuples(
    st.floats(0, 2 * math.pi), st.floats(0.01, math.pi - 0.01), st.floats(-2 * math.pi, 2 * math.pi)
).map(lambda t: su2.EulerAngles(*t))


@settings(max_examples=50)
@given(angles, st.integers(0, 8))
def test_character_formula(x, two_ell):
    # tr t^l(x) = sin((2l+1) alpha) / sin(alpha) with tr x = 2 cos(alpha)
    alpha = math.acos(max(-1.0, min(1.0, su2.euler_tr(x) / 2)))
    if abs(math.sin(alpha)) < 1e-6:
        return
    ref = math.sin((two_ell + 1) * alpha) / math.sin(alpha)
    assert np.trace(su2.rep_matrix(two_ell, x)).real == pytest.approx(ref, abs=1e-9)


@settings(max_examples=30)
@given(angles, angles)
def test_unitary_homomorphism(x, y):
    xy = su2.euler_from_matrix(su2.su2_matrix(x) @ su2.su2_matrix(y))
    for l in (1, 4, 7):
        D = su2.rep_matrix(l, x)
        assert np.max(np.abs(D @ D.conj().T - np.eye(l + 1))) < 1e-12
        assert np.max(np.abs(su2.rep_matrix(l, xy) - D @ su2.rep_matrix(l, y))) < 1e-10


@settings(max_examples=30)
@given(angles)
def test_euler_roundtrip(x):
    u = su2.su2_matrix(x)
    assert np.allclose(su2.su2_matrix(su2.euler_from_matrix(u)), u, atol=1e-12)


def test_weights_and_dpsi():
    assert su2.su2_weight(0) == 1
    assert su2.su2_weight(2) == pytest.approx(math.sqrt(3))
    assert su2.su2_weight(1) == pytest.approx(math.sqrt(7) / 2)
    assert np.array_equal(su2.dpsi_symbol(0), np.zeros((1, 1)))
    assert np.allclose(su2.dpsi_symbol(2), np.diag([-1j, 0, 1j]))


def test_dpsi_symbol_finite_differences():
    rng = np.random.default_rng(7)
    h = 1e-5
    for _ in range(5):
        x = su2.random_euler(rng)
        plus = su2.rep_matrix(3, su2.EulerAngles(x.phi, x.theta, x.psi + h))
        minus = su2.rep_matrix(3, su2.EulerAngles(x.phi, x.theta, x.psi - h))
        sym = su2.rep_matrix(3, x).conj().T @ (plus - minus) / (2 * h)
        assert np.max(np.abs(sym - su2.dpsi_symbol(3))) < 1e-7


def test_h_and_trace():
    assert su2.euler_h((0.3, math.pi, 1.0)) == pytest.approx(0.0, abs=1e-16)
    assert su2.euler_h((0.0, 0.0, math.pi)) == pytest.approx(-1.0)
    # h is the psi-derivative of the trace
    rng = np.random.default_rng(1)
    x = su2.random_euler(rng)
    d = 1e-6
    fd = (su2.euler_tr((x.phi, x.theta, x.psi + d)) - su2.euler_tr((x.phi, x.theta, x.psi - d))) / (2 * d)
    assert fd == pytest.approx(su2.euler_h(x), abs=1e-8)


def test_grid_shape_and_weights():
    g = su2.Su2Grid(6)
    assert g.shape == (7, 5, 13)
    assert np.sum(g.weights) == pytest.approx(1.0)
    assert np.sum(su2.Su2Grid(0).weights) == pytest.approx(1.0)


def test_quadrature_orthonormality():
    assert _gram_residual(4) < 1e-12


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(0, 6))
def test_transform_roundtrip(seed, P):
    rng = np.random.default_rng(seed)
    grid = su2.Su2Grid(P)
    blocks = [rng.normal(size=(l + 1, l + 1)) + 1j * rng.normal(size=(l + 1, l + 1)) for l in range(P + 1)]
    back = su2.su2_forward(su2.su2_inverse(blocks, grid), grid, P)
    for a, b in zip(blocks, back):
        assert np.allclose(a, b, atol=1e-12)
