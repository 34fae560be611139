"""Harmonic analysis on SU(2) in Euler angles.

Matrix coefficients are indexed by doubled half-integers: a representation is
``two_ell`` and its rows/columns run over ``two_m = -two_ell, -two_ell+2, ..., two_ell``
in ascending order.  The coefficient functions are

    t_mn(phi, theta, psi) = exp(i*m*phi) * i**(n-m) * d_mn(theta) * exp(i*n*psi)

which for ``two_ell = 1`` reproduces the 2x2 matrix

    [[cos(theta/2) e^{i(phi+psi)/2},  i sin(theta/2) e^{i(phi-psi)/2}],
     [i sin(theta/2) e^{-i(phi-psi)/2}, cos(theta/2) e^{-i(phi+psi)/2}]]

up to reversing the basis order, and makes ``d/dpsi`` act on ``t`` by right
multiplication with ``diag(i*m)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

__all__ = [
    "Su2Rep",
    "EulerAngles",
    "Su2Grid",
    "wigner_little_d",
    "wigner_d_matrix",
    "rep_matrix",
    "su2_matrix",
    "euler_from_matrix",
    "random_euler",
    "su2_quadrature",
    "su2_forward",
    "su2_inverse",
    "su2_weight",
    "dpsi_symbol",
    "euler_h",
    "euler_tr",
]


@dataclass(frozen=True)
class Su2Rep:
    two_ell: int

    def __post_init__(self):
        if self.two_ell < 0:
            raise ValueError("two_ell must be nonnegative")

    @property
    def ell(self) -> Fraction:
        return Fraction(self.two_ell, 2)

    @property
    def dim(self) -> int:
        return self.two_ell + 1

    @property
    def two_ms(self) -> np.ndarray:
        return np.arange(-self.two_ell, self.two_ell + 1, 2)

    @property
    def weight(self) -> float:
        return su2_weight(self)


@dataclass(frozen=True)
class EulerAngles:
    phi: float
    theta: float
    psi: float

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.phi, self.theta, self.psi)


def _rep(rep) -> Su2Rep:
    return rep if isinstance(rep, Su2Rep) else Su2Rep(int(rep))


def su2_weight(rep) -> float:
    """``<ell> = sqrt(1 + ell(ell+1))``."""
    j2 = _rep(rep).two_ell
    return math.sqrt(1.0 + j2 * (j2 + 2) / 4.0)


def dpsi_symbol(rep) -> np.ndarray:
    """Symbol of ``d/dpsi``: the diagonal matrix ``diag(i*m)``, ``m`` ascending."""
    return np.diag(1j * _rep(rep).two_ms / 2.0)


@lru_cache(maxsize=None)
def _d_terms(two_ell: int, two_m: int, two_n: int) -> tuple[tuple[float, int, int], ...]:
    # Wigner's sum: d_mn(b) = sum_s c_s cos(b/2)^pc sin(b/2)^ps
    j_p_m = (two_ell + two_m) // 2
    j_m_m = (two_ell - two_m) // 2
    j_p_n = (two_ell + two_n) // 2
    j_m_n = (two_ell - two_n) // 2
    m_m_n = (two_m - two_n) // 2
    num = math.factorial(j_p_m) * math.factorial(j_m_m) * math.factorial(j_p_n) * math.factorial(j_m_n)
    terms = []
    for s in range(max(0, -m_m_n), min(j_p_n, j_m_m) + 1):
        den = (
            math.factorial(j_p_n - s)
            * math.factorial(s)
            * math.factorial(m_m_n + s)
            * math.factorial(j_m_m - s)
        )
        mag = math.sqrt(Fraction(num, den * den))
        sign = -1.0 if (m_m_n + s) % 2 else 1.0
        terms.append((sign * mag, two_ell - m_m_n - 2 * s, m_m_n + 2 * s))
    return tuple(terms)


def _check_parity(two_ell: int, *two_idx: int) -> None:
    for t in two_idx:
        if (two_ell - t) % 2 or abs(t) > two_ell:
            raise ValueError(f"index {t}/2 is not a valid row of the representation 2l={two_ell}")


def wigner_little_d(two_ell: int, two_m: int, two_n: int, theta):
    """Real Wigner function ``d^l_mn(theta) = <l m| exp(-i theta J_y) |l n>``."""
    _check_parity(two_ell, two_m, two_n)
    theta = np.asarray(theta, dtype=float)
    c = np.cos(theta / 2.0)
    s = np.sin(theta / 2.0)
    out = np.zeros_like(theta)
    for coef, pc, ps in _d_terms(two_ell, two_m, two_n):
        out = out + coef * c**pc * s**ps
    return out if out.ndim else float(out)


def wigner_d_matrix(two_ell: int, theta) -> np.ndarray:
    """All ``d^l_mn(theta)``; shape ``(d, d) + theta.shape``, rows ``m`` ascending."""
    theta = np.asarray(theta, dtype=float)
    idx = range(-two_ell, two_ell + 1, 2)
    return np.array([[wigner_little_d(two_ell, m, n, theta) for n in idx] for m in idx])


def _w_matrix(two_ell: int, theta) -> np.ndarray:
    # w_mn(theta) = i^(n-m) d_mn(theta), the theta-part of t_mn
    d = wigner_d_matrix(two_ell, theta)
    ms = np.arange(-two_ell, two_ell + 1, 2)
    phase = 1j ** (((ms[None, :] - ms[:, None]) // 2) % 4)
    return d * phase.reshape(phase.shape + (1,) * (d.ndim - 2))


def rep_matrix(rep, x: EulerAngles) -> np.ndarray:
    """The unitary matrix ``t^l(x)``, rows/columns ordered by ascending ``m``."""
    two_ell = _rep(rep).two_ell
    ms = np.arange(-two_ell, two_ell + 1, 2) / 2.0
    left = np.exp(1j * ms * x.phi)
    right = np.exp(1j * ms * x.psi)
    return left[:, None] * _w_matrix(two_ell, x.theta) * right[None, :]


def su2_matrix(x: EulerAngles) -> np.ndarray:
    """The element of SU(2) with Euler angles ``x`` as a 2x2 matrix."""
    c, s = math.cos(x.theta / 2.0), math.sin(x.theta / 2.0)
    p, m = (x.phi + x.psi) / 2.0, (x.phi - x.psi) / 2.0
    return np.array(
        [
            [c * np.exp(1j * p), 1j * s * np.exp(1j * m)],
            [1j * s * np.exp(-1j * m), c * np.exp(-1j * p)],
        ]
    )


def euler_from_matrix(u: np.ndarray) -> EulerAngles:
    """Inverse of :func:`su2_matrix`, normalized to ``phi in [0, 2pi)``, ``psi in [-2pi, 2pi)``."""
    alpha, beta = u[0, 0], u[0, 1]
    theta = 2.0 * math.atan2(abs(beta), abs(alpha))
    half_sum = float(np.angle(alpha)) if abs(alpha) > 0 else 0.0
    half_diff = float(np.angle(-1j * beta)) if abs(beta) > 0 else 0.0
    phi = half_sum + half_diff
    psi = half_sum - half_diff
    # shifting phi and psi together by 2pi leaves the element unchanged
    turns = math.floor(phi / (2 * math.pi))
    phi -= 2 * math.pi * turns
    psi -= 2 * math.pi * turns
    psi = (psi + 2 * math.pi) % (4 * math.pi) - 2 * math.pi
    return EulerAngles(phi, theta, psi)


def random_euler(rng: np.random.Generator) -> EulerAngles:
    """A Haar-distributed random element."""
    return EulerAngles(
        rng.uniform(0, 2 * math.pi),
        math.acos(rng.uniform(-1.0, 1.0)),
        rng.uniform(-2 * math.pi, 2 * math.pi),
    )


def euler_h(x) -> float:
    """``h = -cos(theta/2) sin((phi+psi)/2)``, the ``psi``-derivative of :func:`euler_tr`."""
    phi, theta, psi = x.as_tuple() if isinstance(x, EulerAngles) else x
    return -np.cos(np.asarray(theta) / 2.0) * np.sin((np.asarray(phi) + np.asarray(psi)) / 2.0)


def euler_tr(x) -> float:
    """Trace of the 2x2 matrix: ``2 cos(theta/2) cos((phi+psi)/2)``."""
    phi, theta, psi = x.as_tuple() if isinstance(x, EulerAngles) else x
    return 2.0 * np.cos(np.asarray(theta) / 2.0) * np.cos((np.asarray(phi) + np.asarray(psi)) / 2.0)


@dataclass(frozen=True)
class Su2Grid:
    """Tensor quadrature: uniform in ``phi`` and ``psi``, Gauss-Legendre in ``cos(theta)``.

    ``band`` is the largest ``2l`` of functions the grid represents exactly:
    products of two such functions integrate exactly and ``d/dpsi`` is exact on
    the samples.
    """

    band: int

    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.band + 1, self.band // 2 + 2, 2 * self.band + 1)

    @property
    def phi(self) -> np.ndarray:
        n = self.shape[0]
        return 2 * np.pi * np.arange(n) / n

    @property
    def psi(self) -> np.ndarray:
        n = self.shape[2]
        return -2 * np.pi + 4 * np.pi * np.arange(n) / n

    @property
    def theta(self) -> np.ndarray:
        return _gauss_theta(self.shape[1])[0]

    @property
    def theta_weights(self) -> np.ndarray:
        return _gauss_theta(self.shape[1])[1]

    @property
    def weights(self) -> np.ndarray:
        nphi, _, npsi = self.shape
        return np.broadcast_to(self.theta_weights[None, :, None] / (nphi * npsi), self.shape)

    @property
    def nodes(self) -> list[EulerAngles]:
        return [
            EulerAngles(p, t, s)
            for p in self.phi
            for t in self.theta
            for s in self.psi
        ]

    def mesh(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return np.meshgrid(self.phi, self.theta, self.psi, indexing="ij")

    def sample(self, func) -> np.ndarray:
        """Evaluate ``func(phi, theta, psi)`` (broadcasting) on the grid."""
        return np.asarray(func(*self.mesh()), dtype=complex)

    @property
    def two_ell_max(self) -> int:
        return self.band


@lru_cache(maxsize=None)
def _gauss_theta(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    theta = np.arccos(x[::-1])
    w = w[::-1] / 2.0
    theta.setflags(write=False)
    w.setflags(write=False)
    return theta, w


def su2_quadrature(two_ell_max: int) -> Su2Grid:
    """Grid on which all ``t^l_mn conj(t^l'_m'n')`` with ``2l, 2l' <= two_ell_max`` integrate exactly."""
    if two_ell_max < 0:
        raise ValueError("two_ell_max must be nonnegative")
    return Su2Grid(two_ell_max)


def block_layout(two_ell_max: int) -> list[tuple[int, int, int]]:
    """``(two_ell, offset, dim)`` for the flattened coefficient vector."""
    out, off = [], 0
    for j2 in range(two_ell_max + 1):
        d = j2 + 1
        out.append((j2, off, d))
        off += d * d
    return out


def flat_size(two_ell_max: int) -> int:
    return sum(d * d for d in range(1, two_ell_max + 2))


@lru_cache(maxsize=64)
def _w_tables(two_ell_max: int, n_theta: int) -> tuple[np.ndarray, ...]:
    theta = _gauss_theta(n_theta)[0]
    tabs = tuple(_w_matrix(j2, theta) for j2 in range(two_ell_max + 1))
    for t in tabs:
        t.setflags(write=False)
    return tabs


def _exp_tables(grid: Su2Grid, two_ell_max: int, sign: int):
    freqs = np.arange(-two_ell_max, two_ell_max + 1) / 2.0
    e_phi = np.exp(sign * 1j * freqs[:, None] * grid.phi[None, :])
    e_psi = np.exp(sign * 1j * freqs[:, None] * grid.psi[None, :])
    return e_phi, e_psi


def su2_forward_flat(samples: np.ndarray, grid: Su2Grid, two_ell_max: int) -> np.ndarray:
    """Forward transform over the last three axes into the flattened block vector."""
    if grid.band < two_ell_max:
        raise ValueError(
            f"SU(2) grid of band {grid.band} cannot resolve 2l_max={two_ell_max}; need band >= {two_ell_max}"
        )
    samples = np.asarray(samples, dtype=complex)
    nphi, ntheta, npsi = grid.shape
    e_phi, e_psi = _exp_tables(grid, two_ell_max, -1)
    g = np.einsum("...pty,ap,by->...atb", samples, e_phi / nphi, e_psi / npsi, optimize=True)
    wt = grid.theta_weights
    lead = samples.shape[:-3]
    out = np.zeros(lead + (flat_size(two_ell_max),), dtype=complex)
    for (j2, off, d), w in zip(block_layout(two_ell_max), _w_tables(two_ell_max, ntheta)):
        pos = np.arange(-j2, j2 + 1, 2) + two_ell_max
        sub = g[..., pos, :, :][..., pos]  # [..., n, t, m]
        # fhat_mn = sum_t wt conj(w_nm(t)) G[n, t, m]
        blk = np.einsum("...ntm,nmt,t->...mn", sub, np.conj(w), wt, optimize=True)
        out[..., off : off + d * d] = blk.reshape(lead + (d * d,))
    return out


def su2_inverse_flat(coeffs: np.ndarray, grid: Su2Grid, two_ell_max: int) -> np.ndarray:
    """Synthesis ``f = sum_l d_l tr(t^l fhat(l))`` from the flattened block vector."""
    coeffs = np.asarray(coeffs, dtype=complex)
    lead = coeffs.shape[:-1]
    flat = coeffs.reshape((-1, coeffs.shape[-1]))
    nphi, ntheta, npsi = grid.shape
    nf = 2 * two_ell_max + 1
    h = np.zeros((flat.shape[0], nf, ntheta, nf), dtype=complex)
    for (j2, off, d), w in zip(block_layout(two_ell_max), _w_tables(two_ell_max, ntheta)):
        blk = flat[:, off : off + d * d].reshape(-1, d, d)
        rows = slice(two_ell_max - j2, two_ell_max + j2 + 1, 2)
        # H[n, t, m] += d_l w_nm(t) fhat_mn
        h[:, rows, :, rows] += (d * w.transpose(0, 2, 1))[None] * blk.transpose(0, 2, 1)[:, :, None, :]
    e_phi, e_psi = _exp_tables(grid, two_ell_max, +1)
    # two plain GEMMs: sum over m against e_psi, then over n against e_phi
    g = (h.reshape(-1, nf) @ e_psi).reshape(-1, nf, ntheta * npsi)
    out = (g.transpose(0, 2, 1).reshape(-1, nf) @ e_phi).reshape(-1, ntheta * npsi, nphi)
    return out.transpose(0, 2, 1).reshape(lead + (nphi, ntheta, npsi))


def su2_forward(samples: np.ndarray, grid: Su2Grid, two_ell_max: int) -> list[np.ndarray]:
    """Fourier blocks ``fhat(l) = int f(x) t^l(x)^* dx`` for ``2l = 0..two_ell_max``."""
    flat = su2_forward_flat(samples, grid, two_ell_max)
    return unflatten(flat, two_ell_max)


def su2_inverse(blocks, grid: Su2Grid | None = None) -> np.ndarray:
    """Samples of ``sum_l (2l+1) tr(t^l(x) fhat(l))`` on ``grid`` (default: band ``2*two_ell_max``)."""
    two_ell_max = len(blocks) - 1
    grid = su2_quadrature(2 * two_ell_max) if grid is None else grid
    return su2_inverse_flat(flatten(blocks), grid, two_ell_max)


def flatten(blocks) -> np.ndarray:
    return np.concatenate([np.asarray(b, dtype=complex).reshape(-1) for b in blocks])


def unflatten(flat: np.ndarray, two_ell_max: int) -> list[np.ndarray]:
    lead = flat.shape[:-1]
    return [flat[..., off : off + d * d].reshape(lead + (d, d)) for _, off, d in block_layout(two_ell_max)]
