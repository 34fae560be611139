"""Harmonic analysis on the circle T1 = R / 2*pi*Z under normalized Haar measure."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "CircleRep",
    "CircleGrid",
    "t1_char",
    "t1_weight",
    "t1_derivative_symbol",
    "t1_forward",
    "t1_inverse",
    "circle_nodes",
    "spectral_derivative",
]


@dataclass(frozen=True)
class CircleRep:
    k: int

    @property
    def dim(self) -> int:
        return 1

    @property
    def weight(self) -> float:
        return t1_weight(self.k)


def circle_nodes(n_points: int) -> np.ndarray:
    return 2.0 * np.pi * np.arange(n_points) / n_points


@dataclass(frozen=True)
class CircleGrid:
    """Samples of a function at the uniform nodes ``t_j = 2*pi*j/n``."""

    samples: np.ndarray

    @property
    def n_points(self) -> int:
        return self.samples.shape[-1]

    @property
    def nodes(self) -> np.ndarray:
        return circle_nodes(self.n_points)

    @classmethod
    def from_function(cls, func, n_points: int) -> "CircleGrid":
        return cls(np.asarray(func(circle_nodes(n_points)), dtype=complex))


def t1_char(k: int, t):
    """The character ``e_k(t) = exp(i*k*t)``."""
    return np.exp(1j * k * np.asarray(t, dtype=float))


def t1_weight(k) -> float:
    """``<k> = sqrt(1 + k**2)``, the eigenvalue of ``(I - Laplacian)**(1/2)``."""
    return float(np.sqrt(1.0 + float(k) ** 2))


def t1_derivative_symbol(k: int) -> complex:
    """Symbol of ``d/dt`` at ``e_k``: ``e_k(t)^* (d/dt e_k)(t) = i*k``."""
    return 1j * k


def t1_forward(grid: CircleGrid, K: int) -> np.ndarray:
    """Fourier coefficients ``f^(k)``, ``k = -K..K``, as an array of length ``2K+1``.

    Uses the uniform quadrature with weights ``1/n``; exact for trigonometric
    polynomials of degree ``<= n - 1 - K``.
    """
    n = grid.n_points
    if n < 2 * K + 1:
        raise ValueError(f"circle grid of {n} points cannot resolve K={K}; need at least {2 * K + 1}")
    spec = np.fft.fft(grid.samples, axis=-1) / n
    ks = np.arange(-K, K + 1)
    return spec[..., ks % n]


def t1_inverse(coeffs, n_points: int | None = None) -> CircleGrid:
    """Synthesize ``f(t) = sum_k f^(k) e^{ikt}`` on a uniform grid.

    ``coeffs`` is indexed ``k = -K..K``; the default grid has ``4K+1`` points.
    """
    coeffs = np.asarray(coeffs, dtype=complex)
    K = (coeffs.shape[-1] - 1) // 2
    n = 4 * K + 1 if n_points is None else n_points
    if n < 2 * K + 1:
        raise ValueError(f"{n} points cannot carry band limit K={K}")
    full = np.zeros(coeffs.shape[:-1] + (n,), dtype=complex)
    ks = np.arange(-K, K + 1)
    full[..., ks % n] = coeffs
    return CircleGrid(np.fft.ifft(full, axis=-1) * n)


def spectral_derivative(samples: np.ndarray, axis: int = -1) -> np.ndarray:
    """``d/dt`` of periodic samples on the uniform grid along ``axis``.

    Exact for trigonometric polynomials of degree ``< n/2``; the Nyquist mode
    of an even grid is dropped.
    """
    samples = np.asarray(samples, dtype=complex)
    n = samples.shape[axis]
    k = np.fft.fftfreq(n, d=1.0 / n)
    if n % 2 == 0:
        k[n // 2] = 0.0
    shape = [1] * samples.ndim
    shape[axis] = n
    spec = np.fft.fft(samples, axis=axis) * (1j * k).reshape(shape)
    return np.fft.ifft(spec, axis=axis)
