"""Symbols of ``L = X1 + a X2 + q`` on product groups and the zero set of the symbol.

On the block of a rep pair the operator with constant ``a, q`` acts by
multiplying row ``(m, r)`` with ``i*(lambda_m + a*mu_r - i*q)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Optional, Union

import numpy as np

from .product import Factor, FourierTable, GridFunction, ProductGroup, resample
from .scalars import (
    ComplexConst,
    FloatConst,
    GapValue,
    LiouvilleTruncation,
    Rational,
    Surd,
    as_complex_const,
    parse_scalar,
    symbol_form,
)

__all__ = [
    "TrigPoly",
    "OperatorSpec",
    "SingularSetEntry",
    "SingularSet",
    "symbol_value",
    "full_symbol",
    "symbol_rows",
    "enumerate_singular_set",
    "zero_structure",
    "apply_operator_spectral",
    "apply_operator_grid",
]

FINITE_CERTIFIED = "finite-certified"
FINITE_IN_TRUNCATION = "finite-within-truncation"
INFINITE_PATTERN = "infinite-pattern-detected"


@dataclass(frozen=True)
class TrigPoly:
    """``sum_{k=-K..K} c_k e^{ikt}`` with coefficients stored as scalar kinds.

    Only the mean ``c_0`` needs to be exact for certified verdicts; the others
    are used numerically.
    """

    coeffs: tuple

    @property
    def K(self) -> int:
        return (len(self.coeffs) - 1) // 2

    @property
    def values(self) -> np.ndarray:
        return np.array([complex(c) for c in self.coeffs])

    @property
    def mean(self):
        return self.coeffs[self.K]

    def is_real(self, tol: float = 1e-14) -> bool:
        v = self.values
        return bool(np.allclose(v, np.conj(v[::-1]), rtol=0.0, atol=tol))

    def __call__(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        ks = np.arange(-self.K, self.K + 1)
        return np.tensordot(np.exp(1j * np.multiply.outer(t, ks)), self.values, axes=([-1], [0]))

    @classmethod
    def from_values(cls, values, mean=None) -> "TrigPoly":
        values = np.asarray(values, dtype=complex)
        K = (len(values) - 1) // 2
        coeffs = []
        for i, v in enumerate(values):
            if i == K and mean is not None:
                coeffs.append(mean)
            elif v.imag == 0:
                coeffs.append(FloatConst(float(v.real)))
            else:
                coeffs.append(ComplexConst(FloatConst(float(v.real)), FloatConst(float(v.imag))))
        return cls(tuple(coeffs))

    @classmethod
    def parse(cls, text: str) -> "TrigPoly":
        """Parse ``[c_-K, ..., c_K]``; entries are scalar literals or Python complex numbers."""
        body = text.strip()
        if not (body.startswith("[") and body.endswith("]")):
            raise ValueError(f"trig polynomial must be a bracketed list: {text!r}")
        items = [s.strip() for s in body[1:-1].split(",") if s.strip()]
        if len(items) % 2 != 1:
            raise ValueError("trig polynomial needs an odd number of coefficients (k = -K..K)")
        coeffs = []
        for item in items:
            if ":" in item:
                coeffs.append(parse_scalar(item))
            else:
                z = complex(item.replace(" ", ""))
                coeffs.append(
                    FloatConst(z.real) if z.imag == 0 else ComplexConst(FloatConst(z.real), FloatConst(z.imag))
                )
        return cls(tuple(coeffs))

    def text(self) -> str:
        return "[" + ", ".join(c.text() for c in self.coeffs) + "]"


Coefficient = Union[object, TrigPoly]


@dataclass(frozen=True)
class OperatorSpec:
    """``L = X1 + a(x1) X2 + q(x1, x2)`` on ``group``.

    ``a`` is a scalar kind or a :class:`TrigPoly` (first factor T1 only); ``q``
    is a scalar kind, a :class:`GridFunction` or None.  ``q0`` optionally gives
    the exact mean of a function ``q``; ``A`` and ``Q`` are antiderivatives.
    """

    group: ProductGroup
    a: Coefficient
    q: object = None
    q0: object = None
    A: Optional[TrigPoly] = None
    Q: Optional[GridFunction] = None
    name: str = ""

    def __post_init__(self):
        if isinstance(self.a, TrigPoly):
            if self.group.factor1.kind != "T1":
                raise ValueError("a variable coefficient a(x1) requires the first factor to be T1")
            if not self.a.is_real():
                raise ValueError("a(t) must be real-valued (conjugate-symmetric coefficients)")

    @property
    def variable_a(self) -> bool:
        return isinstance(self.a, TrigPoly)

    @property
    def function_q(self) -> bool:
        return isinstance(self.q, GridFunction)

    @property
    def is_constant(self) -> bool:
        return not (self.variable_a or self.function_q)

    @property
    def a0(self):
        return self.a.mean if self.variable_a else self.a

    @property
    def q_mean(self):
        """Exact mean of ``q`` when known, else the quadrature mean as a float kind."""
        if not self.function_q:
            return self.q
        if self.q0 is not None:
            return self.q0
        m = self.q.mean()
        return ComplexConst(FloatConst(m.real), FloatConst(m.imag))

    def constant_part(self) -> "OperatorSpec":
        """``L_{a0 q0}``, the normal form of this operator."""
        return replace(self, a=self.a0, q=self.q_mean, q0=None, A=None, Q=None)

    def with_truncs(self, t1: int, t2: int) -> "OperatorSpec":
        return replace(self, group=self.group.with_truncs(t1, t2))


# ----------------------------------------------------------------- symbols


@lru_cache(maxsize=1 << 20)
def symbol_value(lam2: int, mu2: int, a, q) -> GapValue:
    """Cached ``lambda + a*mu - i*q`` (the symbol divided by ``i``)."""
    return symbol_form(lam2, mu2, a, q)


def _require_constant(spec: OperatorSpec) -> None:
    if not spec.is_constant:
        raise ValueError("variable-coefficient operator: use the normal form machinery")


def full_symbol(spec: OperatorSpec, lam2: int, mu2: int) -> complex:
    """``i*(lambda + a*mu - i*q)``; exact zeros are returned as exactly 0."""
    _require_constant(spec)
    g = symbol_value(lam2, mu2, spec.a, spec.q)
    return 0j if g.exact_zero else 1j * g.value


def symbol_rows(spec: OperatorSpec, key) -> tuple[np.ndarray, np.ndarray]:
    """Symbol over the rows ``(m, r)`` of a block and the exact-zero mask."""
    f1, f2 = spec.group.factor1, spec.group.factor2
    lams, mus = f1.lam2(key[0]), f2.lam2(key[1])
    sym = np.zeros((len(lams), len(mus)), dtype=complex)
    zero = np.zeros((len(lams), len(mus)), dtype=bool)
    for i, l2 in enumerate(lams):
        for j, m2 in enumerate(mus):
            g = symbol_value(l2, m2, spec.a, spec.q)
            if g.exact_zero:
                zero[i, j] = True
            else:
                sym[i, j] = 1j * g.value
    return sym, zero


def apply_operator_spectral(spec: OperatorSpec, u: FourierTable) -> FourierTable:
    """``(Lu)^ = i(lambda_m + a mu_r - i q) u^`` blockwise; symbol zeros give exact 0."""
    _require_constant(spec)
    if u.group.factor1.kind != spec.group.factor1.kind or u.group.factor2.kind != spec.group.factor2.kind:
        raise ValueError("table and operator live on different groups")

    def act(key, blk):
        sym, _ = symbol_rows(spec, key)
        return blk * sym[:, None, :, None]

    return u.map_blocks(act)


def apply_operator_grid(spec: OperatorSpec, u: GridFunction) -> GridFunction:
    """``X1 u + a(x1) X2 u + q u`` computed on the grid by spectral differentiation."""
    out = u.d1()
    d2 = u.d2()
    if spec.variable_a:
        t = u.grid.g1.coords()[0]
        a_vals = spec.a(t).reshape((-1,) + (1,) * u.grid.g2.ndim)
        out = out + d2 * a_vals
    else:
        out = out + d2 * complex(spec.a)
    if spec.function_q:
        out = out + resample(spec.q, u.grid) * u
    elif spec.q is not None:
        out = out + u * complex(spec.q)
    return out


# ------------------------------------------------------------- singular set


@dataclass(frozen=True)
class SingularSetEntry:
    idx1: int
    idx2: int
    row1: int  # zero-based position of m in the first factor's block
    row2: int
    lam2: int
    mu2: int
    gap: GapValue

    @property
    def key(self) -> tuple[int, int]:
        return (self.idx1, self.idx2)


@dataclass(frozen=True)
class SingularSet:
    entries: tuple
    finiteness: str
    heuristic: bool = False
    notes: tuple = ()

    @property
    def keys(self) -> list[tuple[int, int]]:
        return sorted({e.key for e in self.entries})

    def mask(self, group: ProductGroup, key) -> np.ndarray:
        d1, _, d2, _ = group.block_shape(key)
        out = np.zeros((d1, d2), dtype=bool)
        for e in self.entries:
            if e.key == key:
                out[e.row1, e.row2] = True
        return out


def _factor_lam2_values(f: Factor) -> list[int]:
    if f.kind == "T1":
        return [2 * k for k in f.reps()]
    if f.kind == "SU2":
        return list(range(-f.trunc, f.trunc + 1))
    return [0]


def enumerate_singular_set(spec: OperatorSpec) -> SingularSet:
    """All symbol zeros inside the truncation plus the finiteness verdict of the zero set."""
    _require_constant(spec)
    f1, f2 = spec.group.factor1, spec.group.factor2
    a, q = spec.a, spec.q
    exact = as_complex_const(a).exact and as_complex_const(q).exact
    entries = []
    for l2 in _factor_lam2_values(f1):
        for m2 in _factor_lam2_values(f2):
            g = symbol_value(l2, m2, a, q)
            if not (g.exact_zero or g.singular):
                continue
            for i1 in f1.eigen_reps(l2):
                for i2 in f2.eigen_reps(m2):
                    entries.append(
                        SingularSetEntry(i1, i2, f1.lam2(i1).index(l2), f2.lam2(i2).index(m2), l2, m2, g)
                    )
    entries.sort(key=lambda e: (e.idx1, e.idx2, e.row1, e.row2))
    flag, notes = zero_structure(spec)
    return SingularSet(tuple(entries), flag, heuristic=not exact, notes=tuple(notes))


# ----------------------------------------------- exact structure of the zero set


def _step(f: Factor) -> Optional[int]:
    """Eigenvalues of the factor are ``Z / step``; None for the trivial factor."""
    return {"T1": 1, "SU2": 2}.get(f.kind)


def _on_lattice(x: Surd, f: Factor) -> bool:
    if not x.is_rational:
        return False
    s = _step(f)
    if s is None:
        return x.alpha == 0
    return (x.alpha * s).denominator == 1


def _point_verdict(lam: Surd, mu: Surd, f1: Factor, f2: Factor) -> tuple[str, str]:
    if not (_on_lattice(lam, f1) and _on_lattice(mu, f2)):
        return FINITE_CERTIFIED, "the eigenvalue equations have no lattice solution: the zero set is empty"
    where = f"lambda={lam.text()}, mu={mu.text()}"
    su2_side = [f.kind for f in (f1, f2) if f.kind == "SU2"]
    if su2_side:
        return (
            INFINITE_PATTERN,
            f"single eigenvalue solution {where}; an SU(2) factor repeats that eigenvalue in infinitely many representations",
        )
    return FINITE_CERTIFIED, f"single eigenvalue solution {where}"


def zero_structure(spec: OperatorSpec) -> tuple[str, list[str]]:
    """Decide finiteness of the zero set of ``lambda + a mu - i q`` over the whole dual.

    Covers exact kinds in the catalogue: Im(a) != 0; real part equations with
    rational data (lattice lines); quadratic irrational data (at most one
    eigenvalue solution).  Anything else is reported as finite within the
    truncation only.
    """
    a, q = as_complex_const(spec.a), as_complex_const(spec.q)
    f1, f2 = spec.group.factor1, spec.group.factor2
    if not (a.exact and q.exact):
        return FINITE_IN_TRUNCATION, ["floating-point coefficients: zero detection is heuristic"]
    if any(isinstance(c, LiouvilleTruncation) for c in (a.re, a.im, q.re, q.im)):
        return FINITE_IN_TRUNCATION, [
            "Liouville truncation stands for its irrational limit; its zero set is not decided by exact arithmetic"
        ]
    try:
        ar, ai, qr, qi = (c.surd() for c in (a.re, a.im, q.re, q.im))
        if not ai.is_zero():
            mu = qr * ai.reciprocal()
            lam = Surd(Fraction(0)) - ar * mu - qi
            return _point_verdict(lam, mu, f1, f2)[0], [
                "Im(a) != 0 pins mu = Re(q)/Im(a) and then lambda",
                _point_verdict(lam, mu, f1, f2)[1],
            ]
        if not qr.is_zero():
            return FINITE_CERTIFIED, ["Im(symbol) = -Re(q) != 0 everywhere: the zero set is empty"]
        # real equation lambda + ar*mu + qi = 0
        zero = Surd(Fraction(0))
        if f2.kind == "TRIVIAL":
            v = _point_verdict(zero - qi, zero, f1, f2)
            return v[0], [v[1]]
        if f1.kind == "TRIVIAL":
            if ar.is_zero():
                if qi.is_zero():
                    return INFINITE_PATTERN, ["symbol vanishes identically on the trivial first factor"]
                return FINITE_CERTIFIED, ["constant nonzero symbol: the zero set is empty"]
            mu = (zero - qi) * ar.reciprocal()
            v = _point_verdict(zero, mu, f1, f2)
            return v[0], [v[1]]
        if ar.is_rational and qi.is_rational:
            return _rational_line(ar.alpha, qi.alpha, f1, f2)
        if not ar.is_rational:
            # irrational part v*mu + beta = 0 fixes mu, then lambda
            if qi.d not in (0, ar.d):
                raise ValueError("mixed quadratic fields")
            mu = Surd(-qi.beta / ar.beta)
            lam = zero - ar * mu - qi
            v = _point_verdict(lam, mu, f1, f2)
            return v[0], ["quadratic irrational a: at most one eigenvalue solution", v[1]]
    except ValueError as exc:
        return FINITE_IN_TRUNCATION, [f"outside the exact catalogue ({exc})"]
    return FINITE_IN_TRUNCATION, ["outside the exact catalogue"]


def _rational_line(ar: Fraction, qi: Fraction, f1: Factor, f2: Factor) -> tuple[str, list[str]]:
    # lambda = x/s1, mu = y/s2: x*s2*r*v + y*s1*p*v + u*s1*s2*r = 0
    s1, s2 = _step(f1), _step(f2)
    p, r = ar.numerator, ar.denominator
    u, v = qi.numerator, qi.denominator
    cx, cy, c0 = s2 * r * v, s1 * p * v, u * s1 * s2 * r
    g = gcd(cx, cy)
    if c0 % g:
        return FINITE_CERTIFIED, ["rational data: the lattice line has no integer points, zero set empty"]
    return INFINITE_PATTERN, [
        f"rational a = {ar}: zeros fill the lattice line lambda + ({ar})*mu + ({qi}) = 0"
    ]
