"""Exact and certified scalar arithmetic for operator coefficients.

Every real exact constant lives in a quadratic field Q(sqrt(d)) and is carried
as a :class:`Surd` ``alpha + beta*sqrt(d)`` with rational ``alpha, beta``.
Rationals and Liouville truncations are the ``beta == 0`` case.  Floats are
kept apart on purpose: they never certify an exact zero.

Eigenvalue indices are passed *doubled* (``lam2 = 2*lambda``) so that SU(2)
half-integers never become floating point numbers.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial, isqrt
from typing import Union

__all__ = [
    "Surd",
    "Rational",
    "QuadraticIrrational",
    "LiouvilleTruncation",
    "FloatConst",
    "ComplexConst",
    "ScalarConstant",
    "GapValue",
    "parse_scalar",
    "as_complex_const",
    "gap",
    "symbol_form",
    "is_exact_zero",
    "liouville_value",
    "liouville_convergents",
    "continued_fraction",
    "convergents",
    "MAX_LIOUVILLE_DEPTH",
]

MAX_LIOUVILLE_DEPTH = 8
_SQRT_DIGITS = 60


@lru_cache(maxsize=256)
def _squarefree(d: int) -> bool:
    if d < 2:
        return False
    k = 2
    while k * k <= d:
        if d % (k * k) == 0:
            return False
        k += 1
    return True


def _sqrt_bounds(d: int, digits: int = _SQRT_DIGITS) -> tuple[Fraction, Fraction]:
    scale = 10**digits
    r = isqrt(d * scale * scale)
    return Fraction(r, scale), Fraction(r + 1, scale)


@dataclass(frozen=True)
class Surd:
    """Exact element ``alpha + beta*sqrt(d)`` of a real quadratic field.

    ``d == 0`` marks a plain rational (``beta`` is then 0).
    """

    alpha: Fraction
    beta: Fraction = Fraction(0)
    d: int = 0

    def __post_init__(self):
        if self.beta == 0 and self.d != 0:
            object.__setattr__(self, "d", 0)
        if self.beta != 0 and not _squarefree(self.d):
            raise ValueError(f"sqrt({self.d}) is not a squarefree radicand")

    @classmethod
    def of(cls, x) -> "Surd":
        if isinstance(x, Surd):
            return x
        return cls(Fraction(x))

    def _field(self, other: "Surd") -> int:
        if self.d and other.d and self.d != other.d:
            raise ValueError(f"mixed quadratic fields sqrt({self.d}) and sqrt({other.d})")
        return self.d or other.d

    def __add__(self, other):
        other = Surd.of(other)
        d = self._field(other)
        return Surd(self.alpha + other.alpha, self.beta + other.beta, d)

    __radd__ = __add__

    def __neg__(self):
        return Surd(-self.alpha, -self.beta, self.d)

    def __sub__(self, other):
        return self + (-Surd.of(other))

    def __rsub__(self, other):
        return Surd.of(other) - self

    def __mul__(self, other):
        other = Surd.of(other)
        d = self._field(other)
        return Surd(
            self.alpha * other.alpha + d * self.beta * other.beta,
            self.alpha * other.beta + self.beta * other.alpha,
            d,
        )

    __rmul__ = __mul__

    def norm(self) -> Fraction:
        """Field norm ``alpha**2 - d*beta**2`` (zero only for the zero element)."""
        return self.alpha * self.alpha - self.d * self.beta * self.beta

    def conjugate(self) -> "Surd":
        return Surd(self.alpha, -self.beta, self.d)

    def reciprocal(self) -> "Surd":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("reciprocal of zero")
        return Surd(self.alpha / n, -self.beta / n, self.d)

    def is_zero(self) -> bool:
        return self.alpha == 0 and self.beta == 0

    @property
    def is_rational(self) -> bool:
        return self.beta == 0

    def sign(self) -> int:
        a, b = self.alpha, self.beta
        if b == 0:
            return (a > 0) - (a < 0)
        if a == 0:
            return (b > 0) - (b < 0)
        if (a > 0) == (b > 0):
            return 1 if a > 0 else -1
        # opposite signs: compare a**2 with d*b**2
        if a * a > self.d * b * b:
            return 1 if a > 0 else -1
        return 1 if b > 0 else -1

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __float__(self) -> float:
        a, b = self.alpha, self.beta
        if b == 0:
            return float(a)
        root = math.sqrt(self.d)
        if a == 0 or (a > 0) == (b > 0):
            return float(a) + float(b) * root
        # cancellation-free form via the field norm
        return float(self.norm()) / (float(a) - float(b) * root)

    def interval(self, digits: int = _SQRT_DIGITS) -> tuple[Fraction, Fraction]:
        if self.beta == 0:
            return self.alpha, self.alpha
        lo_r, hi_r = _sqrt_bounds(self.d, digits)
        if self.beta > 0:
            return self.alpha + self.beta * lo_r, self.alpha + self.beta * hi_r
        return self.alpha + self.beta * hi_r, self.alpha + self.beta * lo_r

    def abs_lower_bound(self) -> Fraction:
        """Certified rational lower bound for ``|self|`` (0 only for zero)."""
        if self.is_zero():
            return Fraction(0)
        lo, hi = self.interval()
        if lo > 0:
            return lo
        if hi < 0:
            return -hi
        # the interval straddles 0: use |x| = |N| / |conj(x)|
        clo, chi = self.conjugate().interval()
        upper = max(abs(clo), abs(chi))
        return abs(self.norm()) / upper

    def floor(self) -> int:
        if self.beta == 0:
            return math.floor(self.alpha)
        digits = _SQRT_DIGITS
        while True:
            lo, hi = self.interval(digits)
            if math.floor(lo) == math.floor(hi):
                return math.floor(lo)
            digits *= 2

    def text(self) -> str:
        if self.beta == 0:
            return str(self.alpha)
        return f"{self.alpha}+{self.beta}*sqrt({self.d})"


Real = Union[Surd, float]


# ----------------------------------------------------------------- constants


@dataclass(frozen=True)
class Rational:
    value: Fraction

    exact = True

    def surd(self) -> Surd:
        return Surd(self.value)

    def real(self):
        return self

    def imag(self):
        return Rational(Fraction(0))

    def __complex__(self):
        return complex(float(self.value))

    def text(self) -> str:
        v = self.value
        return f"rational:{v.numerator}/{v.denominator}"


@dataclass(frozen=True)
class QuadraticIrrational:
    u: Fraction
    v: Fraction
    d: int

    exact = True

    def __post_init__(self):
        if self.v == 0:
            raise ValueError("quadratic irrational needs v != 0")
        if not _squarefree(self.d):
            raise ValueError(f"d={self.d} must be squarefree and >= 2")

    def surd(self) -> Surd:
        return Surd(self.u, self.v, self.d)

    def real(self):
        return self

    def imag(self):
        return Rational(Fraction(0))

    def __complex__(self):
        return complex(float(self.surd()))

    def text(self) -> str:
        return f"quadratic:{_frac_text(self.u)}{_signed(self.v)}*sqrt({self.d})"


@dataclass(frozen=True)
class LiouvilleTruncation:
    """Partial sum of the Liouville constant, ``sum_{j<=depth} 10**(-j!)``."""

    depth: int

    exact = True

    def __post_init__(self):
        if not 1 <= self.depth <= MAX_LIOUVILLE_DEPTH:
            raise ValueError(
                f"Liouville depth must lie in [1, {MAX_LIOUVILLE_DEPTH}], got {self.depth}"
            )

    @property
    def value(self) -> Fraction:
        return liouville_value(self.depth)

    def surd(self) -> Surd:
        return Surd(self.value)

    def real(self):
        return self

    def imag(self):
        return Rational(Fraction(0))

    def __complex__(self):
        return complex(float(self.value))

    def text(self) -> str:
        return f"liouville:{self.depth}"


@dataclass(frozen=True)
class FloatConst:
    value: float

    exact = False

    def surd(self):
        return None

    def real(self):
        return self

    def imag(self):
        return Rational(Fraction(0))

    def __complex__(self):
        return complex(self.value)

    def text(self) -> str:
        return f"float:{self.value!r}"


@dataclass(frozen=True)
class ComplexConst:
    """``re + i*im`` with real-kind components (exact when parsed from literals)."""

    re: object
    im: object

    @property
    def exact(self) -> bool:
        return self.re.exact and self.im.exact

    def surd(self):
        if _is_zero_kind(self.im):
            return self.re.surd()
        return None

    def real(self):
        return self.re

    def imag(self):
        return self.im

    def __complex__(self):
        return complex(complex(self.re).real, complex(self.im).real)

    def text(self) -> str:
        return f"complex:{_component_text(self.re)}{_signed_component(self.im)}*i"


ScalarConstant = Union[Rational, QuadraticIrrational, LiouvilleTruncation, FloatConst, ComplexConst]


def _is_zero_kind(c) -> bool:
    if isinstance(c, FloatConst):
        return c.value == 0.0
    return c.surd().is_zero()


def _frac_text(x: Fraction) -> str:
    return str(x)


def _signed(x: Fraction) -> str:
    return f"+{x}" if x >= 0 else f"-{-x}"


def _component_text(c) -> str:
    if isinstance(c, Rational):
        return str(c.value)
    if isinstance(c, FloatConst):
        return repr(c.value)
    raise ValueError(f"unsupported complex component {c!r}")


def _signed_component(c) -> str:
    s = _component_text(c)
    return s if s.startswith("-") else "+" + s


# ------------------------------------------------------------------ parsing

_UNUM = r"(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?(?:/\d+)?"
_NUM = r"[+-]?" + _UNUM
_QUAD_RE = re.compile(rf"^\s*({_NUM})\s*([+-])\s*({_UNUM})\s*\*\s*sqrt\(\s*(\d+)\s*\)\s*$")
_COMPLEX_RE = re.compile(rf"^\s*({_NUM})\s*([+-])\s*({_UNUM})\s*\*\s*i\s*$")


def _fraction(text: str) -> Fraction:
    return Fraction(text.strip())


def parse_scalar(text: str) -> ScalarConstant:
    """Parse ``rational:p/q``, ``quadratic:u+v*sqrt(d)``, ``liouville:J``,
    ``float:x`` or ``complex:re+im*i``.

    Complex components written as decimal or fraction literals are read
    exactly; ``0.5`` means 1/2, not the nearest double.
    """
    kind, sep, body = text.strip().partition(":")
    if not sep:
        raise ValueError(f"scalar {text!r} lacks a kind prefix")
    kind = kind.strip().lower()
    body = body.strip()
    if kind == "rational":
        return Rational(_fraction(body))
    if kind == "quadratic":
        m = _QUAD_RE.match(body)
        if not m:
            raise ValueError(f"bad quadratic irrational {body!r}")
        u = _fraction(m.group(1))
        v = _fraction(m.group(3))
        if m.group(2) == "-":
            v = -v
        d = int(m.group(4))
        if _is_square(d):
            return Rational(u + v * isqrt(d))
        return QuadraticIrrational(u, v, d)
    if kind == "liouville":
        return LiouvilleTruncation(int(body))
    if kind == "float":
        return FloatConst(float(body))
    if kind == "complex":
        m = _COMPLEX_RE.match(body)
        if not m:
            raise ValueError(f"bad complex constant {body!r}")
        re_part = Rational(_fraction(m.group(1)))
        im = _fraction(m.group(3))
        if m.group(2) == "-":
            im = -im
        return ComplexConst(re_part, Rational(im))
    raise ValueError(f"unknown scalar kind {kind!r}")


def _is_square(d: int) -> bool:
    return d >= 0 and isqrt(d) ** 2 == d


def as_complex_const(c) -> ComplexConst:
    if c is None:
        return ComplexConst(Rational(Fraction(0)), Rational(Fraction(0)))
    if isinstance(c, ComplexConst):
        return c
    return ComplexConst(c, Rational(Fraction(0)))


# --------------------------------------------------------------------- gaps


@dataclass(frozen=True)
class GapValue:
    """Value of ``lambda + a*mu - i*q`` at one eigenvalue pair.

    ``re``/``im`` hold the exact parts (a :class:`Surd`) or floats.  ``lower``
    is a certified lower bound of the modulus, ``exact_zero`` is set only by
    exact cancellation.
    """

    re: Real
    im: Real
    exact: bool
    exact_zero: bool
    lower: Union[Fraction, float]
    magnitude: float
    singular: bool = False

    @property
    def value(self) -> complex:
        return complex(float(self.re), float(self.im))


def _ulp_radius(*terms: float) -> float:
    scale = max((abs(t) for t in terms), default=0.0)
    return 4.0 * math.ulp(scale) if scale else 0.0


def _linear_part(lam: Fraction, coef, mu: Fraction, shift) -> tuple[Real, bool, float]:
    """``lam + coef*mu + shift`` for real-kind ``coef`` and ``shift``."""
    cs, ss = coef.surd(), shift.surd()
    if cs is not None and ss is not None:
        return Surd(lam) + cs * mu + ss, True, 0.0
    c = complex(coef).real
    s = complex(shift).real
    value = float(lam) + c * float(mu) + s
    return value, False, _ulp_radius(float(lam), c * float(mu), s, value)


def symbol_form(lam2: int, mu2: int, a, q=None) -> GapValue:
    """Evaluate ``lambda + a*mu - i*q`` with ``lambda = lam2/2``, ``mu = mu2/2``.

    Real part ``lambda + Re(a)*mu + Im(q)``, imaginary part ``Im(a)*mu - Re(q)``;
    each part is evaluated exactly when its ingredients are exact kinds.
    """
    if q is None and isinstance(a, (Rational, QuadraticIrrational)):
        return _real_symbol(lam2, mu2, a)
    a = as_complex_const(a)
    q = as_complex_const(q)
    lam = Fraction(lam2, 2)
    mu = Fraction(mu2, 2)
    re_part, re_exact, re_rad = _linear_part(lam, a.re, mu, q.im)
    minus_qr = _negate_kind(q.re)
    im_part, im_exact, im_rad = _linear_part(Fraction(0), a.im, mu, minus_qr)
    exact = re_exact and im_exact

    lowers = []
    zero_parts = []
    for part, part_exact, rad in ((re_part, re_exact, re_rad), (im_part, im_exact, im_rad)):
        if part_exact:
            lowers.append(part.abs_lower_bound())
            zero_parts.append(part.is_zero())
        else:
            lowers.append(max(0.0, abs(part) - rad))
            zero_parts.append(False)
    exact_zero = exact and all(zero_parts)
    if exact:
        lower = max(lowers)
    else:
        lower = max(float(x) for x in lowers)
    magnitude = math.hypot(float(re_part), float(im_part))
    singular = (not exact) and lower == 0.0
    return GapValue(re_part, im_part, exact, exact_zero, lower, magnitude, singular)


def _real_symbol(lam2: int, mu2: int, a) -> GapValue:
    """``lambda + a*mu`` for exact real ``a``, with a cheap certified lower bound."""
    zero = Surd(Fraction(0))
    if isinstance(a, Rational):
        x = Fraction(lam2, 2) + a.value * Fraction(mu2, 2)
        return GapValue(Surd(x), zero, True, x == 0, abs(x), abs(float(x)))
    mu = Fraction(mu2, 2)
    alpha, beta = Fraction(lam2, 2) + a.u * mu, a.v * mu
    x = Surd(alpha, beta, a.d)
    if beta == 0:
        return GapValue(x, zero, True, alpha == 0, abs(alpha), abs(float(alpha)))
    r = isqrt(a.d)  # r < sqrt(d) < r + 1
    if alpha == 0 or (alpha > 0) == (beta > 0):
        lower = abs(alpha) + abs(beta) * r
    else:
        # |alpha + beta sqrt d| = |norm| / (|alpha| + |beta| sqrt d)
        lower = abs(x.norm()) / (abs(alpha) + abs(beta) * (r + 1))
    return GapValue(x, zero, True, False, lower, abs(float(x)))


def _negate_kind(c):
    if isinstance(c, FloatConst):
        return FloatConst(-c.value)
    if isinstance(c, Rational):
        return Rational(-c.value)
    if isinstance(c, QuadraticIrrational):
        return QuadraticIrrational(-c.u, -c.v, c.d)
    if isinstance(c, LiouvilleTruncation):
        return Rational(-c.value)
    raise TypeError(c)


def gap(lam2: int, a, mu2: int) -> GapValue:
    """``|lambda + a*mu|`` for doubled eigenvalue indices (no perturbation)."""
    return symbol_form(lam2, mu2, a, None)


def is_exact_zero(g: GapValue) -> bool:
    return g.exact_zero


# ---------------------------------------------------------------- Liouville


def liouville_value(depth: int) -> Fraction:
    if not 1 <= depth <= MAX_LIOUVILLE_DEPTH:
        raise ValueError(f"Liouville depth must lie in [1, {MAX_LIOUVILLE_DEPTH}], got {depth}")
    return sum((Fraction(1, 10 ** factorial(j)) for j in range(1, depth + 1)), Fraction(0))


def liouville_convergents(depth: int) -> list[tuple[int, int]]:
    """Pairs ``(p_j, q_j)`` with ``q_j = 10**(j!)`` and ``p_j/q_j`` the j-th partial sum."""
    if depth > MAX_LIOUVILLE_DEPTH:
        raise ValueError(f"depth {depth} exceeds the denominator guard {MAX_LIOUVILLE_DEPTH}")
    if depth < 1:
        raise ValueError("depth must be >= 1")
    out = []
    for j in range(1, depth + 1):
        q = 10 ** factorial(j)
        p = sum(10 ** (factorial(j) - factorial(i)) for i in range(1, j + 1))
        out.append((p, q))
    return out


# ------------------------------------------------------- continued fractions


def continued_fraction(x: Surd, terms: int) -> list[int]:
    """Leading partial quotients of an exact real (stops early for rationals)."""
    x = Surd.of(x)
    out = []
    for _ in range(terms):
        a = x.floor()
        out.append(a)
        rest = x - a
        if rest.is_zero():
            break
        x = rest.reciprocal()
    return out


def convergents(x: Surd, terms: int) -> list[tuple[int, int]]:
    """Continued-fraction convergents ``(p_n, q_n)`` of ``x``."""
    p0, q0, p1, q1 = 1, 0, 0, 1
    out = []
    for a in continued_fraction(x, terms):
        p0, p1 = a * p0 + p1, p0
        q0, q1 = a * q0 + q1, q0
        out.append((p0, q0))
    return out
