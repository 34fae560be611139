"""Invariant suites run by ``lgh verify``; each returns per-check residuals."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import su2
from .fixtures import FIXTURES, build_spec
from .normal_form import build_conjugators, conjugation_residual_exp, conjugation_residual_psi
from .product import (
    Factor,
    ProductGroup,
    double_forward,
    double_inverse,
    l2_norm,
    plancherel_norm,
    random_table,
)
from .scalars import Rational, parse_scalar, symbol_form
from .symbols import apply_operator_grid, apply_operator_spectral

__all__ = ["Check", "SUITES", "run_suite"]


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.value <= self.tol

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.value:.3e} (tol {self.tol:.0e})"


PLANCHEREL_GROUPS = {
    "T2": ProductGroup(Factor("T1", 32), Factor("T1", 32)),
    "T1xS3": ProductGroup(Factor("T1", 32), Factor("SU2", 16)),
    "S3": ProductGroup(Factor("TRIVIAL", 0), Factor("SU2", 16)),
}


def plancherel_errors(group: ProductGroup, n: int, rng: np.random.Generator) -> list[float]:
    """Relative gap between the quadrature L2 norm and the Plancherel norm."""
    grid = group.grid(*group.truncs)  # band-P grids integrate |u|^2 of band P exactly
    out = []
    for _ in range(n):
        u = random_table(group, rng)
        coef = plancherel_norm(u)
        out.append(abs(l2_norm(double_inverse(u, grid)) - coef) / coef)
    return out


def suite_plancherel(n: int = 10, seed: int = 0) -> list[Check]:
    rng = np.random.default_rng(seed)
    return [
        Check(f"plancherel {name} (max over {n})", max(plancherel_errors(group, n, rng)), 1e-10)
        for name, group in PLANCHEREL_GROUPS.items()
    ]


def _gram_residual(two_ell_max: int) -> float:
    """Quadrature Gram matrix of ``sqrt(2l+1) t^l_mn`` against the identity."""
    grid = su2.Su2Grid(two_ell_max)
    phi, theta, psi = grid.phi, grid.theta, grid.psi
    cols = []
    for l in range(two_ell_max + 1):
        ms = np.arange(-l, l + 1, 2) / 2.0
        W = np.array([su2.rep_matrix(l, su2.EulerAngles(0.0, th, 0.0)) for th in theta])  # (nt, d, d)
        left = np.exp(1j * np.multiply.outer(phi, ms))  # (np, d)
        right = np.exp(1j * np.multiply.outer(psi, ms))  # (nq, d)
        V = np.einsum("am,tmn,bn->atbmn", left, W, right)
        cols.append(math.sqrt(l + 1) * V.reshape(V.shape[:3] + (-1,)))
    V = np.concatenate(cols, axis=-1).reshape(-1, sum((l + 1) ** 2 for l in range(two_ell_max + 1)))
    w = np.asarray(grid.weights).reshape(-1)
    G = (V.conj().T * w) @ V
    return float(np.max(np.abs(G - np.eye(G.shape[0]))))


def unitarity_checks(two_ell_max: int = 12, samples: int = 20, seed: int = 0) -> list[Check]:
    rng = np.random.default_rng(seed)
    unit = hom = fd = 0.0
    h = 1e-5
    for _ in range(samples):
        x, y = su2.random_euler(rng), su2.random_euler(rng)
        xy = su2.euler_from_matrix(su2.su2_matrix(x) @ su2.su2_matrix(y))
        for l in range(two_ell_max + 1):
            D = su2.rep_matrix(l, x)
            unit = max(unit, float(np.max(np.abs(D @ D.conj().T - np.eye(l + 1)))))
            hom = max(hom, float(np.max(np.abs(su2.rep_matrix(l, xy) - D @ su2.rep_matrix(l, y)))))
            plus = su2.rep_matrix(l, su2.EulerAngles(x.phi, x.theta, x.psi + h))
            minus = su2.rep_matrix(l, su2.EulerAngles(x.phi, x.theta, x.psi - h))
            num = (plus - minus) / (2 * h)
            ms = np.arange(-l, l + 1, 2) / 2.0
            fd = max(fd, float(np.max(np.abs(num - D * (1j * ms)[None, :]))))
    return [
        Check(f"unitarity (2l <= {two_ell_max})", unit, 1e-12),
        Check(f"homomorphism (2l <= {two_ell_max})", hom, 1e-10),
        Check(f"quadrature orthonormality (2l <= {two_ell_max})", _gram_residual(two_ell_max), 1e-12),
        Check("d/dpsi symbol vs finite differences", fd, 1e-7),
    ]


def suite_symbols(seed: int = 0) -> list[Check]:
    """Spectral action of constant operators against grid differentiation."""
    rng = np.random.default_rng(seed)
    out = []
    for case in FIXTURES:
        spec = build_spec(case, 6, 6)
        if not spec.is_constant:
            continue
        u = random_table(spec.group, rng)
        spectral = apply_operator_spectral(spec, u)
        grid = spec.group.grid(*spec.group.truncs)
        direct = double_forward(apply_operator_grid(spec, double_inverse(u, grid)), spec.group)
        out.append(Check(f"symbol {case.name}", plancherel_norm(spectral - direct) / plancherel_norm(u), 1e-12))
    return out


def conjugation_checks(n: int = 5, seed: int = 0) -> list[Check]:
    rng = np.random.default_rng(seed)
    out = []
    for case in FIXTURES:
        spec = build_spec(case)
        if spec.is_constant:
            continue
        bundle = build_conjugators(spec)
        small = spec.group.with_truncs(min(spec.group.factor1.trunc, 8), min(spec.group.factor2.trunc, 8))
        worst_psi = worst_exp = 0.0
        for _ in range(n):
            u = random_table(small, rng)
            norm = plancherel_norm(u)
            if spec.variable_a:
                worst_psi = max(worst_psi, conjugation_residual_psi(spec, u, bundle) / norm)
            if bundle.Q is not None:
                worst_exp = max(worst_exp, conjugation_residual_exp(spec, u, bundle) / norm)
        if spec.variable_a:
            out.append(Check(f"psi conjugation {case.name}", worst_psi, 1e-8))
        if bundle.Q is not None:
            out.append(Check(f"exp conjugation {case.name}", worst_exp, 1e-8))
    return out


def rational_gap_mismatches(a: Fraction, bound: int) -> int:
    """Exact gaps against naive big-rational evaluation over ``|lambda|, |mu| <= bound``."""
    kind = Rational(a)
    bad = 0
    for k in range(-bound, bound + 1):
        for l in range(-bound, bound + 1):
            g = symbol_form(2 * k, 2 * l, kind)
            naive = Fraction(k) + a * l
            if g.exact_zero != (naive == 0) or g.re.is_rational is False or g.re.alpha != naive:
                bad += 1
    return bad


def sqrt2_gap_mismatches(bound: int) -> int:
    """Gaps for ``a = sqrt(2)`` against ``|k + sqrt2 l| = |k^2 - 2 l^2| / |k - sqrt2 l|``.

    The float oracle takes whichever of the two forms is free of cancellation.
    """
    kind = parse_scalar("quadratic:0+1*sqrt(2)")
    r2 = math.sqrt(2.0)
    bad = 0
    for k in range(-bound, bound + 1):
        for l in range(-bound, bound + 1):
            g = symbol_form(2 * k, 2 * l, kind)
            if k == 0 and l == 0:
                bad += not g.exact_zero
                continue
            norm = abs(k * k - 2 * l * l)
            oracle = abs(k + r2 * l) if k * l >= 0 else norm / abs(k - r2 * l)
            conj_bound = Fraction(norm) / (abs(k) + 2 * abs(l))  # |k - sqrt2 l| < |k| + 2|l|
            if g.exact_zero or abs(g.magnitude - oracle) > 1e-12 * oracle or not (conj_bound <= g.lower):
                bad += 1
            elif float(g.lower) > oracle * (1 + 1e-12):
                bad += 1
    return bad


def oracle_gap_checks(bound_rational: int = 100, bound_sqrt2: int = 100) -> list[Check]:
    return [
        Check(f"rational 2/3 gaps, |lambda|,|mu| <= {bound_rational}",
              float(rational_gap_mismatches(Fraction(2, 3), bound_rational)), 0.0),
        Check(f"rational -5/7 gaps, |lambda|,|mu| <= {bound_rational}",
              float(rational_gap_mismatches(Fraction(-5, 7), bound_rational)), 0.0),
        Check(f"sqrt(2) gaps, |lambda|,|mu| <= {bound_sqrt2}", float(sqrt2_gap_mismatches(bound_sqrt2)), 0.0),
    ]


SUITES = {
    "plancherel": suite_plancherel,
    "unitarity": unitarity_checks,
    "symbols": suite_symbols,
    "conjugation": conjugation_checks,
    "oracle-gaps": oracle_gap_checks,
}


def run_suite(name: str) -> list[Check]:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    return SUITES[name]()
