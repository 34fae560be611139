"""Division solver for constant-coefficient operators on coefficient tables."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .product import DecayFit, FourierTable, decay_classify, plancherel_norm
from .symbols import OperatorSpec, apply_operator_spectral, symbol_value

__all__ = [
    "AdmissibilityReport",
    "NotAdmissible",
    "zero_mask",
    "check_admissible",
    "project_admissible",
    "solve_constant",
    "residual",
    "smoothness_of_solution",
]

DEFAULT_TOL = 1e-10


@dataclass(frozen=True)
class AdmissibilityReport:
    admissible: bool
    offending: tuple  # ((idx1, idx2), m, n, r, s, |f^|) with zero-based positions
    tol: float
    heuristic: bool = False

    def lines(self) -> list[str]:
        return [
            f"({k[0]}, {k[1]}) m={m} n={n} r={r} s={s} |f|={v:.17g}" for k, m, n, r, s, v in self.offending
        ]


class NotAdmissible(ValueError):
    """The right-hand side has content on symbol zeros."""

    def __init__(self, report: AdmissibilityReport):
        super().__init__(f"right-hand side is not admissible: {len(report.offending)} offending entries")
        self.report = report


def zero_mask(spec: OperatorSpec, key) -> tuple[np.ndarray, bool]:
    """Rows ``(m, r)`` of the block where the symbol vanishes, and whether any were float-detected."""
    f1, f2 = spec.group.factor1, spec.group.factor2
    lams, mus = f1.lam2(key[0]), f2.lam2(key[1])
    mask = np.zeros((len(lams), len(mus)), dtype=bool)
    heuristic = False
    for i, l2 in enumerate(lams):
        for j, m2 in enumerate(mus):
            g = symbol_value(l2, m2, spec.a, spec.q)
            if g.exact_zero:
                mask[i, j] = True
            elif g.singular:
                mask[i, j] = True
                heuristic = True
    return mask, heuristic


def check_admissible(f: FourierTable, spec: OperatorSpec, tol: float = DEFAULT_TOL) -> AdmissibilityReport:
    """Entries on the zero set exceeding ``tol * ||f||`` make ``f`` non-admissible."""
    norm = plancherel_norm(f)
    offending = []
    heuristic = False
    for key in f.keys():
        mask, h = zero_mask(spec, key)
        heuristic |= h
        if not mask.any():
            continue
        blk = f.blocks[key]
        for m, r in zip(*np.nonzero(mask)):
            vals = np.abs(blk[m, :, r, :])
            for n, s in zip(*np.nonzero(vals > tol * norm)):
                offending.append((key, int(m), int(n), int(r), int(s), float(vals[n, s])))
    return AdmissibilityReport(not offending, tuple(offending), tol, heuristic)


def project_admissible(f: FourierTable, spec: OperatorSpec) -> FourierTable:
    """Zero every entry sitting on a symbol zero."""

    def proj(key, blk):
        mask, _ = zero_mask(spec, key)
        return blk * (~mask)[:, None, :, None]

    return f.map_blocks(proj)


def solve_constant(spec: OperatorSpec, f: FourierTable, tol: float = DEFAULT_TOL) -> FourierTable:
    """Canonical solution ``u^ = -i (lambda + a mu - i q)^-1 f^``, zero on the zero set."""
    report = check_admissible(f, spec, tol)
    if not report.admissible:
        raise NotAdmissible(report)

    def divide(key, blk):
        mask, _ = zero_mask(spec, key)
        f1, f2 = spec.group.factor1, spec.group.factor2
        sym = np.ones(mask.shape, dtype=complex)
        for i, l2 in enumerate(f1.lam2(key[0])):
            for j, m2 in enumerate(f2.lam2(key[1])):
                if not mask[i, j]:
                    sym[i, j] = 1j * symbol_value(l2, m2, spec.a, spec.q).value
        inv = np.where(mask, 0.0, 1.0 / sym)
        return blk * inv[:, None, :, None]

    return f.map_blocks(divide)


def residual(spec: OperatorSpec, u: FourierTable, f: FourierTable) -> float:
    """Plancherel norm of ``L u - f``."""
    return plancherel_norm(apply_operator_spectral(spec, u) - f)


def smoothness_of_solution(spec: OperatorSpec, f: FourierTable) -> DecayFit:
    """Decay classification of the canonical solution of ``L u = f``."""
    return decay_classify(solve_constant(spec, f))
