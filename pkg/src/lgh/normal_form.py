"""Reduction of ``X1 + a(x1) X2 + q`` to its constant-coefficient normal form.

Two conjugators are used:

* ``Psi_a`` multiplies the second-factor coefficient in row ``r`` by
  ``exp(i mu_r A(x1))`` where ``A' = a - a0`` and ``A`` has zero mean; then
  ``L_a0 Psi_a = Psi_a L_a``.
* ``exp(-Q)`` with ``(X1 + a X2) Q = q - q0`` gives
  ``L_{a q} exp(-Q) = exp(-Q) L_{a q0}``.

Together ``L_{a q} exp(-Q) Psi_-a = exp(-Q) Psi_-a L_{a0 q0}``, so the full
solve maps ``f`` to ``g = Psi_a(exp(Q) f)``, solves the constant operator by
division and maps back with ``u = exp(-Q) Psi_-a v``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .circle import spectral_derivative
from .product import (
    Factor,
    FactorGrid,
    FourierTable,
    GridFunction,
    PartialCoefficientField,
    ProductGroup,
    double_forward,
    double_inverse,
    forward_x1,
    inverse_x1,
    l2_norm,
    partial_forward_x2,
    partial_inverse_x2,
    plancherel_norm,
    resample,
)
from .scalars import FloatConst
from .solver import (
    AdmissibilityReport,
    NotAdmissible,
    check_admissible,
    project_admissible,
    solve_constant,
    zero_mask,
)
from .symbols import OperatorSpec, TrigPoly, apply_operator_grid, apply_operator_spectral

__all__ = [
    "ConjugatorBundle",
    "FullSolution",
    "build_conjugators",
    "psi_apply",
    "psi_band",
    "mu_max",
    "exp_conjugate",
    "conjugation_residual_psi",
    "conjugation_residual_exp",
    "verify_cohomology",
    "solve_full",
    "to_normal_coordinates",
    "deviation_off_zero_set",
    "manufactured_rhs",
]


@dataclass(frozen=True)
class ConjugatorBundle:
    a0: object
    q0: object
    A: Optional[TrigPoly] = None
    Q: Optional[GridFunction] = None

    @property
    def amp_A(self) -> float:
        """Upper bound for ``max |A|``."""
        return 0.0 if self.A is None else float(np.sum(np.abs(self.A.values)))


def _antiderivative(a: TrigPoly) -> TrigPoly:
    vals = a.values
    ks = np.arange(-a.K, a.K + 1)
    out = np.zeros_like(vals)
    nz = ks != 0
    out[nz] = vals[nz] / (1j * ks[nz])
    return TrigPoly.from_values(out, mean=FloatConst(0.0))


def _transport_potential(spec: OperatorSpec) -> GridFunction:
    """Solve ``(X1 + a X2) Q = q - q0`` by division for constant ``a``."""
    q = spec.q
    g = q.grid
    group = ProductGroup(Factor(g.g1.kind, g.g1.band), Factor(g.g2.kind, g.g2.band))
    rhs = double_forward(q - complex(spec.q_mean), group)
    transport = replace(spec, group=group, q=None, q0=None, A=None, Q=None)
    try:
        table = solve_constant(transport, rhs, tol=1e-9)
    except NotAdmissible as exc:
        raise ValueError("q - q0 has content on the zero set of X1 + a X2; no smooth Q exists") from exc
    return double_inverse(table, g)


def build_conjugators(spec: OperatorSpec) -> ConjugatorBundle:
    """Antiderivative ``A`` of ``a - a0`` and potential ``Q`` for ``q - q0``.

    ``Q`` is taken from the spec when given; for constant ``a`` it is otherwise
    obtained by division.
    """
    A = None
    if spec.variable_a:
        if spec.group.factor1.kind != "T1":
            raise ValueError("a variable coefficient a(x1) requires the first factor to be T1")
        if not spec.a.is_real():
            raise ValueError("a(t) must be real-valued")
        A = _antiderivative(spec.a)
    Q = None
    if spec.function_q:
        if spec.Q is not None:
            Q = spec.Q
        elif not spec.variable_a:
            Q = _transport_potential(spec)
        else:
            raise ValueError("variable a with a function q needs the potential Q in the spec")
    return ConjugatorBundle(spec.a0, spec.q_mean, A, Q)


def psi_band(bundle: ConjugatorBundle, K: int, mu_max: float) -> int:
    """First-factor grid band that resolves ``Psi_a`` applied to data of band ``K``.

    The multiplier ``exp(i mu A)`` has Fourier tails like Bessel functions
    ``J_n(mu max|A|)``, negligible once ``n`` exceeds the argument by ``BESSEL_PAD``.
    """
    K = max(K, 1)
    z = mu_max * bundle.amp_A
    over = max(4, math.ceil(2 * z / K))
    return max(over * K, K + math.ceil(2 * z) + BESSEL_PAD)


BESSEL_PAD = 24


def mu_max(factor2: Factor) -> float:
    """Largest ``|mu|`` over the rows of the second factor within truncation."""
    return max((abs(m) for i in factor2.reps() for m in factor2.lam2(i)), default=0) / 2.0


def _mu(field: PartialCoefficientField) -> np.ndarray:
    return field.mu2 / 2.0


def psi_apply(bundle: ConjugatorBundle, sign: int, field: PartialCoefficientField) -> PartialCoefficientField:
    """Multiply row ``r`` coefficients by ``exp(sign * i * mu_r * A(x1))``."""
    if bundle.A is None:
        return field
    t = field.grid1.coords()[0]
    phase = np.exp(sign * 1j * np.multiply.outer(bundle.A(t).real, _mu(field)))
    return PartialCoefficientField(field.grid1, field.factor2, field.data * phase)


def exp_conjugate(Q: Optional[GridFunction], sign: int, u: GridFunction) -> GridFunction:
    """``exp(sign * Q) u`` with ``Q`` moved to the grid of ``u``."""
    if Q is None:
        return u
    return u * np.exp(sign * resample(Q, u.grid).samples)


def _entry_dims(factor2: Factor) -> np.ndarray:
    out = np.zeros(factor2.size)
    for idx in factor2.reps():
        d, off = factor2.dim(idx), factor2.offsets[idx]
        out[off : off + d * d] = d
    return out


def _field_norm(grid1: FactorGrid, factor2: Factor, data: np.ndarray) -> float:
    w = grid1.weights.reshape(grid1.shape + (1,))
    return math.sqrt(float(np.sum(w * _entry_dims(factor2) * np.abs(data) ** 2)))


def conjugation_residual_psi(
    spec: OperatorSpec, u: FourierTable, bundle: ConjugatorBundle | None = None, oversample: int | None = None
) -> float:
    """``||L_a0(Psi_a u) - Psi_a(L_a u)||`` on an oversampled first-factor grid."""
    bundle = build_conjugators(spec) if bundle is None else bundle
    K = u.group.factor1.trunc
    band = psi_band(bundle, K, mu_max(u.group.factor2)) if oversample is None else oversample * max(K, 1)
    g1 = FactorGrid("T1", band)
    v = inverse_x1(u, g1)
    mu = _mu(v)
    t = g1.coords()[0]
    a_vals = spec.a(t).real if spec.variable_a else np.full(t.shape, complex(spec.a).real)
    a0 = complex(bundle.a0).real
    E = np.exp(1j * np.multiply.outer(bundle.A(t).real, mu)) if bundle.A is not None else 1.0
    La_v = spectral_derivative(v.data, axis=0) + 1j * mu * a_vals[:, None] * v.data
    w = E * v.data
    La0_w = spectral_derivative(w, axis=0) + 1j * mu * a0 * w
    return _field_norm(g1, u.group.factor2, La0_w - E * La_v)


def _work_grid(group: ProductGroup, margins: tuple[int, int]):
    K, B = group.truncs
    work = group.with_truncs(K + margins[0], B + margins[1])
    return work, work.grid(*work.truncs)


def conjugation_residual_exp(
    spec: OperatorSpec, u: FourierTable, bundle: ConjugatorBundle | None = None, margins=(16, 16)
) -> float:
    """``||L_{a q}(exp(-Q) u) - exp(-Q) L_{a q0} u||`` on a refined grid."""
    bundle = build_conjugators(spec) if bundle is None else bundle
    _, grid = _work_grid(u.group, margins)
    U = double_inverse(u, grid)
    EU = exp_conjugate(bundle.Q, -1, U)
    lhs = apply_operator_grid(spec, EU)
    reduced = replace(spec, q=bundle.q0, q0=None, A=None, Q=None)
    rhs = exp_conjugate(bundle.Q, -1, apply_operator_grid(reduced, U))
    return l2_norm(lhs - rhs)


def verify_cohomology(spec: OperatorSpec, bundle: ConjugatorBundle | None = None) -> dict[str, float]:
    """Residuals of ``A' = a - a0`` and ``(X1 + a X2) Q = q - q0``."""
    bundle = build_conjugators(spec) if bundle is None else bundle
    out = {}
    if bundle.A is not None:
        ks = np.arange(-spec.a.K, spec.a.K + 1)
        dA = 1j * ks * bundle.A.values
        target = spec.a.values.copy()
        target[spec.a.K] = 0.0
        out["A"] = float(np.linalg.norm(dA - target))
    if bundle.Q is not None:
        transport = replace(spec, q=None, q0=None, A=None, Q=None)
        Q = bundle.Q
        lhs = apply_operator_grid(transport, Q)
        rhs = resample(spec.q, Q.grid) - complex(bundle.q0)
        out["Q"] = l2_norm(lhs - rhs)
    return out


@dataclass
class FullSolution:
    u: GridFunction
    table: FourierTable
    residual: float
    relative_residual: float
    report: AdmissibilityReport
    normal_form: OperatorSpec
    removed: Optional[FourierTable] = None


def _to_table(f, group: ProductGroup) -> FourierTable:
    if isinstance(f, FourierTable):
        return f
    g = f.grid
    return double_forward(f, group.with_truncs(g.g1.band, g.g2.band))


def solve_full(
    spec: OperatorSpec,
    f,
    *,
    project: bool = False,
    margins: tuple[int, int] = (16, 16),
    tol: float = 1e-9,
) -> FullSolution:
    """Solve ``L u = f`` through the normal form.

    ``f`` is a coefficient table or a grid function (its grid band is taken
    as the truncation).  Content of the transformed right-hand side on the
    zero set of the normal form is rejected, or removed when ``project`` is
    set; ``removed`` then holds it in normal-form coordinates.
    """
    f_table = _to_table(f, spec.group)
    if spec.is_constant:
        cspec = spec.with_truncs(*f_table.group.truncs)
        report = check_admissible(f_table, cspec, tol)
        removed = None
        if not report.admissible:
            if not project:
                raise NotAdmissible(report)
            kept = project_admissible(f_table, cspec)
            removed, f_table = f_table - kept, kept
        v = solve_constant(cspec, f_table, tol)
        u = double_inverse(v)
        res = plancherel_norm(apply_operator_spectral(cspec, v) - f_table)
        scale = plancherel_norm(f_table)
        return FullSolution(u, v, res, res / scale if scale else res, report, cspec, removed)

    bundle = build_conjugators(spec)
    work, grid = _work_grid(f_table.group, margins)
    F = double_inverse(f_table, grid)
    g = to_normal_coordinates(bundle, F, work)

    normal = replace(spec.constant_part(), group=work)
    report = check_admissible(g, normal, tol)
    removed = None
    target = F
    if not report.admissible:
        if not project:
            raise NotAdmissible(report)
        kept = project_admissible(g, normal)
        removed, g = g - kept, kept
        target = _back(bundle, g, grid)
    v = solve_constant(normal, g, tol)
    U = _back(bundle, v, grid)
    diff = apply_operator_grid(spec, U) - target
    res = l2_norm(diff)
    scale = l2_norm(target)
    return FullSolution(U, double_forward(U, work), res, res / scale if scale else res, report, normal, removed)


def to_normal_coordinates(bundle: ConjugatorBundle, F: GridFunction, group: ProductGroup) -> FourierTable:
    """Coefficients of ``Psi_a exp(Q) F`` truncated to ``group``."""
    G = exp_conjugate(bundle.Q, +1, F)
    return forward_x1(psi_apply(bundle, +1, partial_forward_x2(G, group.factor2)), group.factor1)


def _back(bundle: ConjugatorBundle, table: FourierTable, grid) -> GridFunction:
    """``exp(-Q) Psi_-a`` applied to a normal-form table, synthesized on ``grid``."""
    field = psi_apply(bundle, -1, inverse_x1(table, grid.g1))
    return exp_conjugate(bundle.Q, -1, partial_inverse_x2(field, grid.g2))


def deviation_off_zero_set(spec: OperatorSpec, sol: FullSolution, u0: FourierTable) -> float:
    """Largest normal-form coefficient of ``u - u0`` away from the zero set.

    Solutions are unique only up to the kernel, which lives on the zero set
    of the normal form; everywhere else a recovered ``u`` must match ``u0``.
    """
    work = sol.table.group
    grid = sol.u.grid
    diff = to_normal_coordinates(build_conjugators(spec), sol.u - double_inverse(u0, grid), work)
    worst = 0.0
    for key, blk in diff.blocks.items():
        mask = zero_mask(sol.normal_form, key)[0][:, None, :, None]
        worst = max(worst, float(np.max(np.abs(np.where(mask, 0.0, blk)), initial=0.0)))
    return worst


def manufactured_rhs(spec: OperatorSpec, u0: FourierTable) -> FourierTable:
    """Exact coefficients of ``L u0`` for band-limited ``u0`` and band-limited ``a``, ``q``."""
    m1 = spec.a.K if spec.variable_a else 0
    m2 = 0
    if spec.function_q:
        m1 += spec.q.grid.g1.band
        m2 += spec.q.grid.g2.band
    K, B = u0.group.truncs
    work = u0.group.with_truncs(K + m1, B + m2)
    grid = work.grid(*work.truncs)
    f = apply_operator_grid(spec, double_inverse(u0, grid))
    return double_forward(f, work)
