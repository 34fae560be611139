"""Fourier analysis on a product G1 x G2 of circle / SU(2) factors.

A factor is ``T1`` (reps ``k``), ``SU2`` (reps ``two_ell``) or ``TRIVIAL`` (a
single point, used to treat one group as a product with a trivial first factor).

Coefficient tables are sparse maps from rep pairs ``(idx1, idx2)`` to blocks of
shape ``(d1, d1, d2, d2)`` holding ``u^(xi, eta)_{mn, rs}``; row ``m`` (``r``)
carries the eigenvalue of the distinguished vector field on the first (second)
factor.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import circle, su2

__all__ = [
    "Factor",
    "FactorGrid",
    "ProductGroup",
    "ProductGrid",
    "FourierTable",
    "GridFunction",
    "PartialCoefficientField",
    "DecayFit",
    "double_forward",
    "double_inverse",
    "partial_forward_x2",
    "partial_inverse_x2",
    "forward_x1",
    "inverse_x1",
    "plancherel_norm",
    "l2_norm",
    "decay_classify",
    "random_table",
    "resample",
    "shell_index",
]

KINDS = ("T1", "SU2", "TRIVIAL")

# Relative level below which table entries count as transform noise.
NOISE_FLOOR = 1e-12


@dataclass(frozen=True)
class Factor:
    kind: str
    trunc: int

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown factor kind {self.kind!r}")
        if self.trunc < 0:
            raise ValueError("truncation must be nonnegative")
        if self.kind == "TRIVIAL" and self.trunc != 0:
            raise ValueError("the trivial factor has truncation 0")

    def with_trunc(self, trunc: int) -> "Factor":
        return Factor(self.kind, 0 if self.kind == "TRIVIAL" else trunc)

    def reps(self) -> range:
        if self.kind == "T1":
            return range(-self.trunc, self.trunc + 1)
        if self.kind == "SU2":
            return range(0, self.trunc + 1)
        return range(0, 1)

    def contains(self, idx: int) -> bool:
        if self.kind == "T1":
            return abs(idx) <= self.trunc
        if self.kind == "SU2":
            return 0 <= idx <= self.trunc
        return idx == 0

    def at_edge(self, idx: int) -> bool:
        if self.kind == "T1":
            return abs(idx) == self.trunc and self.trunc > 0
        if self.kind == "SU2":
            return idx == self.trunc and self.trunc > 0
        return False

    def dim(self, idx: int) -> int:
        return idx + 1 if self.kind == "SU2" else 1

    def weight(self, idx: int) -> float:
        if self.kind == "T1":
            return circle.t1_weight(idx)
        if self.kind == "SU2":
            return su2.su2_weight(idx)
        return 1.0

    def labels(self, idx: int) -> np.ndarray:
        """Doubled row labels ``two_m`` as written to coefficient files."""
        if self.kind == "SU2":
            return np.arange(-idx, idx + 1, 2)
        return np.zeros(1, dtype=int)

    def lam2(self, idx: int) -> list[int]:
        """Doubled eigenvalues of the distinguished field, one per row."""
        if self.kind == "T1":
            return [2 * idx]
        if self.kind == "SU2":
            return list(range(-idx, idx + 1, 2))
        return [0]

    def eigen_reps(self, lam2: int) -> list[int]:
        """Reps within truncation having ``lam2`` as an eigenvalue."""
        if self.kind == "T1":
            return [lam2 // 2] if lam2 % 2 == 0 and abs(lam2 // 2) <= self.trunc else []
        if self.kind == "SU2":
            return list(range(abs(lam2), self.trunc + 1, 2))
        return [0] if lam2 == 0 else []

    @cached_property
    def offsets(self) -> dict[int, int]:
        out, off = {}, 0
        for idx in self.reps():
            out[idx] = off
            off += self.dim(idx) ** 2
        return out

    @property
    def size(self) -> int:
        return sum(self.dim(i) ** 2 for i in self.reps())

    def grid(self, band: int | None = None) -> "FactorGrid":
        return FactorGrid(self.kind, 0 if self.kind == "TRIVIAL" else (self.trunc if band is None else band))


@dataclass(frozen=True)
class FactorGrid:
    """Quadrature grid of one factor resolving functions of band ``band``.

    T1: ``2*band+1`` uniform nodes.  SU2: see :class:`lgh.su2.Su2Grid`.
    TRIVIAL: one node.
    """

    kind: str
    band: int

    @cached_property
    def _su2(self) -> su2.Su2Grid:
        return su2.Su2Grid(self.band)

    @property
    def shape(self) -> tuple[int, ...]:
        if self.kind == "T1":
            return (2 * self.band + 1,)
        if self.kind == "SU2":
            return self._su2.shape
        return (1,)

    @property
    def ndim(self) -> int:
        return len(self.shape)

    @property
    def weights(self) -> np.ndarray:
        if self.kind == "T1":
            n = self.shape[0]
            return np.full(n, 1.0 / n)
        if self.kind == "SU2":
            return np.asarray(self._su2.weights)
        return np.ones(1)

    def coords(self) -> tuple[np.ndarray, ...]:
        """Node coordinates as broadcastable arrays over this factor's axes."""
        if self.kind == "T1":
            return (circle.circle_nodes(self.shape[0]),)
        if self.kind == "SU2":
            return self._su2.mesh()
        return ()

    def forward(self, samples: np.ndarray, factor: Factor) -> np.ndarray:
        """Transform over the trailing grid axes into the flattened block vector."""
        self._check(factor)
        if self.kind == "T1":
            return circle.t1_forward(circle.CircleGrid(samples), factor.trunc)
        if self.kind == "SU2":
            return su2.su2_forward_flat(samples, self._su2, factor.trunc)
        return np.asarray(samples, dtype=complex)

    def inverse(self, coeffs: np.ndarray, factor: Factor) -> np.ndarray:
        self._check(factor)
        if self.kind == "T1":
            return circle.t1_inverse(coeffs, self.shape[0]).samples
        if self.kind == "SU2":
            return su2.su2_inverse_flat(coeffs, self._su2, factor.trunc)
        return np.asarray(coeffs, dtype=complex)

    def derivative(self, samples: np.ndarray, first_axis: int) -> np.ndarray:
        """Distinguished field (``d/dt`` or ``d/dpsi``) on axes starting at ``first_axis``."""
        if self.kind == "T1":
            return circle.spectral_derivative(samples, axis=first_axis)
        if self.kind == "SU2":
            # psi is 4*pi-periodic: rescale the 2*pi-periodic derivative
            return 0.5 * circle.spectral_derivative(samples, axis=first_axis + 2)
        return np.zeros_like(np.asarray(samples, dtype=complex))

    def _check(self, factor: Factor) -> None:
        if factor.kind != self.kind:
            raise ValueError(f"grid of kind {self.kind} used for factor {factor.kind}")
        if self.kind != "TRIVIAL" and self.band < factor.trunc:
            need = 2 * factor.trunc + 1 if self.kind == "T1" else factor.trunc
            raise ValueError(
                f"{self.kind} grid of band {self.band} cannot resolve truncation {factor.trunc} "
                f"(need band >= {factor.trunc}, i.e. {need} {'points' if self.kind == 'T1' else 'as band'})"
            )


# beyond this |k| the weight sqrt(1 + k^2) is |k| to within float resolution
_EXACT_WEIGHT = 1 << 26


def shell_index(f1: Factor, i1: int, f2: Factor, i2: int) -> int:
    """``round(<xi> + <eta>)``, exact for circle indices too large for floats."""
    whole, frac = 0, 0.0
    for f, i in ((f1, i1), (f2, i2)):
        if f.kind == "T1" and abs(i) > _EXACT_WEIGHT:
            whole += abs(i)
        else:
            frac += f.weight(i)
    return whole + int(round(frac))


@dataclass(frozen=True)
class ProductGroup:
    factor1: Factor
    factor2: Factor

    @property
    def truncs(self) -> tuple[int, int]:
        return (self.factor1.trunc, self.factor2.trunc)

    def with_truncs(self, t1: int, t2: int) -> "ProductGroup":
        return ProductGroup(self.factor1.with_trunc(t1), self.factor2.with_trunc(t2))

    def rep_pairs(self):
        for i1 in self.factor1.reps():
            for i2 in self.factor2.reps():
                yield (i1, i2)

    def block_shape(self, key) -> tuple[int, int, int, int]:
        d1, d2 = self.factor1.dim(key[0]), self.factor2.dim(key[1])
        return (d1, d1, d2, d2)

    def shell(self, key) -> int:
        return shell_index(self.factor1, key[0], self.factor2, key[1])

    def grid(self, band1: int | None = None, band2: int | None = None) -> "ProductGrid":
        return ProductGrid(self.factor1.grid(band1), self.factor2.grid(band2))

    def default_grid(self) -> "ProductGrid":
        """Grid twice as fine as the truncation, so products of two table functions are exact."""
        return self.grid(2 * self.factor1.trunc, 2 * self.factor2.trunc)


@dataclass(frozen=True)
class ProductGrid:
    g1: FactorGrid
    g2: FactorGrid

    @property
    def shape(self) -> tuple[int, ...]:
        return self.g1.shape + self.g2.shape

    @property
    def weights(self) -> np.ndarray:
        return np.multiply.outer(self.g1.weights, self.g2.weights)

    def coords(self) -> tuple[np.ndarray, ...]:
        """Coordinates ``(x1 coords..., x2 coords...)`` broadcast over the full grid."""
        n1, n2 = self.g1.ndim, self.g2.ndim
        c1 = [c.reshape(c.shape + (1,) * n2) for c in self.g1.coords()]
        c2 = [c.reshape((1,) * n1 + c.shape) for c in self.g2.coords()]
        return tuple(c1 + c2)

    def sample(self, func) -> "GridFunction":
        values = np.asarray(func(*self.coords()), dtype=complex)
        return GridFunction(self, np.broadcast_to(values, self.shape).copy())

    def constant(self, value: complex) -> "GridFunction":
        return GridFunction(self, np.full(self.shape, value, dtype=complex))


@dataclass(frozen=True)
class GridFunction:
    grid: ProductGrid
    samples: np.ndarray

    def __post_init__(self):
        if self.samples.shape != self.grid.shape:
            raise ValueError(f"samples of shape {self.samples.shape} do not match grid {self.grid.shape}")

    def _new(self, samples) -> "GridFunction":
        return GridFunction(self.grid, np.asarray(samples, dtype=complex))

    def __add__(self, other):
        return self._new(self.samples + _samples(other))

    def __sub__(self, other):
        return self._new(self.samples - _samples(other))

    def __mul__(self, other):
        return self._new(self.samples * _samples(other))

    __rmul__ = __mul__

    def d1(self) -> "GridFunction":
        """Distinguished field of the first factor."""
        return self._new(self.grid.g1.derivative(self.samples, 0))

    def d2(self) -> "GridFunction":
        """Distinguished field of the second factor."""
        return self._new(self.grid.g2.derivative(self.samples, self.grid.g1.ndim))

    def mean(self) -> complex:
        return complex(np.sum(self.grid.weights * self.samples))

    def conj(self) -> "GridFunction":
        return self._new(np.conj(self.samples))


def _samples(x):
    return x.samples if isinstance(x, GridFunction) else x


@dataclass(frozen=True)
class PartialCoefficientField:
    """Hybrid data: samples on the first-factor grid, coefficients in the second."""

    grid1: FactorGrid
    factor2: Factor
    data: np.ndarray  # shape grid1.shape + (factor2.size,)

    def block(self, node: tuple, idx2: int) -> np.ndarray:
        d = self.factor2.dim(idx2)
        off = self.factor2.offsets[idx2]
        return self.data[node + (slice(off, off + d * d),)].reshape(d, d)

    @cached_property
    def mu2(self) -> np.ndarray:
        """Doubled row eigenvalue of the second factor for every flattened entry."""
        out = np.zeros(self.factor2.size, dtype=int)
        for idx in self.factor2.reps():
            d, off = self.factor2.dim(idx), self.factor2.offsets[idx]
            out[off : off + d * d] = np.repeat(self.factor2.lam2(idx), d)
        return out


@dataclass
class FourierTable:
    group: ProductGroup
    blocks: dict = field(default_factory=dict)

    # ----------------------------------------------------------- construction
    @classmethod
    def zeros(cls, group: ProductGroup) -> "FourierTable":
        return cls(group, {})

    @classmethod
    def from_dense(cls, group: ProductGroup, data: np.ndarray, keep_zero: bool = False) -> "FourierTable":
        f1, f2 = group.factor1, group.factor2
        if data.shape != (f1.size, f2.size):
            raise ValueError(f"dense data shape {data.shape} does not match {(f1.size, f2.size)}")
        blocks = {}
        for i1 in f1.reps():
            d1, o1 = f1.dim(i1), f1.offsets[i1]
            rows = data[o1 : o1 + d1 * d1]
            for i2 in f2.reps():
                d2, o2 = f2.dim(i2), f2.offsets[i2]
                blk = rows[:, o2 : o2 + d2 * d2]
                if keep_zero or np.any(blk != 0):
                    blocks[(i1, i2)] = blk.reshape(d1, d1, d2, d2).copy()
        return cls(group, blocks)

    def to_dense(self) -> np.ndarray:
        f1, f2 = self.group.factor1, self.group.factor2
        out = np.zeros((f1.size, f2.size), dtype=complex)
        for (i1, i2), blk in self.blocks.items():
            d1, d2 = f1.dim(i1), f2.dim(i2)
            o1, o2 = f1.offsets[i1], f2.offsets[i2]
            out[o1 : o1 + d1 * d1, o2 : o2 + d2 * d2] = blk.reshape(d1 * d1, d2 * d2)
        return out

    def set_entry(self, key, m: int, n: int, r: int, s: int, value: complex) -> None:
        """Set ``u^(key)_{mn,rs}`` with zero-based row/column positions."""
        self._check_key(key)
        blk = self.blocks.get(key)
        if blk is None:
            blk = self.blocks[key] = np.zeros(self.group.block_shape(key), dtype=complex)
        blk[m, n, r, s] = value

    def _check_key(self, key) -> None:
        if not (self.group.factor1.contains(key[0]) and self.group.factor2.contains(key[1])):
            raise ValueError(f"rep pair {key} lies outside the truncation {self.group.truncs}")

    # ------------------------------------------------------------ arithmetic
    def copy(self) -> "FourierTable":
        return FourierTable(self.group, {k: v.copy() for k, v in self.blocks.items()})

    def map_blocks(self, fn) -> "FourierTable":
        return FourierTable(self.group, {k: fn(k, v) for k, v in self.blocks.items()})

    def _combine(self, other: "FourierTable", op) -> "FourierTable":
        if other.group != self.group:
            raise ValueError("tables live on different truncations")
        keys = set(self.blocks) | set(other.blocks)
        out = {}
        for k in keys:
            zero = np.zeros(self.group.block_shape(k), dtype=complex)
            out[k] = op(self.blocks.get(k, zero), other.blocks.get(k, zero))
        return FourierTable(self.group, out)

    def __add__(self, other):
        return self._combine(other, np.add)

    def __sub__(self, other):
        return self._combine(other, np.subtract)

    def __mul__(self, c):
        return self.map_blocks(lambda _, b: b * c)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1

    # ---------------------------------------------------------------- views
    def keys(self):
        return sorted(self.blocks)

    def nonzero_keys(self):
        return [k for k in self.keys() if np.any(self.blocks[k] != 0)]

    def block_norm(self, key) -> float:
        blk = self.blocks.get(key)
        return 0.0 if blk is None else float(np.linalg.norm(blk.reshape(-1)))

    def is_exactly_zero(self) -> bool:
        return all(not np.any(b) for b in self.blocks.values())

    def max_abs(self) -> float:
        return max((float(np.max(np.abs(b))) for b in self.blocks.values() if b.size), default=0.0)

    def restrict(self, predicate) -> "FourierTable":
        """Keep entries where ``predicate(key)`` returns a boolean mask of shape ``(d1, d2)`` over rows."""
        out = {}
        for k, blk in self.blocks.items():
            mask = np.asarray(predicate(k), dtype=bool)
            out[k] = blk * mask[:, None, :, None]
        return FourierTable(self.group, out)


def plancherel_norm(table: FourierTable) -> float:
    """``sqrt(sum d_xi d_eta ||u^(xi, eta)||_HS^2)``."""
    f1, f2 = table.group.factor1, table.group.factor2
    total = math.fsum(f1.dim(i1) * f2.dim(i2) * np.vdot(blk, blk).real for (i1, i2), blk in table.blocks.items())
    return math.sqrt(total)


def l2_norm(f: GridFunction) -> float:
    """Quadrature L2 norm under normalized Haar measure."""
    return math.sqrt(float(np.sum(f.grid.weights * np.abs(f.samples) ** 2)))


# ------------------------------------------------------------------ transforms


def partial_forward_x2(f: GridFunction, factor2: Factor) -> PartialCoefficientField:
    g1, g2 = f.grid.g1, f.grid.g2
    flat = f.samples.reshape((-1,) + g2.shape)
    coeffs = g2.forward(flat, factor2)
    return PartialCoefficientField(g1, factor2, coeffs.reshape(g1.shape + (factor2.size,)))


def partial_inverse_x2(field: PartialCoefficientField, g2: FactorGrid) -> GridFunction:
    g1 = field.grid1
    flat = field.data.reshape((-1, field.factor2.size))
    samples = g2.inverse(flat, field.factor2).reshape(g1.shape + g2.shape)
    return GridFunction(ProductGrid(g1, g2), samples)


def forward_x1(field: PartialCoefficientField, factor1: Factor) -> FourierTable:
    g1 = field.grid1
    moved = np.moveaxis(field.data, -1, 0)  # (D2, *S1)
    coeffs = g1.forward(moved, factor1)  # (D2, D1)
    return FourierTable.from_dense(ProductGroup(factor1, field.factor2), coeffs.T)


def inverse_x1(table: FourierTable, g1: FactorGrid) -> PartialCoefficientField:
    dense = table.to_dense()  # (D1, D2)
    samples = g1.inverse(dense.T, table.group.factor1)  # (D2, *S1)
    return PartialCoefficientField(g1, table.group.factor2, np.moveaxis(samples, 0, -1))


def double_forward(f: GridFunction, group: ProductGroup) -> FourierTable:
    """Double Fourier coefficients within the truncation of ``group``."""
    return forward_x1(partial_forward_x2(f, group.factor2), group.factor1)


def double_inverse(table: FourierTable, grid: ProductGrid | None = None) -> GridFunction:
    """``u = sum d_xi d_eta tr(...)`` synthesized on ``grid`` (default: twice the truncation)."""
    grid = table.group.default_grid() if grid is None else grid
    grid.g1._check(table.group.factor1)
    grid.g2._check(table.group.factor2)
    return partial_inverse_x2(inverse_x1(table, grid.g1), grid.g2)


def random_table(group: ProductGroup, rng: np.random.Generator, scale=None) -> FourierTable:
    """Dense random table; ``scale(key)`` optionally damps each block."""
    keys = list(group.rep_pairs())
    shapes = [group.block_shape(key) for key in keys]
    sizes = [math.prod(sh) for sh in shapes]
    draw = rng.normal(size=(2, sum(sizes)))
    flat = draw[0] + 1j * draw[1]  # one draw for the whole table; per-block calls dominate on T2
    blocks, off = {}, 0
    for key, shape, n in zip(keys, shapes, sizes):
        blk = flat[off : off + n].reshape(shape)
        blocks[key] = blk if scale is None else blk * scale(key)
        off += n
    return FourierTable(group, blocks)


# ---------------------------------------------------------------- decay fits


@dataclass(frozen=True)
class DecayFit:
    """Log-log regression of shell maxima of block norms.

    ``classification`` is one of ``smooth-like``, ``distribution-order-N``,
    ``non-decaying`` or ``inconclusive``.
    """

    classification: str
    slope: float | None
    constant: float | None
    r2: float | None
    shells: tuple = ()
    order: int | None = None
    reaches_edge: bool = False

    @property
    def smooth_like(self) -> bool:
        return self.classification == "smooth-like"


SMOOTH_SLOPE = -3.0
SMOOTH_R2 = 0.9
NON_DECAYING_LEVEL = 0.5
EXTENT_FRACTION = 0.5


def _loglog_fit(xs, ys) -> tuple[float, float, float]:
    lx, ly = np.log(np.asarray(xs, dtype=float)), np.log(np.asarray(ys, dtype=float))
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + intercept)
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    return float(slope), float(math.exp(intercept)), r2


GROWTH_SLOPE = 2.0


def _growth(group, norms: dict) -> DecayFit | None:
    """Shell maxima that increase strictly and steeply: growing coefficients.

    Checked before the noise floor, which would otherwise keep only the top
    shell of a table spanning many orders of magnitude.
    """
    shells: dict[int, float] = {}
    for k, v in norms.items():
        if v > 0:
            s = group.shell(k)
            shells[s] = max(shells.get(s, 0.0), v)
    ordered = tuple(sorted(shells.items()))
    if len(ordered) < 3 or any(b[1] <= a[1] for a, b in zip(ordered, ordered[1:])):
        return None
    slope, const, r2 = _loglog_fit([s for s, _ in ordered], [v for _, v in ordered])
    if slope < GROWTH_SLOPE:
        return None
    f1, f2 = group.factor1, group.factor2
    edge = any(f1.at_edge(k[0]) or f2.at_edge(k[1]) for k, v in norms.items() if v > 0)
    return DecayFit("non-decaying", slope, const, r2, ordered, reaches_edge=edge)


def decay_classify(table: FourierTable) -> DecayFit:
    """Classify coefficient decay against ``<xi> + <eta>`` at finite truncation.

    Steeply growing shell maxima are non-decaying outright.  Otherwise
    entries below ``NOISE_FLOOR`` times the largest block norm are ignored.
    Support that touches the truncation edge, or spans at least
    ``EXTENT_FRACTION`` of the available shells, is treated as a pattern that
    continues; otherwise the table is a finite sum and smooth-like.  Flat shell
    maxima (all within ``NON_DECAYING_LEVEL`` of the largest) are non-decaying;
    the log-log slope decides between smooth-like and a distribution order,
    with a steepening tail accepted as smooth-like despite a poor linear fit.
    """
    norms = {k: table.block_norm(k) for k in table.blocks}
    top = max(norms.values(), default=0.0)
    live = {k: v for k, v in norms.items() if top > 0 and v > NOISE_FLOOR * top}
    if not live:
        return DecayFit("smooth-like", None, None, None)
    group = table.group
    growth = _growth(group, norms)
    if growth is not None:
        return growth
    shells: dict[int, float] = {}
    for k, v in live.items():
        s = group.shell(k)
        shells[s] = max(shells.get(s, 0.0), v)
    ordered = tuple(sorted(shells.items()))
    f1, f2 = group.factor1, group.factor2
    edge = any(f1.at_edge(k[0]) or f2.at_edge(k[1]) for k in live)
    widest = group.shell((f1.trunc, f2.trunc))
    spread = edge or ordered[-1][0] >= EXTENT_FRACTION * widest
    if len(ordered) < 3:
        cls = "inconclusive" if edge else "smooth-like"
        return DecayFit(cls, None, None, None, ordered, reaches_edge=edge)
    slope, const, r2 = _loglog_fit([s for s, _ in ordered], [v for _, v in ordered])
    if spread and min(v for _, v in ordered) >= NON_DECAYING_LEVEL * top:
        return DecayFit("non-decaying", slope, const, r2, ordered, reaches_edge=edge)
    tail = ordered[len(ordered) // 2:] if len(ordered) >= 6 else ordered
    tail_slope = _loglog_fit([s for s, _ in tail], [v for _, v in tail])[0]
    # faster-than-polynomial decay bends the log-log line down and lowers r2
    steepening = tail_slope <= slope
    if (slope <= SMOOTH_SLOPE and (r2 >= SMOOTH_R2 or steepening)) or not spread:
        return DecayFit("smooth-like", slope, const, r2, ordered, reaches_edge=edge)
    order = max(0, math.ceil(slope))
    return DecayFit(f"distribution-order-{order}", slope, const, r2, ordered, order, edge)


def resample(f: GridFunction, grid: ProductGrid) -> GridFunction:
    """Move a band-limited grid function to another grid through its coefficients."""
    if f.grid == grid:
        return f
    src = f.grid
    group = ProductGroup(
        Factor(src.g1.kind, min(src.g1.band, grid.g1.band)),
        Factor(src.g2.kind, min(src.g2.band, grid.g2.band)),
    )
    return double_inverse(double_forward(f, group), grid)
