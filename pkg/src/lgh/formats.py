"""Text file formats: coefficient tables, grid samples, operator specs and reports.

All writers are deterministic: entries are sorted, floats use 17 significant
digits and negative zero is normalized.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np

from .product import Factor, FactorGrid, FourierTable, GridFunction, ProductGrid, ProductGroup
from .scalars import parse_scalar
from .symbols import OperatorSpec, TrigPoly

__all__ = [
    "FormatError",
    "fmt_float",
    "write_coef",
    "read_coef",
    "write_grid",
    "read_grid",
    "read_spec",
    "parse_spec",
    "spec_lines",
    "write_spec",
    "read_rhs",
    "Report",
]

COEF_HEADER = "LGH-COEF v1"
GRID_HEADER = "LGH-GRID v1"


class FormatError(ValueError):
    """Malformed input file."""


def fmt_float(x: float) -> str:
    return format(float(x) + 0.0, ".16e")


# -------------------------------------------------------------- coefficients


def _label_pos(factor: Factor, idx: int, two_m: int) -> int:
    if factor.kind == "SU2":
        if (two_m + idx) % 2 or abs(two_m) > idx:
            raise FormatError(f"label {two_m} is not a row of spin {idx}/2")
        return (two_m + idx) // 2
    if two_m != 0:
        raise FormatError(f"{factor.kind} factor rows carry label 0, got {two_m}")
    return 0


def write_coef(table: FourierTable) -> str:
    f1, f2 = table.group.factor1, table.group.factor2
    lines = [COEF_HEADER, f"FACTOR1 {f1.kind} {f1.trunc}", f"FACTOR2 {f2.kind} {f2.trunc}"]
    for key in table.keys():
        blk = table.blocks[key]
        l1, l2 = f1.labels(key[0]), f2.labels(key[1])
        for m, n, r, s in zip(*np.nonzero(blk)):
            z = blk[m, n, r, s]
            lines.append(
                f"{key[0]} {l1[m]} {l1[n]} {key[1]} {l2[r]} {l2[s]} {fmt_float(z.real)} {fmt_float(z.imag)}"
            )
    return "\n".join(lines) + "\n"


def _factor_line(line: str, tag: str) -> Factor:
    parts = line.split()
    if len(parts) != 3 or parts[0] != tag:
        raise FormatError(f"expected '{tag} <kind> <trunc>', got {line!r}")
    try:
        return Factor(parts[1], int(parts[2]))
    except ValueError as exc:
        raise FormatError(str(exc)) from exc


def read_coef(text: str) -> FourierTable:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if len(lines) < 3 or lines[0] != COEF_HEADER:
        raise FormatError(f"missing {COEF_HEADER!r} header")
    group = ProductGroup(_factor_line(lines[1], "FACTOR1"), _factor_line(lines[2], "FACTOR2"))
    table = FourierTable.zeros(group)
    for ln in lines[3:]:
        parts = ln.split()
        if len(parts) != 8:
            raise FormatError(f"coefficient line needs 8 fields: {ln!r}")
        try:
            i1, m, n, i2, r, s = (int(p) for p in parts[:6])
            re, im = float(parts[6]), float(parts[7])
        except ValueError as exc:
            raise FormatError(f"bad coefficient line {ln!r}") from exc
        f1, f2 = group.factor1, group.factor2
        if not (f1.contains(i1) and f2.contains(i2)):
            raise FormatError(f"rep pair ({i1}, {i2}) outside the declared truncation")
        if f2.kind == "SU2" and i2 < 0:
            raise FormatError("negative spin")
        table.set_entry(
            (i1, i2), _label_pos(f1, i1, m), _label_pos(f1, i1, n), _label_pos(f2, i2, r), _label_pos(f2, i2, s),
            complex(re, im),
        )
    return table


# --------------------------------------------------------------------- grids


def write_grid(f: GridFunction) -> str:
    g1, g2 = f.grid.g1, f.grid.g2
    lines = [GRID_HEADER]
    for tag, g in (("GRID1", g1), ("GRID2", g2)):
        lines.append(f"{tag} {g.kind} {g.band} " + " ".join(str(n) for n in g.shape))
    for z in f.samples.reshape(-1):
        lines.append(f"{fmt_float(z.real)} {fmt_float(z.imag)}")
    return "\n".join(lines) + "\n"


def _grid_line(line: str, tag: str) -> FactorGrid:
    parts = line.split()
    if len(parts) < 3 or parts[0] != tag:
        raise FormatError(f"expected '{tag} <kind> <band> <sizes...>', got {line!r}")
    try:
        g = FactorGrid(parts[1], int(parts[2]))
        sizes = tuple(int(p) for p in parts[3:])
        shape = g.shape
    except (ValueError, KeyError) as exc:
        raise FormatError(f"bad grid line {line!r}") from exc
    if sizes != shape:
        raise FormatError(f"{tag} sizes {sizes} do not match a {g.kind} grid of band {g.band} {shape}")
    return g


def read_grid(text: str) -> GridFunction:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if len(lines) < 3 or lines[0] != GRID_HEADER:
        raise FormatError(f"missing {GRID_HEADER!r} header")
    grid = ProductGrid(_grid_line(lines[1], "GRID1"), _grid_line(lines[2], "GRID2"))
    rows = lines[3:]
    if len(rows) != int(np.prod(grid.shape)):
        raise FormatError(f"expected {int(np.prod(grid.shape))} samples, found {len(rows)}")
    try:
        data = np.array([[float(x) for x in row.split()] for row in rows])
    except ValueError as exc:
        raise FormatError("non-numeric sample") from exc
    if data.shape[1:] != (2,):
        raise FormatError("each sample line holds 're im'")
    return GridFunction(grid, (data[:, 0] + 1j * data[:, 1]).reshape(grid.shape))


def read_rhs(path: str | Path, group: ProductGroup):
    """Coefficient or grid file, recognized by its header."""
    text = Path(path).read_text()
    head = text.lstrip().split("\n", 1)[0].strip()
    if head == COEF_HEADER:
        table = read_coef(text)
    elif head == GRID_HEADER:
        return read_grid(text)
    else:
        raise FormatError(f"{path}: unknown file type {head!r}")
    if (table.group.factor1.kind, table.group.factor2.kind) != (group.factor1.kind, group.factor2.kind):
        raise FormatError("right-hand side lives on a different group than the operator")
    return table


# --------------------------------------------------------------------- specs

SPEC_KEYS = ("name", "factor1", "factor2", "trunc1", "trunc2", "a", "q", "q0", "A", "Q")


def _load_gridfile(value: str, base: Path) -> GridFunction:
    path = Path(value[len("gridfile:") :].strip())
    if not path.is_absolute():
        path = base / path
    try:
        return read_grid(path.read_text())
    except OSError as exc:
        raise FormatError(f"cannot read grid file {path}: {exc}") from exc


def parse_spec(text: str, base: Path | None = None, default_truncs: dict | None = None) -> OperatorSpec:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    base = Path(".") if base is None else base
    kv: dict[str, str] = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or key not in SPEC_KEYS:
            raise FormatError(f"bad spec line {raw!r}")
        if key in kv:
            raise FormatError(f"duplicate key {key!r}")
        kv[key] = value
    for req in ("factor1", "factor2", "a"):
        if req not in kv:
            raise FormatError(f"spec lacks {req!r}")
    defaults = default_truncs or {"T1": 32, "SU2": 16, "TRIVIAL": 0}
    try:
        k1, k2 = kv["factor1"].upper(), kv["factor2"].upper()
        t1 = int(kv.get("trunc1", defaults.get(k1, 0)))
        t2 = int(kv.get("trunc2", defaults.get(k2, 0)))
        group = ProductGroup(Factor(k1, 0 if k1 == "TRIVIAL" else t1), Factor(k2, t2))
        a_text = kv["a"]
        a = TrigPoly.parse(a_text[len("trigpoly:") :]) if a_text.startswith("trigpoly:") else parse_scalar(a_text)
        q = None
        if "q" in kv:
            q = _load_gridfile(kv["q"], base) if kv["q"].startswith("gridfile:") else parse_scalar(kv["q"])
        q0 = parse_scalar(kv["q0"]) if "q0" in kv else None
        A = TrigPoly.parse(kv["A"][len("trigpoly:") :]) if "A" in kv else None
        Q = _load_gridfile(kv["Q"], base) if "Q" in kv else None
        return OperatorSpec(group, a, q=q, q0=q0, A=A, Q=Q, name=kv.get("name", ""))
    except FormatError:
        raise
    except (ValueError, KeyError, TypeError) as exc:
        raise FormatError(str(exc)) from exc


def read_spec(path: str | Path, trunc1: int | None = None, trunc2: int | None = None) -> OperatorSpec:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise FormatError(f"cannot read spec {path}: {exc}") from exc
    spec = parse_spec(text, path.parent)
    if trunc1 is not None or trunc2 is not None:
        t1, t2 = spec.group.truncs
        spec = spec.with_truncs(t1 if trunc1 is None else trunc1, t2 if trunc2 is None else trunc2)
    return spec


def _coef_text(c) -> str:
    return "trigpoly:" + c.text() if isinstance(c, TrigPoly) else c.text()


def write_spec(spec: OperatorSpec, path: str | Path) -> None:
    """Write a spec file; grid-valued ``q`` and ``Q`` go to sibling grid files."""
    path = Path(path)
    f1, f2 = spec.group.factor1, spec.group.factor2
    lines = []
    if spec.name:
        lines.append(f"name = {spec.name}")
    lines += [f"factor1 = {f1.kind}", f"factor2 = {f2.kind}", f"trunc1 = {f1.trunc}", f"trunc2 = {f2.trunc}"]
    lines.append(f"a = {_coef_text(spec.a)}")
    for key, value in (("q", spec.q), ("Q", spec.Q)):
        if isinstance(value, GridFunction):
            grid_path = path.with_name(f"{path.stem}.{key}.grid")
            grid_path.write_text(write_grid(value))
            lines.append(f"{key} = gridfile:{grid_path.name}")
        elif value is not None:
            lines.append(f"{key} = {value.text()}")
    if spec.q0 is not None:
        lines.append(f"q0 = {spec.q0.text()}")
    if spec.A is not None:
        lines.append(f"A = trigpoly:{spec.A.text()}")
    path.write_text("\n".join(lines) + "\n")


def spec_lines(spec: OperatorSpec) -> list[tuple[str, str]]:
    f1, f2 = spec.group.factor1, spec.group.factor2
    out = [
        ("name", spec.name or "-"),
        ("factor1", f1.kind),
        ("factor2", f2.kind),
        ("trunc1", str(f1.trunc)),
        ("trunc2", str(f2.trunc)),
        ("a", _coef_text(spec.a)),
    ]
    if spec.function_q:
        g = spec.q.grid
        out.append(("q", f"grid function ({g.g1.kind} band {g.g1.band}, {g.g2.kind} band {g.g2.band})"))
    elif spec.q is not None:
        out.append(("q", spec.q.text()))
    if spec.q0 is not None:
        out.append(("q0", spec.q0.text()))
    return out


# -------------------------------------------------------------------- reports


class Report:
    """Indented ``key = value`` report with nested sections and lists."""

    def __init__(self, title: str):
        self.lines = [f"LGH-REPORT v1 {title}"]
        self._depth = 0

    def section(self, name: str) -> "Report":
        self.lines.append("  " * self._depth + f"{name}:")
        self._depth += 1
        return self

    def end(self) -> "Report":
        self._depth -= 1
        return self

    def kv(self, key: str, value) -> "Report":
        self.lines.append("  " * self._depth + f"{key} = {_value(value)}")
        return self

    def item(self, value) -> "Report":
        self.lines.append("  " * self._depth + f"- {_value(value)}")
        return self

    def text(self) -> str:
        return "\n".join(self.lines) + "\n"


def _value(v) -> str:
    if v is None:
        return "none"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return fmt_float(v)
    return str(v)
