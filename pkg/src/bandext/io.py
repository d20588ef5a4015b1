"""Deterministic text outputs: CSV tables and legacy structured-points dumps.

Floats in CSV cells are written as 12-significant-digit scientific
notation; dump values use repr, whose shortest-round-trip property makes
a write/read cycle bit-exact.  All writers pin "\\n" line endings so
repeated runs produce byte-identical files on any platform.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .grid import Grid

__all__ = [
    "format_cell", "write_csv",
    "DumpMeta", "write_structured_points", "read_structured_points",
]


def format_cell(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.12e}"


def write_csv(path: str | Path, header: Sequence[str],
              rows: Iterable[Sequence]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_cell(v) for v in row])


@dataclass(frozen=True)
class DumpMeta:
    dims: tuple[int, int, int]
    origin: tuple[float, float, float]
    spacing: tuple[float, float, float]
    title: str

    @property
    def dim(self) -> int:
        return 2 if self.dims[2] == 1 else 3

    @property
    def shape(self) -> tuple[int, ...]:
        nx, ny, nz = self.dims
        return (ny, nx) if nz == 1 else (nz, ny, nx)


def _meta_for(grid: Grid, title: str) -> DumpMeta:
    nx, ny = grid.n[0], grid.n[1]
    nz = grid.n[2] if grid.dim == 3 else 1
    ox, oy = grid.lo[0], grid.lo[1]
    oz = grid.lo[2] if grid.dim == 3 else 0.0
    hx, hy = grid.h[0], grid.h[1]
    hz = grid.h[2] if grid.dim == 3 else 1.0
    return DumpMeta(dims=(nx, ny, nz), origin=(ox, oy, oz),
                    spacing=(hx, hy, hz), title=title)


def write_structured_points(path: str | Path, grid: Grid,
                            fields: dict[str, np.ndarray],
                            title: str = "bandext field dump") -> None:
    """Write node fields in the legacy ASCII structured-points layout.

    Values appear one per line in storage order (x fastest), formatted
    with repr so they parse back to the identical doubles.
    """
    meta = _meta_for(grid, title)
    lines = [
        "# vtk DataFile Version 3.0",
        title,
        "ASCII",
        "DATASET STRUCTURED_POINTS",
        "DIMENSIONS {} {} {}".format(*meta.dims),
        "ORIGIN {} {} {}".format(*(repr(v) for v in meta.origin)),
        "SPACING {} {} {}".format(*(repr(v) for v in meta.spacing)),
        f"POINT_DATA {grid.size}",
    ]
    for name, values in fields.items():
        if not name or any(c.isspace() for c in name):
            raise ValueError(f"field name {name!r} must be non-empty without "
                             "whitespace")
        arr = np.asarray(values, dtype=np.float64)
        if arr.shape != grid.shape:
            raise ValueError(f"field {name!r} has shape {arr.shape}, "
                             f"expected {grid.shape}")
        lines.append(f"SCALARS {name} double 1")
        lines.append("LOOKUP_TABLE default")
        lines.extend(repr(float(v)) for v in arr.ravel())
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(lines))
        fh.write("\n")


def read_structured_points(path: str | Path
                           ) -> tuple[DumpMeta, dict[str, np.ndarray]]:
    """Parse a dump written by :func:`write_structured_points`."""
    text = Path(path).read_text()
    lines = text.splitlines()
    if len(lines) < 8 or not lines[0].startswith("# vtk DataFile"):
        raise ValueError(f"{path}: not a structured-points dump")
    title = lines[1]
    if lines[2] != "ASCII" or lines[3] != "DATASET STRUCTURED_POINTS":
        raise ValueError(f"{path}: unsupported dump variant")

    def tail(i, keyword):
        parts = lines[i].split()
        if parts[0] != keyword:
            raise ValueError(f"{path}: expected {keyword} on line {i + 1}")
        return parts[1:]

    dims = tuple(int(v) for v in tail(4, "DIMENSIONS"))
    origin = tuple(float(v) for v in tail(5, "ORIGIN"))
    spacing = tuple(float(v) for v in tail(6, "SPACING"))
    count = int(tail(7, "POINT_DATA")[0])
    meta = DumpMeta(dims=dims, origin=origin, spacing=spacing, title=title)

    fields: dict[str, np.ndarray] = {}
    i = 8
    while i < len(lines):
        if not lines[i].strip():
            i += 1
            continue
        parts = lines[i].split()
        if parts[0] != "SCALARS" or len(parts) < 3:
            raise ValueError(f"{path}: expected SCALARS block on line {i + 1}")
        name = parts[1]
        if lines[i + 1].split()[0] != "LOOKUP_TABLE":
            raise ValueError(f"{path}: missing LOOKUP_TABLE after {name}")
        start = i + 2
        values = np.array([float(v) for v in lines[start:start + count]])
        if values.size != count:
            raise ValueError(f"{path}: field {name} has {values.size} of "
                             f"{count} values")
        fields[name] = values.reshape(meta.shape)
        i = start + count
    return meta, fields
