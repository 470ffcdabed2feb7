"""Result serialization: CSV series, versioned JSON reports, legacy-VTK snapshots.

Deterministic payloads (energy series, reports, config echoes) are written
with repr-exact floats and sorted JSON keys so identical runs produce
byte-identical files. Wall-clock timings are never mixed into them; they go
to their own CSV.
"""

from __future__ import annotations

import json
import os

import numpy as np

SCHEMA_VERSION = 1


def write_csv(path: str, header, rows):
    """Write rows of numbers as CSV; floats use repr (shortest round-trip)."""
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(
                repr(float(v)) if isinstance(v, float) or isinstance(v, np.floating)
                else str(int(v))
                for v in row) + "\n")


def write_json(path: str, payload: dict):
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_vtk_structured_points(path: str, m: np.ndarray, origin, spacing,
                                name: str = "m", title: str = "magnetization snapshot"):
    """Legacy-VTK STRUCTURED_POINTS file with one 3-vector per cell center.

    m has shape (3, nx, ny, nz); points are emitted x-fastest as the format
    requires.
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 4 or m.shape[0] != 3:
        raise ValueError(f"expected (3, nx, ny, nz) field, got shape {m.shape}")
    nx, ny, nz = m.shape[1:]
    vectors = m.transpose(3, 2, 1, 0).reshape(-1, 3)
    with open(path, "w") as fh:
        fh.write("# vtk DataFile Version 3.0\n")
        fh.write(title + "\n")
        fh.write("ASCII\n")
        fh.write("DATASET STRUCTURED_POINTS\n")
        fh.write(f"DIMENSIONS {nx} {ny} {nz}\n")
        fh.write("ORIGIN {!r} {!r} {!r}\n".format(*[float(v) for v in origin]))
        fh.write("SPACING {!r} {!r} {!r}\n".format(*[float(v) for v in spacing]))
        fh.write(f"POINT_DATA {nx * ny * nz}\n")
        fh.write(f"VECTORS {name} double\n")
        for vx, vy, vz in vectors:
            fh.write(f"{float(vx)!r} {float(vy)!r} {float(vz)!r}\n")


def ensure_dir(path: str) -> str:
    os.makedirs(path, exist_ok=True)
    return path
