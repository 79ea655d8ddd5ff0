"""JSON and CSV forms of operators, bases and tables."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

FLOAT_FMT = ".17g"


def operator_to_json(op) -> dict:
    """``{"dim": d, "rows": [[[re, im], ...], ...]}``, row major."""
    op = np.asarray(op, dtype=complex)
    if op.ndim != 2 or op.shape[0] != op.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {op.shape}")
    rows = [[[float(z.real), float(z.imag)] for z in row] for row in op]
    return {"dim": int(op.shape[0]), "rows": rows}


def operator_from_json(obj: dict) -> np.ndarray:
    try:
        dim = int(obj["dim"])
        arr = np.asarray(obj["rows"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed operator JSON: {exc}") from None
    if arr.shape != (dim, dim, 2):
        raise ValueError(f"operator rows have shape {arr.shape}, expected {(dim, dim, 2)}")
    return arr[..., 0] + 1j * arr[..., 1]


def complex_pair(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def basis_to_json(basis) -> list[dict]:
    return [
        {
            "eigenvalue": complex_pair(a.eigenvalue),
            "provenance": a.provenance,
            "operator": operator_to_json(a.operator),
        }
        for a in basis.attractors
    ]


def to_plain(obj):
    """Recursively convert numpy scalars/arrays and complex numbers for ``json``."""
    if isinstance(obj, dict):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_plain(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return complex_pair(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def write_json(path: Path, obj) -> Path:
    # json writes floats with repr, the shortest string that round-trips exactly
    path = Path(path)
    path.write_text(json.dumps(to_plain(obj), indent=1) + "\n")
    return path


def read_json(path: Path):
    return json.loads(Path(path).read_text())


def fmt(x) -> str:
    if isinstance(x, (complex, np.complexfloating)):
        x = complex(x)
        if x.imag == 0:
            return format(x.real, FLOAT_FMT)
        return f"{format(x.real, FLOAT_FMT)}{'+' if x.imag >= 0 else '-'}{format(abs(x.imag), FLOAT_FMT)}j"
    if isinstance(x, (float, np.floating)):
        return format(float(x), FLOAT_FMT)
    return str(x)


def write_csv(path: Path, header, rows) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])
    return path


def write_grid_csv(path: Path, grid, row_label: str = "x", col_label: str = "y") -> Path:
    grid = np.asarray(grid)
    header = [row_label] + [f"{col_label}{j}" for j in range(grid.shape[1])]
    return write_csv(path, header, [[i, *grid[i]] for i in range(grid.shape[0])])
