"""Binary field dumps and CSV tables.

Field dump layout (little endian throughout)::

    b"EQPF" | version u32 | N u32 | t f64 | N*N f64 values, row-major (x index, then y)
"""
import csv
import struct
from pathlib import Path

import numpy as np

from .errors import ValidationError
from .spectral import ScalarField, get_grid

MAGIC = b"EQPF"
VERSION = 1
_HEADER = struct.Struct("<4sIId")

DIAGNOSTICS_COLUMNS = (
    "t", "energy", "enstrophy", "casimir3", "mean_omega", "max_velocity",
    "l2_err_vs_analytic", "linf_err_vs_analytic",
)


class FieldFormatError(ValidationError):
    pass


def write_field(path, field, t):
    N = field.grid.N
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, N, float(t)))
        fh.write(np.ascontiguousarray(field.values, dtype="<f8").tobytes())


def read_header(path):
    with open(path, "rb") as fh:
        raw = fh.read(_HEADER.size)
    if len(raw) < _HEADER.size:
        raise FieldFormatError(f"{path}: truncated header")
    magic, version, N, t = _HEADER.unpack(raw)
    if magic != MAGIC:
        raise FieldFormatError(f"{path}: bad magic {magic!r}")
    if version != VERSION:
        raise FieldFormatError(f"{path}: unsupported version {version}")
    return N, t


def read_field(path):
    """Return (ScalarField, t)."""
    N, t = read_header(path)
    data = Path(path).read_bytes()[_HEADER.size:]
    if len(data) != 8 * N * N:
        raise FieldFormatError(f"{path}: expected {8 * N * N} data bytes, found {len(data)}")
    values = np.frombuffer(data, dtype="<f8").reshape(N, N).astype(np.float64)
    return ScalarField(get_grid(N), values), t


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(v)) for v in row])


def read_csv(path):
    with open(path, newline="") as fh:
        r = csv.reader(fh)
        header = next(r)
        return header, [[float(v) for v in row] for row in r]
