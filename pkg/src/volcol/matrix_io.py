"""Matrix files: headerless CSV and the ``VCOL1`` binary layout.

Binary layout: the 5 magic bytes ``VCOL1``, little-endian u64 rows, u64
cols, then rows*cols little-endian f64 values in row-major order.
"""

import struct
from pathlib import Path

import numpy as np

from .errors import VolcolError

MAGIC = b"VCOL1"
_HEADER = struct.Struct("<QQ")


class MatrixFormatError(VolcolError):
    pass


def _guess_format(path, fmt):
    if fmt is not None:
        if fmt not in ("csv", "bin"):
            raise ValueError(f"unknown format {fmt!r}")
        return fmt
    return "bin" if Path(path).suffix.lower() in (".bin", ".vcol") else "csv"


def write_matrix(path, X, fmt=None):
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ValueError("expected a 2-D matrix")
    fmt = _guess_format(path, fmt)
    if fmt == "bin":
        data = MAGIC + _HEADER.pack(*X.shape) + X.astype("<f8").tobytes(order="C")
        Path(path).write_bytes(data)
    else:
        # repr gives the shortest string that parses back to the same double
        lines = [",".join(repr(float(v)) for v in row) for row in X]
        Path(path).write_text("\n".join(lines) + "\n")


def read_matrix(path, fmt=None):
    """Read a matrix file; binary files are recognized by their magic bytes."""
    path = Path(path)
    raw = path.read_bytes()
    if fmt == "bin" or (fmt is None and raw.startswith(MAGIC)):
        return _parse_bin(raw, path)
    return _parse_csv(raw, path)


def _parse_bin(raw, path):
    if not raw.startswith(MAGIC):
        raise MatrixFormatError(f"{path}: missing VCOL1 magic")
    head = len(MAGIC) + _HEADER.size
    if len(raw) < head:
        raise MatrixFormatError(f"{path}: truncated header")
    m, n = _HEADER.unpack_from(raw, len(MAGIC))
    if len(raw) != head + 8 * m * n:
        raise MatrixFormatError(f"{path}: expected {m}x{n} values, got {(len(raw) - head) / 8:g}")
    X = np.frombuffer(raw, dtype="<f8", offset=head).reshape(m, n).astype(float)
    return _finish(X, path)


def _parse_csv(raw, path):
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise MatrixFormatError(f"{path}: not UTF-8 text") from exc
    rows = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        try:
            rows.append([float(tok) for tok in line.split(",")])
        except ValueError as exc:
            raise MatrixFormatError(f"{path}:{lineno}: {exc}") from exc
    if not rows:
        raise MatrixFormatError(f"{path}: empty matrix")
    if len({len(row) for row in rows}) != 1:
        raise MatrixFormatError(f"{path}: rows have different lengths")
    return _finish(np.array(rows, dtype=float), path)


def _finish(X, path):
    if X.shape[0] < 1 or X.shape[1] < 1:
        raise MatrixFormatError(f"{path}: empty matrix")
    if not np.all(np.isfinite(X)):
        raise MatrixFormatError(f"{path}: non-finite entries")
    return X
