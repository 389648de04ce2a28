"""Feature-matrix file formats: binary, JSON, and CSV.

The binary format is the canonical one and round-trips bit-exactly:

    bytes 0..7    magic "PANEVAL1"
    bytes 8..11   count, unsigned 32-bit little-endian
    bytes 12..15  dim, unsigned 32-bit little-endian
    bytes 16..    count*dim 64-bit little-endian floats, row-major

JSON files carry {"count": N, "dim": D, "data": [[...], ...]} and CSV files
one comma-separated row per line with no header. All formats store finite
64-bit values only.
"""

from __future__ import annotations

import json
import os
import struct
import tempfile

import numpy as np

from .errors import FormatError, InvalidInputError, WriteError

MAGIC = b"PANEVAL1"
HEADER_LEN = len(MAGIC) + 8
FORMATS = ("binary", "json", "csv")


def _check_features(matrix):
    arr = np.asarray(matrix, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise InvalidInputError(f"feature matrix must be 2-D and non-empty, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError("feature matrix contains NaN or Inf entries")
    return arr


def _check_format(fmt):
    if fmt not in FORMATS:
        raise InvalidInputError(f"unknown feature format {fmt!r} (expected one of {FORMATS})")


def read_features(path, format: str = "binary") -> np.ndarray:
    """Read an N x D feature matrix from ``path`` in the declared format."""
    _check_format(format)
    if format == "binary":
        return _read_binary(path)
    if format == "json":
        return _read_json(path)
    return _read_csv(path)


def write_features(matrix, path, format: str = "binary") -> None:
    """Write a feature matrix so read_features can recover it.

    Binary round trips are bit-exact. Writes go through a temp file and an
    atomic rename.
    """
    _check_format(format)
    arr = _check_features(matrix)
    if format == "binary":
        n, d = arr.shape
        payload = MAGIC + struct.pack("<II", n, d) + arr.astype("<f8").tobytes()
        atomic_write_bytes(path, payload)
    elif format == "json":
        doc = {"count": arr.shape[0], "dim": arr.shape[1], "data": arr.tolist()}
        atomic_write_bytes(path, (json.dumps(doc) + "\n").encode("utf-8"))
    else:
        lines = [",".join(_csv_cell(v) for v in row) for row in arr]
        atomic_write_bytes(path, ("\n".join(lines) + "\n").encode("utf-8"))


def _csv_cell(v):
    # Integral values print without a trailing .0; repr round-trips the rest.
    return str(int(v)) if float(v).is_integer() else repr(float(v))


def atomic_write_bytes(path, data):
    path = os.fspath(path)
    directory = os.path.dirname(path) or "."
    try:
        fd, tmp = tempfile.mkstemp(dir=directory, prefix=".paneval-")
        try:
            with os.fdopen(fd, "wb") as fh:
                fh.write(data)
            os.replace(tmp, path)
        except BaseException:
            os.unlink(tmp)
            raise
    except OSError as exc:
        raise WriteError(f"could not write {path}: {exc}") from exc


def _read_binary(path):
    try:
        with open(path, "rb") as fh:
            blob = fh.read()
    except OSError as exc:
        raise FormatError(f"could not read {path}: {exc}") from exc
    if len(blob) < HEADER_LEN:
        raise FormatError(f"{path}: truncated header, {len(blob)} bytes < {HEADER_LEN}")
    if blob[: len(MAGIC)] != MAGIC:
        raise FormatError(f"{path}: bad magic at byte 0 (expected {MAGIC!r})")
    count, dim = struct.unpack("<II", blob[len(MAGIC):HEADER_LEN])
    if count < 1 or dim < 1:
        raise FormatError(f"{path}: header declares count={count}, dim={dim}; both must be >= 1")
    expected = count * dim * 8
    actual = len(blob) - HEADER_LEN
    if actual != expected:
        raise FormatError(
            f"{path}: payload length {actual} bytes at byte {HEADER_LEN} "
            f"disagrees with count*dim*8 = {expected}"
        )
    arr = np.frombuffer(blob[HEADER_LEN:], dtype="<f8").reshape(count, dim)
    if not np.all(np.isfinite(arr)):
        raise FormatError(f"{path}: payload contains non-finite values")
    return arr.astype(np.float64)


def _read_json(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise FormatError(f"could not read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise FormatError(f"{path}: top-level value must be an object")
    for key in ("count", "dim", "data"):
        if key not in doc:
            raise FormatError(f"{path}: missing key {key!r}")
    count, dim, data = doc["count"], doc["dim"], doc["data"]
    if not (isinstance(count, int) and not isinstance(count, bool)) or count < 1:
        raise FormatError(f"{path}: count must be an integer >= 1")
    if not (isinstance(dim, int) and not isinstance(dim, bool)) or dim < 1:
        raise FormatError(f"{path}: dim must be an integer >= 1")
    if not isinstance(data, list) or len(data) != count:
        raise FormatError(f"{path}: data has {len(data) if isinstance(data, list) else 'no'} rows, header says {count}")
    out = np.empty((count, dim), dtype=np.float64)
    for i, row in enumerate(data):
        if not isinstance(row, list) or len(row) != dim:
            raise FormatError(f"{path}: row {i} has {len(row) if isinstance(row, list) else 'no'} cells, expected {dim}")
        for j, cell in enumerate(row):
            if isinstance(cell, bool) or not isinstance(cell, (int, float)):
                raise FormatError(f"{path}: row {i}, column {j}: non-numeric cell {cell!r}")
            out[i, j] = float(cell)
    if not np.all(np.isfinite(out)):
        raise FormatError(f"{path}: data contains non-finite values")
    return out


def _read_csv(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise FormatError(f"could not read {path}: {exc}") from exc
    lines = text.splitlines()
    while lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise FormatError(f"{path}: empty file")
    rows = []
    width = None
    for i, line in enumerate(lines, start=1):
        cells = line.split(",")
        if width is None:
            width = len(cells)
        elif len(cells) != width:
            raise FormatError(f"{path}: line {i} has {len(cells)} cells, expected {width}")
        row = []
        for j, cell in enumerate(cells):
            try:
                value = float(cell)
            except ValueError as exc:
                raise FormatError(f"{path}: line {i}, column {j}: non-numeric cell {cell!r}") from exc
            if not np.isfinite(value):
                raise FormatError(f"{path}: line {i}, column {j}: non-finite value {cell!r}")
            row.append(value)
        rows.append(row)
    return np.asarray(rows, dtype=np.float64)
