"""Single-file binary model format.

Layout (all integers little-endian)::

    magic    8 bytes  b"KEYGEST\\0"
    version  u32
    count    u32      number of fields
    field*   u16 name length, utf-8 name, u8 type, payload

Payloads: int (``<i8``), float (``<f8``), str (u64 length + utf-8),
float array / int array (u8 ndim, u64 per dim, ``<f8`` / ``<i8`` data).
"""

from __future__ import annotations

import io
import struct
from pathlib import Path

import numpy as np

MAGIC = b"KEYGEST\0"
FORMAT_VERSION = 1

T_INT, T_FLOAT, T_STR, T_FARRAY, T_IARRAY = 1, 2, 3, 4, 5


class ModelFormatError(ValueError):
    pass


def _write_field(buf, name: str, value):
    raw = name.encode()
    buf.write(struct.pack("<H", len(raw)) + raw)
    if isinstance(value, (bool, np.bool_)):
        raise TypeError(f"field {name}: booleans are not supported")
    if isinstance(value, (int, np.integer)):
        buf.write(struct.pack("<Bq", T_INT, int(value)))
    elif isinstance(value, (float, np.floating)):
        buf.write(struct.pack("<Bd", T_FLOAT, float(value)))
    elif isinstance(value, str):
        data = value.encode()
        buf.write(struct.pack("<BQ", T_STR, len(data)) + data)
    elif isinstance(value, np.ndarray):
        if np.issubdtype(value.dtype, np.integer):
            kind, arr = T_IARRAY, value.astype("<i8")
        else:
            kind, arr = T_FARRAY, value.astype("<f8")
        buf.write(struct.pack("<BB", kind, arr.ndim))
        buf.write(struct.pack(f"<{arr.ndim}Q", *arr.shape))
        buf.write(np.ascontiguousarray(arr).tobytes())
    else:
        raise TypeError(f"field {name}: unsupported type {type(value).__name__}")


def dumps(fields: dict) -> bytes:
    buf = io.BytesIO()
    buf.write(MAGIC + struct.pack("<II", FORMAT_VERSION, len(fields)))
    for name, value in fields.items():
        _write_field(buf, name, value)
    return buf.getvalue()


def _read(buf, n: int) -> bytes:
    data = buf.read(n)
    if len(data) != n:
        raise ModelFormatError("truncated model file")
    return data


def loads(data: bytes) -> dict:
    buf = io.BytesIO(data)
    if _read(buf, len(MAGIC)) != MAGIC:
        raise ModelFormatError("not a keygest model file")
    version, count = struct.unpack("<II", _read(buf, 8))
    if version != FORMAT_VERSION:
        raise ModelFormatError(f"model format version {version}, this build reads version {FORMAT_VERSION}")
    out = {}
    for _ in range(count):
        (n,) = struct.unpack("<H", _read(buf, 2))
        name = _read(buf, n).decode()
        (kind,) = struct.unpack("<B", _read(buf, 1))
        if kind == T_INT:
            (out[name],) = struct.unpack("<q", _read(buf, 8))
        elif kind == T_FLOAT:
            (out[name],) = struct.unpack("<d", _read(buf, 8))
        elif kind == T_STR:
            (n,) = struct.unpack("<Q", _read(buf, 8))
            out[name] = _read(buf, n).decode()
        elif kind in (T_FARRAY, T_IARRAY):
            (ndim,) = struct.unpack("<B", _read(buf, 1))
            shape = struct.unpack(f"<{ndim}Q", _read(buf, 8 * ndim))
            dtype = "<f8" if kind == T_FARRAY else "<i8"
            size = int(np.prod(shape, dtype=np.int64)) if ndim else 1
            arr = np.frombuffer(_read(buf, 8 * size), dtype=dtype).reshape(shape)
            out[name] = arr.astype(np.float64 if kind == T_FARRAY else np.int64)
        else:
            raise ModelFormatError(f"unknown field type {kind} for {name!r}")
    if buf.read(1):
        raise ModelFormatError("trailing bytes after last field")
    return out


def write(path, fields: dict) -> Path:
    path = Path(path)
    path.write_bytes(dumps(fields))
    return path


def read(path) -> dict:
    return loads(Path(path).read_bytes())
