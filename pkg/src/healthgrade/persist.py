"""Deterministic binary container for fitted artifacts.

Layout::

    magic (4 bytes) | format version (uint16 LE) | header length (uint32 LE)
    | header (UTF-8 JSON, sorted keys) | array payloads, in header order

Arrays are stored little-endian and C-contiguous. The same inputs always
produce the same bytes (no timestamps, no pickling).
"""

from __future__ import annotations

import hashlib
import json
import struct
from pathlib import Path

import numpy as np

from .errors import ArtifactError

FORMAT_VERSION = 1
_PREFIX = struct.Struct("<4sHI")


def dumps_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, ensure_ascii=False, separators=(",", ":"))


def write_blob(path, magic: bytes, header: dict, arrays: dict[str, np.ndarray] | None = None):
    if len(magic) != 4:
        raise ValueError("magic must be 4 bytes")
    arrays = arrays or {}
    specs = []
    payloads = []
    for name in sorted(arrays):
        arr = np.asarray(arrays[name])
        arr = np.ascontiguousarray(arr, dtype=arr.dtype.newbyteorder("<"))
        specs.append({"name": name, "dtype": arr.dtype.str, "shape": list(arr.shape)})
        payloads.append(arr.tobytes())
    head = dict(header)
    head["_arrays"] = specs
    raw = dumps_json(head).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(_PREFIX.pack(magic, FORMAT_VERSION, len(raw)))
        fh.write(raw)
        for p in payloads:
            fh.write(p)


def read_blob(path, magic: bytes) -> tuple[dict, dict[str, np.ndarray]]:
    data = Path(path).read_bytes()
    if len(data) < _PREFIX.size:
        raise ArtifactError(f"{path}: truncated artifact")
    got, version, hlen = _PREFIX.unpack_from(data)
    if got != magic:
        raise ArtifactError(f"{path}: bad magic {got!r}, expected {magic!r}")
    if version != FORMAT_VERSION:
        raise ArtifactError(f"{path}: unsupported format version {version}")
    start = _PREFIX.size
    try:
        header = json.loads(data[start:start + hlen].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ArtifactError(f"{path}: corrupt header ({exc})") from None
    pos = start + hlen
    arrays = {}
    for spec in header.pop("_arrays", []):
        dtype = np.dtype(spec["dtype"])
        count = int(np.prod(spec["shape"], dtype=np.int64))
        nbytes = count * dtype.itemsize
        if pos + nbytes > len(data):
            raise ArtifactError(f"{path}: truncated array {spec['name']!r}")
        arr = np.frombuffer(data, dtype=dtype, count=count, offset=pos).reshape(spec["shape"])
        arrays[spec["name"]] = arr.astype(dtype.newbyteorder("="), copy=True)
        pos += nbytes
    return header, arrays


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def write_json(path, obj) -> None:
    Path(path).write_text(
        json.dumps(obj, sort_keys=True, ensure_ascii=False, indent=1) + "\n", encoding="utf-8"
    )


def read_json(path):
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ArtifactError(f"{path}: not valid JSON ({exc})") from None
