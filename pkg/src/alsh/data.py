"""Vector file I/O and the synthetic latent-factor generator.

Binary layout (little-endian)::

    magic  "AVEC"   4 bytes
    version u32
    dim     u32
    count   u64
    dtype   u32     0 = float32
    payload count * dim float32, row-major

Files ending in ``.csv`` hold one comma-separated vector per line instead.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .core import Dataset

MAGIC = b"AVEC"
VERSION = 1
DTYPE_F32 = 0
_HEADER = struct.Struct("<4sIIQI")


def write_vectors(path, X) -> None:
    X = np.asarray(X)
    if X.ndim != 2:
        raise ValueError("expected a 2-D array of row vectors")
    path = Path(path)
    if path.suffix.lower() == ".csv":
        np.savetxt(path, X, delimiter=",", fmt="%.17g")
        return
    header = _HEADER.pack(MAGIC, VERSION, X.shape[1], X.shape[0], DTYPE_F32)
    path.write_bytes(header + np.ascontiguousarray(X, dtype="<f4").tobytes())


def read_array(path) -> np.ndarray:
    """Load the raw (count, dim) float64 matrix from a vector file or CSV."""
    path = Path(path)
    if path.suffix.lower() == ".csv":
        X = np.loadtxt(path, delimiter=",", ndmin=2, dtype=np.float64)
        if X.size == 0:
            raise ValueError(f"{path}: no vectors")
        return X
    buf = path.read_bytes()
    if len(buf) < _HEADER.size:
        raise ValueError(f"{path}: truncated header, file ends at byte {len(buf)}")
    magic, version, dim, count, dtype = _HEADER.unpack_from(buf, 0)
    if magic != MAGIC:
        raise ValueError(f"{path}: bad magic {magic!r} at byte 0")
    if version != VERSION:
        raise ValueError(f"{path}: unsupported version {version} at byte 4")
    if dim < 1:
        raise ValueError(f"{path}: dimension must be >= 1 (byte 8)")
    if dtype != DTYPE_F32:
        raise ValueError(f"{path}: unknown dtype tag {dtype} at byte 20")
    expected = _HEADER.size + count * dim * 4
    if len(buf) != expected:
        raise ValueError(
            f"{path}: payload length mismatch, expected {expected} bytes, file ends at byte {len(buf)}"
        )
    X = np.frombuffer(buf, dtype="<f4", count=count * dim, offset=_HEADER.size)
    return X.reshape(count, dim).astype(np.float64)


def read_vectors(path) -> Dataset:
    """Read items with ids assigned in file order."""
    return Dataset.from_array(read_array(path))


def gen_synthetic(n: int, d: int, norm_low: float = 0.2, norm_high: float = 1.0, seed: int = 0) -> Dataset:
    """Gaussian directions with norms uniform on ``[norm_low, norm_high]``."""
    if n < 1 or d < 1:
        raise ValueError("n and d must be >= 1")
    if not 0 < norm_low <= norm_high:
        raise ValueError("need 0 < norm_low <= norm_high")
    rng = np.random.default_rng(seed)
    G = rng.standard_normal((n, d))
    G /= np.linalg.norm(G, axis=1, keepdims=True)
    norms = rng.uniform(norm_low, norm_high, size=n)
    return Dataset.from_array(G * norms[:, None])
