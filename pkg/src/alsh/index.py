"""Bucketed LSH index with asymmetric (ALSH) and symmetric (L2LSH) modes.

Each of the ``L`` tables keys items by a meta-hash: ``K`` L2 hash values
mixed into one 64-bit key. In asymmetric mode items are scaled to norm at
most U and hashed after P, queries are normalised and hashed after Q. In
symmetric mode (``transform=None``) raw vectors are hashed on both sides.
"""

from __future__ import annotations

import math
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .core import Dataset, TopTResult, as_vector, top_t_of
from .l2lsh import HashBank, HashSeed, sample_bank
from .transforms import TransformParams, normalize_query, scale_dataset, transform_p, transform_q

MAGIC = b"ALSH"
FORMAT_VERSION = 1
_HEADER = struct.Struct("<4sIIQIIIdddQQ")

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)


def _fmix(h: np.ndarray) -> np.ndarray:
    h = h ^ (h >> np.uint64(30))
    h = h * _MIX1
    h = h ^ (h >> np.uint64(27))
    h = h * _MIX2
    return h ^ (h >> np.uint64(31))


def mix_keys(codes) -> np.ndarray:
    """Reduce rows of K integer hash values to 64-bit table keys."""
    codes = np.ascontiguousarray(np.atleast_2d(np.asarray(codes, dtype=np.int64)))
    u = codes.view(np.uint64)
    h = np.full(codes.shape[0], (codes.shape[1] * int(_GOLDEN)) & 0xFFFFFFFFFFFFFFFF, dtype=np.uint64)
    for k in range(codes.shape[1]):
        h = _fmix(h ^ (u[:, k] * _GOLDEN))
    return h


@dataclass(frozen=True)
class IndexConfig:
    K: int
    L: int
    r: float = 2.5
    transform: TransformParams | None = field(default_factory=TransformParams)
    seed: HashSeed = field(default_factory=HashSeed)

    def __post_init__(self):
        if self.K < 1 or self.L < 1:
            raise ValueError("K and L must be >= 1")
        if not self.r > 0:
            raise ValueError("bucket width r must be positive")

    @property
    def asymmetric(self) -> bool:
        return self.transform is not None


@dataclass(frozen=True, eq=False)
class CandidateSet:
    """Sorted unique candidate ids and the number of non-empty buckets hit."""

    ids: np.ndarray
    probed_buckets: int

    def __len__(self) -> int:
        return len(self.ids)

    def __contains__(self, item_id) -> bool:
        i = np.searchsorted(self.ids, item_id)
        return bool(i < len(self.ids) and self.ids[i] == item_id)


@dataclass(frozen=True, eq=False)
class AlshIndex:
    """Immutable after build; queries are pure reads.

    ``bank`` holds all ``L * K`` hash functions, rows ``l*K:(l+1)*K``
    belonging to table ``l``. ``dataset`` is the original unscaled data and
    may be absent for an index loaded from a snapshot without data.
    """

    config: IndexConfig
    bank: HashBank
    tables: list[dict[int, np.ndarray]]
    dim: int
    n: int
    scale_factor: float = 1.0
    dataset: Dataset | None = None

    def table_bank(self, l: int) -> HashBank:
        K = self.config.K
        return HashBank(self.bank.A[l * K:(l + 1) * K], self.bank.b[l * K:(l + 1) * K], self.bank.r)

    def with_dataset(self, ds: Dataset) -> "AlshIndex":
        if len(ds) != self.n or ds.dim != self.dim:
            raise ValueError("dataset shape does not match the index")
        return AlshIndex(self.config, self.bank, self.tables, self.dim, self.n, self.scale_factor, ds)


def _group(keys: np.ndarray, ids: np.ndarray) -> dict[int, np.ndarray]:
    order = np.argsort(keys, kind="stable")
    sk = keys[order]
    uniq, starts = np.unique(sk, return_index=True)
    chunks = np.split(ids[order], starts[1:])
    return {int(k): c for k, c in zip(uniq, chunks)}


def build_index(ds: Dataset, config: IndexConfig, workers: int = 1) -> AlshIndex:
    if len(ds) == 0:
        raise ValueError("cannot index an empty dataset")
    if config.asymmetric:
        scaled = scale_dataset(ds, config.transform)
        X = transform_p(scaled.base.vectors, config.transform)
        factor = scaled.scale_factor
    else:
        X = ds.vectors
        factor = 1.0
    K, L = config.K, config.L

    def one_table(l):
        bank = sample_bank(X.shape[1], config.r, config.seed, K, l)
        return bank, _group(mix_keys(bank.hash(X)), ds.ids)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            built = list(pool.map(one_table, range(L)))
    else:
        built = [one_table(l) for l in range(L)]
    bank = HashBank(
        np.concatenate([b.A for b, _ in built]),
        np.concatenate([b.b for b, _ in built]),
        float(config.r),
    )
    return AlshIndex(config, bank, [t for _, t in built], ds.dim, len(ds), factor, ds)


def _query_vector(idx: AlshIndex, q) -> np.ndarray:
    q = as_vector(q, "query")
    if q.shape[0] != idx.dim:
        raise ValueError(f"dimension mismatch: query {q.shape[0]} vs index {idx.dim}")
    if idx.config.asymmetric:
        return transform_q(normalize_query(q), idx.config.transform)
    return q


def query_index(idx: AlshIndex, q) -> CandidateSet:
    """Union of the buckets the query falls into across all tables."""
    v = _query_vector(idx, q)
    keys = mix_keys(idx.bank.hash(v).reshape(idx.config.L, idx.config.K))
    hits = [t[int(k)] for t, k in zip(idx.tables, keys) if int(k) in t]
    if not hits:
        return CandidateSet(np.empty(0, dtype=np.int64), 0)
    return CandidateSet(np.unique(np.concatenate(hits)), len(hits))


def rank_candidates(idx: AlshIndex, q, cands: CandidateSet, T: int) -> TopTResult:
    """Exact top-T among the candidates, scored on the original vectors."""
    if idx.dataset is None:
        raise ValueError("index has no attached dataset; use with_dataset()")
    q = as_vector(q, "query")
    if len(cands) == 0:
        return TopTResult(np.empty(0, dtype=np.int64), np.empty(0), T)
    ds = idx.dataset
    pos = ds.positions(cands.ids)
    return top_t_of(ds.ids[pos], ds.vectors[pos] @ q, T)


def suggest_kl(n: int, rho: float, p2: float) -> tuple[int, int]:
    """Textbook choices ``K = ceil(ln n / ln(1/p2))`` and ``L = ceil(n^rho)``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 0.0 < p2 < 1.0:
        raise ValueError("p2 must lie in (0, 1)")
    if not 0.0 < rho < 1.0:
        raise ValueError("rho must lie in (0, 1)")
    K = math.ceil(math.log(n) / math.log(1.0 / p2))
    L = math.ceil(n**rho)
    return max(K, 1), max(L, 1)


def save_index(idx: AlshIndex, path) -> None:
    """Write the little-endian snapshot (header, hash bank, tables)."""
    cfg = idx.config
    t = cfg.transform
    if any(len(ids) and ids.max() > 0xFFFFFFFF for tab in idx.tables for ids in tab.values()):
        raise ValueError("snapshot stores ids as u32")
    parts = [
        _HEADER.pack(
            MAGIC, FORMAT_VERSION, idx.dim, idx.n, cfg.K, cfg.L,
            t.m if t else 0, t.U if t else 0.0, cfg.r, idx.scale_factor,
            cfg.seed.seed, cfg.seed.stream,
        )
    ]
    rows = np.concatenate([idx.bank.A, idx.bank.b[:, None]], axis=1)
    parts.append(rows.astype("<f8").tobytes())
    for table in idx.tables:
        parts.append(struct.pack("<Q", len(table)))
        for key in sorted(table):
            ids = table[key]
            parts.append(struct.pack("<QI", key, len(ids)))
            parts.append(ids.astype("<u4").tobytes())
    Path(path).write_bytes(b"".join(parts))


def load_index(path, dataset: Dataset | None = None) -> AlshIndex:
    buf = Path(path).read_bytes()
    if len(buf) < _HEADER.size:
        raise ValueError(f"truncated snapshot header at byte {len(buf)}")
    magic, version, D, N, K, L, m, U, r, factor, seed, stream = _HEADER.unpack_from(buf, 0)
    if magic != MAGIC:
        raise ValueError("not an ALSH snapshot (bad magic at byte 0)")
    if version != FORMAT_VERSION:
        raise ValueError(f"unsupported snapshot version {version}")
    transform = TransformParams(m, U) if m > 0 else None
    config = IndexConfig(K, L, r, transform, HashSeed(seed, stream))
    dim_t = D + m
    off = _HEADER.size
    nbytes = L * K * (dim_t + 1) * 8
    if len(buf) < off + nbytes:
        raise ValueError(f"truncated hash bank at byte {len(buf)}")
    rows = np.frombuffer(buf, dtype="<f8", count=L * K * (dim_t + 1), offset=off).reshape(L * K, dim_t + 1)
    bank = HashBank(rows[:, :dim_t].astype(np.float64), rows[:, dim_t].astype(np.float64), r)
    off += nbytes
    tables = []
    try:
        for _ in range(L):
            (count,) = struct.unpack_from("<Q", buf, off)
            off += 8
            table = {}
            for _ in range(count):
                key, size = struct.unpack_from("<QI", buf, off)
                off += 12
                if len(buf) < off + 4 * size:
                    raise struct.error("bucket")
                table[key] = np.frombuffer(buf, dtype="<u4", count=size, offset=off).astype(np.int64)
                off += 4 * size
            tables.append(table)
    except struct.error:
        raise ValueError(f"truncated snapshot tables at byte {off}") from None
    if off != len(buf):
        raise ValueError(f"trailing bytes after snapshot at byte {off}")
    idx = AlshIndex(config, bank, tables, D, N, factor, None)
    return idx.with_dataset(dataset) if dataset is not None else idx
