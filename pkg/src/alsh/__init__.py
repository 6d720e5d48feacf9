"""Asymmetric LSH for sublinear-time maximum inner product search."""

from .core import Dataset, TopTResult, brute_force_top_t, inner_product, l2_norm
from .index import AlshIndex, CandidateSet, IndexConfig, build_index, load_index, query_index, rank_candidates, save_index
from .l2lsh import HashSeed, L2HashFunction, collision_probability, hash_value, sample_hash
from .theory import MipsInstance, RhoSearchResult, recommended_params, rho, rho_star
from .transforms import TransformParams, normalize_query, scale_dataset, transform_p, transform_q

__version__ = "0.1.0"

__all__ = [
    "AlshIndex", "CandidateSet", "Dataset", "HashSeed", "IndexConfig", "L2HashFunction", "MipsInstance",
    "RhoSearchResult", "TopTResult", "TransformParams", "brute_force_top_t", "build_index",
    "collision_probability", "hash_value", "inner_product", "l2_norm", "load_index", "normalize_query",
    "query_index", "rank_candidates", "recommended_params", "rho", "rho_star", "sample_hash", "save_index",
    "scale_dataset", "transform_p", "transform_q",
]
