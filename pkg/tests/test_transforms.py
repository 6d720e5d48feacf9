import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from alsh.core import Dataset, brute_force_top_t
from alsh.transforms import (
    TransformParams,
    normalize_query,
    scale_dataset,
    transform_p,
    transform_q,
    transformed_distance_sq,
)


def coordinatewise(q, x, params):
    return float(np.sum((transform_q(q, params) - transform_p(x, params)) ** 2))


def test_params_invariants():
    with pytest.raises(ValueError):
        TransformParams(m=0)
    with pytest.raises(ValueError):
        TransformParams(U=1.0)
    with pytest.raises(ValueError):
        TransformParams(U=0.0)
    assert TransformParams(3, 0.83).error_bound == pytest.approx(0.83**16, rel=1e-14)


def test_scale_dataset_shrinks_to_bound(rng):
    X = rng.standard_normal((50, 5))
    X *= 2.0 / np.linalg.norm(X, axis=1).max()
    s = scale_dataset(Dataset.from_array(X), TransformParams(3, 0.83))
    assert s.scale_factor == pytest.approx(2 / 0.83, rel=1e-12)
    assert np.linalg.norm(s.base.vectors, axis=1).max() <= 0.83 + 1e-12
    assert s.base.max_norm == pytest.approx(0.83, abs=1e-12)


def test_scale_dataset_noop_when_within_bound(rng):
    X = rng.standard_normal((10, 3))
    X *= 0.5 / np.linalg.norm(X, axis=1).max()
    s = scale_dataset(Dataset.from_array(X), TransformParams())
    assert s.scale_factor == 1.0
    assert np.array_equal(s.base.vectors, X)


def test_scale_dataset_errors():
    with pytest.raises(ValueError):
        scale_dataset(Dataset.from_array(np.zeros((3, 2))), TransformParams())
    with pytest.raises(ValueError):
        scale_dataset(Dataset.from_array(np.empty((0, 2))), TransformParams())


def test_scale_preserves_argmax(rng, hetero_ds):
    scaled = scale_dataset(hetero_ds, TransformParams()).base
    for _ in range(100):
        q = rng.standard_normal(10)
        assert brute_force_top_t(q, hetero_ds, 1).ids[0] == brute_force_top_t(q, scaled, 1).ids[0]


def test_normalize_query(rng):
    assert np.allclose(normalize_query([3, 4]), [0.6, 0.8], rtol=0, atol=1e-15)
    u = np.array([0.0, 1.0, 0.0])
    assert np.allclose(normalize_query(u), u, rtol=0, atol=1e-15)
    q = rng.standard_normal(25) * 40
    assert abs(np.linalg.norm(normalize_query(q)) - 1) <= 1e-12
    with pytest.raises(ValueError):
        normalize_query([0.0, 0.0])


def test_transform_p_examples():
    p = TransformParams(m=2, U=0.83)
    assert np.allclose(transform_p([0.6, 0.0], p), [0.6, 0.0, 0.36, 0.1296], rtol=0, atol=1e-15)
    assert np.array_equal(transform_p(np.zeros(4), TransformParams(3)), np.zeros(7))
    with pytest.raises(ValueError):
        transform_p([1.5, 0.0], p)


def test_transform_p_norm_identity(rng):
    p = TransformParams(m=3)
    for _ in range(50):
        x = rng.standard_normal(8)
        x *= rng.uniform(0, 0.83) / np.linalg.norm(x)
        n = np.linalg.norm(x)
        expected = sum(n ** (2**i) for i in range(1, p.m + 2))
        assert np.sum(transform_p(x, p) ** 2) == pytest.approx(expected, rel=1e-12)


def test_transform_p_batch_matches_rows(rng):
    X = rng.standard_normal((5, 3)) * 0.2
    p = TransformParams(4)
    assert np.array_equal(transform_p(X, p), np.stack([transform_p(x, p) for x in X]))


def test_transform_q_examples():
    assert transform_q([1.0, 0.0], TransformParams(3)).tolist() == [1, 0, 0.5, 0.5, 0.5]
    q = normalize_query([1.0, 2.0, 2.0])
    assert np.sum(transform_q(q, TransformParams(4)) ** 2) == pytest.approx(2.0, abs=1e-14)


def test_transformed_distance_examples():
    p = TransformParams(m=2)
    # frozen from 1.5 - 1.2 + 0.6**8 and from ||[0.4, 0, 0.14, 0.3704]||^2
    assert transformed_distance_sq([1.0, 0.0], [0.6, 0.0], p) == pytest.approx(0.31679616, abs=1e-14)
    assert coordinatewise(np.array([1.0, 0.0]), np.array([0.6, 0.0]), p) == pytest.approx(0.31679616, abs=1e-14)
    assert transformed_distance_sq([0.0, 1.0], [0.0, 0.0], TransformParams(5)) == pytest.approx(1 + 5 / 4)


@settings(max_examples=200)
@given(st.integers(1, 6), st.integers(1, 12), st.floats(0.0, 0.83), st.integers(0, 2**32 - 1))
def test_key_equality_property(m, d, norm, seed):
    r = np.random.default_rng(seed)
    params = TransformParams(m, 0.83)
    q = normalize_query(r.standard_normal(d) + 1e-3)
    x = r.standard_normal(d)
    x *= norm / np.linalg.norm(x)
    assert abs(transformed_distance_sq(q, x, params) - coordinatewise(q, x, params)) <= 1e-9


def test_error_term_bound(rng, hetero_ds):
    p = TransformParams(3, 0.83)
    s = scale_dataset(hetero_ds, p)
    err = np.linalg.norm(s.base.vectors, axis=1) ** (2 ** (p.m + 1))
    assert np.all(err >= 0) and np.all(err <= p.error_bound * (1 + 1e-12))


def test_ordering_preservation_small(rng, hetero_ds):
    p = TransformParams(3, 0.83)
    X = scale_dataset(hetero_ds, p).base.vectors
    q = normalize_query(rng.standard_normal(10))
    ip = X @ q
    dist = transformed_distance_sq(q, X, p)
    gap = ip[:, None] - ip[None, :]
    mask = gap > p.error_bound / 2
    assert mask.any()
    assert np.all((dist[:, None] < dist[None, :])[mask])
