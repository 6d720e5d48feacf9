import numpy as np
import pytest
from mpmath import mp, mpf, quad
from scipy import stats

from alsh.l2lsh import (
    HashSeed,
    L2HashFunction,
    collision_probability,
    empirical_collision_rate,
    hash_value,
    normal_cdf,
    sample_bank,
    sample_hash,
)

# F_1(1), frozen from the closed form at 30 digits (mpmath) and confirmed by
# numerical integration of the projection-difference density.
F1_AT_1 = 0.36874638037250724


def quadrature_oracle(d, r):
    """Collision probability as an integral over |a.(x - y)| ~ |N(0, d^2)|."""
    mp.dps = 25
    d, r = mpf(d), mpf(r)
    pdf = lambda t: 2 / d * mp.exp(-((t / d) ** 2) / 2) / mp.sqrt(2 * mp.pi)
    return float(quad(lambda t: pdf(t) * (1 - t / r), [0, r]))


def test_sample_hash_is_deterministic():
    a = sample_hash(16, 2.5, HashSeed(3, 1))
    b = sample_hash(16, 2.5, HashSeed(3, 1))
    assert np.array_equal(a.a, b.a) and a.b == b.b
    c = sample_hash(16, 2.5, HashSeed(3, 2))
    assert not np.array_equal(a.a, c.a)


def test_bank_prefix_is_stable():
    big = sample_bank(5, 1.0, HashSeed(9), 40)
    small = sample_bank(5, 1.0, HashSeed(9), 7)
    assert np.array_equal(big.A[:7], small.A)
    assert np.array_equal(big.b[:7], small.b)


def test_projection_moments():
    A = sample_bank(10, 1.0, HashSeed(11), 10_000).A.ravel()
    assert A.size == 100_000
    assert abs(A.mean()) < 0.02
    assert abs(A.var() - 1) < 0.05


def test_offsets_uniform():
    b = sample_bank(1, 2.5, HashSeed(12), 100_000).b
    assert b.min() >= 0 and b.max() < 2.5
    assert stats.kstest(b, stats.uniform(0, 2.5).cdf).statistic < 0.01


def test_hash_value_examples():
    assert hash_value(L2HashFunction(np.array([1.0, 0.0]), 0.3, 1.0), [2.5, 7.0]) == 2
    h = L2HashFunction(np.array([0.4, -1.3]), 0.7, 1.0)
    assert hash_value(h, [0.0, 0.0]) == 0
    assert hash_value(L2HashFunction(np.array([1.0]), 0.1, 1.0), [-0.5]) == -1
    with pytest.raises(ValueError):
        hash_value(h, [1.0])


def test_hash_function_invariants():
    with pytest.raises(ValueError):
        L2HashFunction(np.ones(2), 1.0, 1.0)
    with pytest.raises(ValueError):
        L2HashFunction(np.ones(2), 0.0, 0.0)


def test_bank_hash_matches_scalar(rng):
    bank = sample_bank(6, 1.7, HashSeed(4), 12)
    X = rng.standard_normal((9, 6)) * 3
    H = bank.hash(X)
    for i, x in enumerate(X):
        assert [hash_value(bank[j], x) for j in range(12)] == H[i].tolist()


def test_normal_cdf_accuracy():
    mp.dps = 30
    for x in (-8.0, -3.3, -1.0, 0.0, 0.4, 2.0, 6.0):
        assert abs(normal_cdf(x) - float(mp.ncdf(x))) <= 1e-10


@pytest.mark.parametrize("d,r", [(1, 1), (0.5, 2.5), (3, 1), (0.2, 4.0), (2.0, 2.5)])
def test_collision_probability_vs_quadrature(d, r):
    assert collision_probability(d, r) == pytest.approx(quadrature_oracle(d, r), abs=1e-10)


def test_collision_probability_values():
    assert collision_probability(1.0, 1.0) == pytest.approx(F1_AT_1, abs=1e-12)
    assert collision_probability(1e-9, 2.5) == pytest.approx(1.0, abs=1e-8)
    with pytest.raises(ValueError):
        collision_probability(0.0, 1.0)
    with pytest.raises(ValueError):
        collision_probability(1.0, -1.0)


def test_collision_probability_monotone_and_ratio():
    d = np.round(np.arange(0.1, 5.01, 0.1), 10)
    for r in (0.5, 1.0, 2.5, 5.0):
        assert np.all(np.diff(collision_probability(d, r)) < 0)
    for k in (0.5, 2.0, 10.0):
        assert collision_probability(d, 2.5) == pytest.approx(collision_probability(k * d, k * 2.5), abs=1e-12)


PAIRS = [(0.3, 1.0), (1.0, 1.0), (2.0, 1.0), (4.0, 1.0), (0.5, 2.5),
         (1.0, 2.5), (2.0, 2.5), (3.0, 2.5), (1.0, 5.0), (6.0, 5.0)]


@pytest.mark.parametrize("i,d,r", [(i, d, r) for i, (d, r) in enumerate(PAIRS)])
def test_empirical_rate_within_three_se(i, d, r):
    x = np.zeros(4)
    y = np.array([d, 0.0, 0.0, 0.0])
    p = collision_probability(d, r)
    rate, _ = empirical_collision_rate(x, y, r, 50_000, HashSeed(100, i))
    assert abs(rate - p) <= 3 * np.sqrt(p * (1 - p) / 50_000)
