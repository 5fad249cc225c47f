import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pfresample.primitives import (
    adjacent_difference,
    exclusive_prefix_sum,
    inclusive_prefix_sum,
    lower_bound,
    stable_sum,
    vector_sum,
)


def serial_sum_f64(values):
    """Independent oracle: strict left-to-right accumulation in float64."""
    acc = np.float64(0.0)
    for v in values:
        acc += np.float64(v)
    return float(acc)


def lower_bound_linear(W, u):
    """Independent oracle: linear scan for the smallest j with W[j] >= u."""
    for j, val in enumerate(W):
        if val >= u:
            return j
    return len(W) - 1


class TestInclusivePrefixSum:
    def test_small_integers(self):
        np.testing.assert_array_equal(inclusive_prefix_sum([1.0, 2.0, 3.0]), [1.0, 3.0, 6.0])

    def test_singleton(self):
        np.testing.assert_array_equal(inclusive_prefix_sum([5.0]), [5.0])

    def test_float32_tenths_near_one(self):
        w = np.full(10, 0.1, dtype=np.float32)
        expected = serial_sum_f64(w)
        assert abs(float(inclusive_prefix_sum(w)[-1]) - expected) < 1e-6

    def test_preserves_dtype(self):
        assert inclusive_prefix_sum(np.ones(4, dtype=np.float32)).dtype == np.float32
        assert inclusive_prefix_sum(np.ones(4, dtype=np.float64)).dtype == np.float64

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            inclusive_prefix_sum([1.0, np.nan])
        with pytest.raises(ValueError):
            inclusive_prefix_sum([np.inf])


class TestExclusivePrefixSum:
    def test_small_integers(self):
        np.testing.assert_array_equal(exclusive_prefix_sum([1.0, 2.0, 3.0]), [0.0, 1.0, 3.0])

    def test_singleton_is_zero(self):
        np.testing.assert_array_equal(exclusive_prefix_sum([7.0]), [0.0])

    def test_matches_shifted_inclusive_scan_exactly(self):
        rng = np.random.default_rng(1)
        w = rng.random(64, dtype=np.float32)
        incl = inclusive_prefix_sum(w)
        excl = exclusive_prefix_sum(w)
        np.testing.assert_array_equal(excl[1:], incl[:-1])
        assert excl[0] == 0.0


class TestAdjacentDifference:
    def test_inverse_of_scan(self):
        np.testing.assert_array_equal(adjacent_difference([1.0, 3.0, 6.0]), [1.0, 2.0, 3.0])

    def test_singleton(self):
        np.testing.assert_array_equal(adjacent_difference([4.0]), [4.0])

    def test_integer_round_trip_exact(self):
        rng = np.random.default_rng(2)
        o = rng.integers(0, 50, size=256).astype(np.float32)
        np.testing.assert_array_equal(adjacent_difference(inclusive_prefix_sum(o)), o)

    @given(st.lists(st.floats(min_value=0.0, max_value=1e6), min_size=1, max_size=200))
    @settings(max_examples=100, deadline=None)
    def test_round_trip_within_4ulp(self, values):
        w = np.asarray(values, dtype=np.float64)
        W = inclusive_prefix_sum(w)
        back = adjacent_difference(W)
        prev = np.concatenate(([np.float64(0.0)], W[:-1]))
        tol = 4.0 * np.spacing(np.maximum(np.abs(W), np.abs(prev)))
        assert np.all(np.abs(back - w) <= tol)


class TestSums:
    def test_small_integers(self):
        assert vector_sum([1.0, 2.0, 3.0]) == 6.0

    def test_zeros(self):
        assert vector_sum([0.0, 0.0, 0.0]) == 0.0

    def test_scan_consistency_bit_exact(self):
        rng = np.random.default_rng(3)
        w = rng.random(1000, dtype=np.float32)
        assert vector_sum(w) == inclusive_prefix_sum(w)[-1]

    def test_stable_sum_million_uniforms_float32(self):
        rng = np.random.default_rng(4)
        w = rng.random(10**6, dtype=np.float32)
        oracle = serial_sum_f64(w.astype(np.float64))
        assert abs(float(stable_sum(w)) - oracle) / oracle < 1e-4

    def test_stable_sum_trivial(self):
        assert stable_sum([1.0, 2.0, 3.0, 4.0]) == 10.0
        assert stable_sum([3.25]) == 3.25

    def test_stable_sum_adversarial_float32(self):
        w = np.concatenate(([2.0**24], np.ones(4096))).astype(np.float32)
        naive = vector_sum(w)
        stable = stable_sum(w)
        oracle = serial_sum_f64(w.astype(np.float64))
        assert float(naive) == 2.0**24  # every +1 is absorbed
        assert float(stable) >= float(naive)
        assert abs(float(stable) - oracle) < abs(float(naive) - oracle)

    def test_stable_sum_permutation_invariant_on_integers(self):
        rng = np.random.default_rng(5)
        w = rng.integers(0, 100, size=321).astype(np.float32)
        shuffled = w.copy()
        rng.shuffle(shuffled)
        assert stable_sum(w) == stable_sum(shuffled)


class TestLowerBound:
    def test_before_first(self):
        assert lower_bound(np.array([1.0, 3.0, 6.0, 10.0]), 0.5) == 0

    def test_tie_inserts_before_equal(self):
        assert lower_bound(np.array([1.0, 3.0, 6.0, 10.0]), 3.0) == 1

    def test_near_end(self):
        assert lower_bound(np.array([1.0, 3.0, 6.0, 10.0]), 9.99) == 3

    def test_vectorized_queries(self):
        W = np.array([1.0, 2.0, 3.0, 4.0])
        np.testing.assert_array_equal(lower_bound(W, np.array([0.5, 1.5, 2.5, 3.5])), [0, 1, 2, 3])

    @given(st.integers(min_value=1, max_value=64), st.integers(min_value=0, max_value=2**32 - 1))
    @settings(max_examples=200, deadline=None)
    def test_agrees_with_linear_scan(self, n, seed):
        rng = np.random.default_rng(seed)
        W = np.cumsum(rng.random(n))
        # probe between, at, and just off every element
        queries = [u for v in W[:-1] for u in (v, np.nextafter(v, 0.0), np.nextafter(v, np.inf))]
        queries += [0.0, W[-1] * 0.999999]
        for u in queries:
            if u >= W[-1]:
                continue
            assert lower_bound(W, u) == lower_bound_linear(W, u)
