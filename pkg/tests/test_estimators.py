import numpy as np
import pytest

from tailgini import (
    DegenerateTailError,
    empirical_var,
    gmd,
    semi_variance,
    tail_gini,
    tail_sd,
    tail_stats,
    tail_subset,
    tail_variance,
    tce,
)


def pairwise_gmd(x):
    """O(n^2) oracle: mean absolute difference over ordered pairs i != j."""
    x = np.asarray(x, float)
    n = len(x)
    total = sum(abs(x[i] - x[j]) for i in range(n) for j in range(n))
    return total / (n * (n - 1))


class TestEmpiricalVar:
    def test_order_statistic(self):
        assert empirical_var([1, 2, 3, 4, 5], 0.4) == 2

    def test_order_invariance(self):
        assert empirical_var([5, 4, 3, 2, 1], 0.4) == 2

    def test_known_discrete_margin(self):
        assert empirical_var([-1, 1, 3, 5, 7], 0.8) == 5

    def test_bad_level(self):
        with pytest.raises(ValueError):
            empirical_var([1, 2], 0.0)
        with pytest.raises(ValueError):
            empirical_var([1, 2], 1.0)


class TestTailSubset:
    def test_strict_cut(self):
        _, vals = tail_subset([1, 2, 3, 4, 5], 0.8)
        assert sorted(vals) == [1, 2, 3]

    def test_known_discrete_margin(self):
        _, vals = tail_subset([-1, 1, 3, 5, 7], 0.8)
        assert sorted(vals) == [-1, 1, 3]

    def test_empty_tail_errors(self):
        with pytest.raises(DegenerateTailError):
            tail_subset([1, 2, 3, 4, 5], 0.2)

    def test_constant_series_errors(self):
        with pytest.raises(DegenerateTailError):
            tail_subset([2.0] * 10, 0.5)


class TestTce:
    def test_mean_of_tail(self):
        assert tce([1, 2, 3, 4, 5], 0.8) == 2

    def test_hand_mean(self):
        assert tce([-2, -1, 0, 1, 2], 0.8) == pytest.approx(-1.0)

    def test_constant_errors(self):
        with pytest.raises(DegenerateTailError):
            tce([3.0, 3.0, 3.0], 0.9)


class TestTailVariance:
    def test_hand_value(self):
        assert tail_variance([1, 2, 3, 4, 5], 0.8) == pytest.approx(2 / 3)
        assert tail_sd([1, 2, 3, 4, 5], 0.8) == pytest.approx(np.sqrt(2 / 3))

    def test_equal_tail_values(self):
        assert tail_variance([1, 1, 1, 5, 9], 0.8) == 0

    def test_affine_equivariance(self):
        rng = np.random.default_rng(5)
        x = rng.normal(size=200)
        a, b = 3.0, 2.5
        assert tail_variance(a + b * x, 0.2) == pytest.approx(b**2 * tail_variance(x, 0.2), rel=1e-12)
        assert tail_sd(a + b * x, 0.2) == pytest.approx(b * tail_sd(x, 0.2), rel=1e-12)


class TestSemiVariance:
    def test_hand_value(self):
        assert semi_variance([1, 2, 3], 2.0) == pytest.approx(1 / 3)

    def test_benchmark_below_min(self):
        assert semi_variance([1, 2, 3], 0.5) == 0

    def test_zero_benchmark(self):
        assert semi_variance([-1, 1], 0.0) == pytest.approx(0.5)


class TestGmd:
    def test_hand_values(self):
        assert gmd([1, 2, 3]) == pytest.approx(4 / 3, rel=1e-12)
        assert gmd([0, 1]) == pytest.approx(1.0, rel=1e-12)

    def test_constant_is_zero(self):
        assert gmd([7.0] * 6) == 0

    def test_matches_pairwise_oracle(self):
        rng = np.random.default_rng(42)
        for _ in range(200):
            n = rng.integers(2, 51)
            x = rng.normal(scale=rng.uniform(0.1, 10), size=n)
            assert gmd(x) == pytest.approx(pairwise_gmd(x), rel=1e-12)

    def test_translation_invariance(self):
        rng = np.random.default_rng(9)
        x = rng.normal(size=60)
        assert gmd(x + 17.5) == pytest.approx(gmd(x), rel=1e-12, abs=1e-12)

    def test_scale_equivariance(self):
        rng = np.random.default_rng(10)
        x = rng.normal(size=60)
        assert gmd(3.5 * x) == pytest.approx(3.5 * gmd(x), rel=1e-12)

    def test_permutation_invariance(self):
        rng = np.random.default_rng(11)
        x = rng.normal(size=40)
        assert gmd(rng.permutation(x)) == gmd(x)


class TestTailGini:
    def test_equals_gmd_of_subset(self):
        assert tail_gini([1, 2, 3, 4, 5], 0.8) == pytest.approx(4 / 3, rel=1e-12)

    def test_equals_gmd_of_subset_random(self):
        rng = np.random.default_rng(77)
        checked = 0
        while checked < 100:
            n = int(rng.integers(10, 200))
            p = float(rng.uniform(0.05, 0.95))
            x = rng.normal(size=n)
            try:
                _, tail = tail_subset(x, p)
            except DegenerateTailError:
                continue
            assert tail_gini(x, p) == gmd(tail)
            checked += 1

    def test_equal_tail_values(self):
        assert tail_gini([1, 1, 1, 5, 9], 0.8) == 0

    def test_translation_and_scale(self):
        rng = np.random.default_rng(13)
        x = rng.normal(size=300)
        assert tail_gini(x + 4.0, 0.25) == pytest.approx(tail_gini(x, 0.25), rel=1e-12)
        assert tail_gini(2.5 * x, 0.25) == pytest.approx(2.5 * tail_gini(x, 0.25), rel=1e-12)


def test_tce_below_var_property():
    rng = np.random.default_rng(21)
    for _ in range(50):
        x = rng.normal(size=int(rng.integers(20, 100)))
        p = float(rng.uniform(0.1, 0.9))
        try:
            v = empirical_var(x, p)
            assert tce(x, p) < v
        except DegenerateTailError:
            pass


def test_tail_stats_consistency():
    rng = np.random.default_rng(33)
    x = rng.normal(size=500)
    st = tail_stats(x, 0.1, asset="demo")
    assert st.sd == pytest.approx(np.sqrt(st.tv))
    assert st.gmd >= 0 and st.tail_gini >= 0
    assert st.tce <= st.var
    assert st.tail_count == len(tail_subset(x, 0.1)[1])
    assert st.mean == pytest.approx(x.mean())
    assert st.std == pytest.approx(x.std(ddof=1))
