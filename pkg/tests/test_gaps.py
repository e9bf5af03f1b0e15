import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from magr.errors import FeasibilityError, InputError, InsufficientDataError, ParameterError
from magr.gaps import (
    FILLERS,
    TREATMENTS,
    GapPlan,
    close_pair,
    fill_cubic,
    fill_linear,
    fill_nearest,
    fill_spline,
    fill_stochastic,
    gap_closure,
    inject_gaps,
)
from magr.series import GappySeries


def natural_spline_oracle(t, v, grid):
    """Natural cubic spline from the tridiagonal second-derivative system."""
    t, v = np.asarray(t, float), np.asarray(v, float)
    n = len(t)
    h = np.diff(t)
    a = np.zeros((n, n))
    rhs = np.zeros(n)
    a[0, 0] = a[-1, -1] = 1.0
    for i in range(1, n - 1):
        a[i, i - 1], a[i, i], a[i, i + 1] = h[i - 1], 2 * (h[i - 1] + h[i]), h[i]
        rhs[i] = 6 * ((v[i + 1] - v[i]) / h[i] - (v[i] - v[i - 1]) / h[i - 1])
    mom = np.linalg.solve(a, rhs)
    out = []
    for s in grid:
        k = min(max(np.searchsorted(t, s) - 1, 0), n - 2)
        u0, u1 = t[k + 1] - s, s - t[k]
        out.append(
            mom[k] * u0**3 / (6 * h[k]) + mom[k + 1] * u1**3 / (6 * h[k])
            + (v[k] / h[k] - mom[k] * h[k] / 6) * u0 + (v[k + 1] / h[k] - mom[k + 1] * h[k] / 6) * u1
        )
    return np.array(out)


def gap_runs(series):
    """(start, length) of each run of absent samples."""
    absent = np.concatenate([[False], ~series.present, [False]]).astype(int)
    edges = np.diff(absent)
    starts, stops = np.flatnonzero(edges == 1), np.flatnonzero(edges == -1)
    return list(zip(starts, stops - starts))


class TestInjection:
    def test_single_count(self):
        out = inject_gaps(np.zeros(1500), GapPlan("single", 750, seed=1))
        assert out.gap_count == 750

    def test_fixed_blocks_count_and_size(self):
        out = inject_gaps(np.zeros(1500), GapPlan("fixed_block", 300, block_size=10, seed=2))
        runs = gap_runs(out)
        assert out.gap_count == 300
        assert [length for _, length in runs] == [10] * 30

    def test_fixed_block_remainder(self):
        out = inject_gaps(np.zeros(200), GapPlan("fixed_block", 25, block_size=10, seed=3))
        assert sorted(length for _, length in gap_runs(out)) == [5, 10, 10]

    def test_reproducible(self):
        plan = GapPlan("varying_block", 300, seed=42)
        assert inject_gaps(np.arange(1500.0), plan) == inject_gaps(np.arange(1500.0), plan)
        other = GapPlan("varying_block", 300, seed=43)
        assert inject_gaps(np.arange(1500.0), plan) != inject_gaps(np.arange(1500.0), other)

    def test_zero_gaps_is_identity(self):
        s = GappySeries(np.arange(5.0))
        assert inject_gaps(s, GapPlan()) == s

    def test_values_preserved(self):
        data = np.random.default_rng(0).standard_normal(100)
        out = inject_gaps(data, GapPlan("single", 30, seed=0))
        assert np.array_equal(out.observed(), data[out.present])

    def test_errors(self):
        with pytest.raises(InputError):
            inject_gaps(np.zeros(10), GapPlan("single", 10))
        with pytest.raises(InputError):
            inject_gaps([1.0, None, 2.0], GapPlan("single", 1))
        with pytest.raises(FeasibilityError):
            inject_gaps(np.zeros(20), GapPlan("fixed_block", 15, block_size=5, seed=0))
        with pytest.raises(ParameterError):
            GapPlan("clustered")
        with pytest.raises(ParameterError):
            GapPlan("varying_block", 5, block_range=(4, 2))

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 2**31), st.sampled_from(["fixed_block", "varying_block"]), st.integers(1, 25))
    def test_blocks_never_touch(self, seed, kind, pct):
        n = 500
        g = round(pct / 100 * n)
        out = inject_gaps(np.zeros(n), GapPlan(kind, g, block_size=7, seed=seed))
        assert out.gap_count == g
        runs = gap_runs(out)
        for (s0, l0), (s1, _) in zip(runs, runs[1:]):
            assert s1 > s0 + l0  # at least one present sample between blocks
        if kind == "fixed_block":
            lengths = sorted(length for _, length in runs)
            assert lengths[1:] == [7] * (len(runs) - 1)  # one short block at most
        else:
            # adjacent blocks never merge, so every run is within the range
            assert all(1 <= length <= 15 for _, length in runs)


class TestClosure:
    def test_table1_x(self, table1):
        x, _ = table1
        assert list(gap_closure(x)) == [1, 2, 3, 4, 6, 7, 9, 10]

    def test_pair_truncates_to_shorter(self):
        x = GappySeries([1.0, None, 3.0, 4.0, 5.0])
        y = GappySeries([None, None, 7.0, 8.0, 9.0])
        cx, cy = close_pair(x, y)
        assert list(cx) == [1.0, 3.0, 4.0] and list(cy) == [7.0, 8.0, 9.0]


class TestFills:
    def test_linear_reproduces_line(self):
        x = 2.5 * np.arange(30.0) - 4
        s = GappySeries(x, present=~np.isin(np.arange(30), [3, 4, 5, 17, 22]))
        assert np.allclose(fill_linear(s).data, x, atol=1e-12)

    def test_linear_edges_take_nearest(self):
        assert list(fill_linear([None, None, 1.0, 3.0, None])) == [1.0, 1.0, 1.0, 3.0, 3.0]

    def test_spline_matches_tridiagonal_oracle(self):
        t_all = np.arange(20)
        v_all = np.sin(0.4 * t_all)
        present = ~np.isin(t_all, [4, 9, 10, 15])
        out = fill_spline(GappySeries(v_all, present=present))
        expected = natural_spline_oracle(t_all[present], v_all[present], [4, 9, 10, 15])
        assert np.allclose(out.data[[4, 9, 10, 15]], expected, atol=1e-12)

    def test_cubic_preserves_monotone_data(self):
        v = np.array([0.0, 0.1, None, 0.2, 5.0, None, 5.1, 5.2], dtype=object)
        out = fill_cubic(list(v)).data
        assert np.all(np.diff(out) >= 0)

    def test_nearest_tie_takes_earlier(self):
        assert list(fill_nearest([1.0, None, 3.0])) == [1.0, 1.0, 3.0]
        assert list(fill_nearest([1.0, None, None, 4.0])) == [1.0, 1.0, 4.0, 4.0]
        assert list(fill_nearest([1.0, None, None, None, 5.0])) == [1.0, 1.0, 1.0, 5.0, 5.0]

    def test_stochastic_uses_observed_values(self):
        assert list(fill_stochastic([5.0, None, 5.0], seed=0)) == [5.0, 5.0, 5.0]

    def test_stochastic_donor_mean(self):
        n = 10_000
        data = np.zeros(n + 2)
        data[1] = 1.0
        present = np.zeros(n + 2, dtype=bool)
        present[:2] = True
        out = fill_stochastic(GappySeries(data, present=present), seed=5)
        filled = out.data[2:]
        assert set(np.unique(filled)) <= {0.0, 1.0}
        assert abs(filled.mean() - 0.5) <= 0.02

    def test_stochastic_reproducible(self):
        s = GappySeries([1.0, None, 2.0, None, 3.0])
        assert fill_stochastic(s, seed=3) == fill_stochastic(s, seed=3)

    @pytest.mark.parametrize("name, minimum", [("LI", 2), ("CI", 4), ("SPI", 4), ("NNI", 2)])
    def test_minimum_support(self, name, minimum):
        values = [float(i) for i in range(minimum - 1)] + [None, None]
        with pytest.raises(InsufficientDataError):
            FILLERS[name](values)

    def test_treatment_names(self):
        assert TREATMENTS == ("MAGR", "GC", "LI", "CI", "SPI", "NNI", "STI")

    @settings(max_examples=50, deadline=None)
    @given(st.integers(8, 80), st.integers(0, 2**31), st.sampled_from(sorted(FILLERS)))
    def test_fills_keep_present_bits(self, n, seed, name):
        rng = np.random.default_rng(seed)
        data = rng.standard_normal(n) * 10 ** rng.uniform(-3, 3)
        present = rng.random(n) > 0.3
        if present.sum() < 4:
            return
        s = GappySeries(data, present=present)
        out = FILLERS[name](s)
        assert not out.has_gaps and out.n == n
        assert np.array_equal(out.data[present].view(np.uint64), data[present].view(np.uint64))
        assert np.all(np.isfinite(out.data))
