import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from magr.errors import ParameterError
from magr.harness import (
    ExperimentConfig,
    matched_original,
    pairwise_matrix,
    run_experiment,
    run_realization,
)
from magr.measures import MeasureSpec, estimate
from magr.series import GappySeries
from magr.systems import SystemSpec, generate

SMALL = ExperimentConfig(
    SystemSpec("mvar", 300),
    MeasureSpec("cc"),
    gap_percentages=(10, 30),
    realizations=4,
)


def test_deterministic():
    a = run_experiment(SMALL)
    b = run_experiment(SMALL)
    assert a.records == b.records
    assert a.to_csv() == b.to_csv()


def test_parallel_matches_serial():
    assert run_experiment(SMALL, n_jobs=2).records == run_experiment(SMALL).records


def test_gap_percentage_does_not_change_trajectory():
    # the clean-pair measure for fills is the same at every percentage
    recs = [r for r in run_realization(SMALL, 0) if r.method == "LI"]
    assert len({r.original for r in recs}) == 1


def test_matched_original_lengths():
    x, y = generate(SystemSpec(n=200, seed=1))
    spec = MeasureSpec("cc")
    assert matched_original(x, y, "LI", spec, 50).effective_n == 200
    assert matched_original(x, y, "GC", spec, 50).effective_n == 150
    assert matched_original(x, y, "MAGR", spec, 30).effective_n == 170
    head = estimate(x.head(170), y.head(170), spec).value
    assert matched_original(x, y, "MAGR", spec, 30).value == head


def test_magr_without_removal_has_zero_d():
    x, y = generate(SystemSpec(n=300, seed=2))
    spec = MeasureSpec("te")
    assert estimate(x, y, spec).value == matched_original(x, y, "MAGR", spec, 0).value


@pytest.mark.parametrize("m", [1, 2])
def test_effective_n_accounting(m):
    cfg = ExperimentConfig(
        SystemSpec("mvar", 1500), MeasureSpec("te", m=m), ("MAGR",), gap_percentages=(10,), realizations=1
    )
    x, y = generate(SystemSpec("mvar", 1500, seed=0))
    for rec in run_realization(cfg, 0):
        assert rec.ok
        n_r = 1500 - 1 - (m - 1) - rec.effective_n
        assert 0 < n_r <= m * 150 + (m + 1) * 150
        assert rec.original == matched_original(x, y, "MAGR", cfg.measure, n_r).value


def test_failed_cells_are_recorded():
    # 45 % single gaps leave too few complete TE rows at m=4 on N=100
    cfg = ExperimentConfig(
        SystemSpec("mvar", 100), MeasureSpec("te", m=4), ("MAGR", "LI"), gap_percentages=(45,), realizations=3
    )
    stats = run_experiment(cfg)
    cell = stats["MAGR", 45]
    assert cell.n_failed == 3 and cell.n_success == 0
    assert math.isnan(cell.mean_d)
    assert all("InsufficientDataError" in e for e in cell.errors)
    assert cell.mean_effective_n > 0
    # filled series keep every row but are too short for 9-D neighbourhoods
    assert list(stats["LI", 45].errors) == ["UndefinedMeasureError: correlation sum(s) vanished at r=0.2: future_x_y, x_y"]


def test_csv_summary():
    text = run_experiment(SMALL).to_csv()
    lines = text.splitlines()
    assert lines[0] == "method,gap_pct,mean_d,std_d,mean_effective_n,n_success"
    assert len(lines) == 1 + 7 * 2
    assert lines[1].startswith("MAGR,10,")


def test_config_validation():
    with pytest.raises(ParameterError):
        ExperimentConfig(realizations=0)
    with pytest.raises(ParameterError):
        ExperimentConfig(gap_percentages=(0,))
    with pytest.raises(ParameterError):
        ExperimentConfig(methods=("MAGR", "KNN"))


def test_gap_count_rounding():
    cfg = ExperimentConfig(SystemSpec(n=1500))
    assert [cfg.gap_count(p) for p in (5, 20, 50)] == [75, 300, 750]


@settings(max_examples=5, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from([10, 25, 40]), st.sampled_from(["cc", "cmi"]))
def test_magr_unbiased(base_seed, pct, kind):
    """Mean MAGR d-measure stays within three standard errors of zero."""
    cfg = ExperimentConfig(
        SystemSpec("mvar", 500),
        MeasureSpec(kind),
        ("MAGR",),
        gap_percentages=(pct,),
        realizations=20,
        base_seed=base_seed,
    )
    cell = run_experiment(cfg)["MAGR", pct]
    se = cell.std_d / math.sqrt(cell.n_success)
    assert abs(cell.mean_d) <= 3 * se + 1e-12


class TestPairwise:
    def series(self):
        rng = np.random.default_rng(0)
        base = rng.standard_normal((4, 400))
        base[1] += base[0]
        out = []
        for row in base:
            present = rng.random(400) > 0.1
            out.append(GappySeries(row, present=present))
        return out

    def test_cc_symmetric_unit_diagonal(self):
        res = pairwise_matrix(self.series(), MeasureSpec("cc"), list("abcd"))
        assert not res.directed
        assert np.allclose(np.diag(res.values), 1.0)
        assert np.array_equal(res.values, res.values.T)
        assert res.values[0, 1] > 0.5
        assert res.to_csv().splitlines()[0] == ",a,b,c,d"

    def test_te_directed_without_diagonal(self):
        res = pairwise_matrix(self.series()[:3], MeasureSpec("te"))
        assert res.directed
        assert all(res.errors[i, i] == "not applicable" for i in range(3))
        assert np.isnan(np.diag(res.values)).all()
        text = res.to_csv()
        assert text.startswith("# rows drive columns\n")
        assert "NA" in text

    def test_needs_two_equal_series(self):
        with pytest.raises(ParameterError):
            pairwise_matrix([GappySeries(np.zeros(10))])
        with pytest.raises(ParameterError):
            pairwise_matrix([GappySeries(np.zeros(10)), GappySeries(np.zeros(11))])

    def test_to_file(self, tmp_path):
        res = pairwise_matrix(self.series(), MeasureSpec("cc"))
        buf = io.StringIO()
        res.to_csv(buf)
        res.to_csv(tmp_path / "m.csv")
        assert buf.getvalue() == (tmp_path / "m.csv").read_text()
