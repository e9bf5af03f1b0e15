"""
Monte-Carlo evaluation of gap treatments.

For every realization a clean pair is generated, gaps are injected into
each series independently, and every treatment is scored by the
d-measure: the measure on the treated data minus the measure on the clean
data of matching size. The matching size is

* N for the filling methods,
* N - g for gap closure,
* N - N_r for MAGR, where N_r is the number of joint-matrix rows it
  removed (the clean series are truncated to their first N - N_r samples).

Seeds are derived from ``base_seed + realization``; gap positions use a
stream separate from the system generator, so changing the gap percentage
leaves the trajectories unchanged.
"""

import csv
import io
import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import InsufficientDataError, MagrError, ParameterError
from .gaps import FILLERS, TREATMENTS, GapPlan, close_pair, inject_gaps
from .measures import MeasureSpec, estimate
from .series import magr_filter
from .systems import SystemSpec, generate

__all__ = [
    "ExperimentConfig",
    "Record",
    "CellStats",
    "ExperimentStats",
    "matched_original",
    "run_realization",
    "run_experiment",
    "length_sweep",
    "PairwiseMatrix",
    "pairwise_matrix",
    "surrogate_values",
]

DEFAULT_GAP_PERCENTAGES = tuple(range(5, 55, 5))

_GAP_STREAM = 1
_STI_STREAM = 2


@dataclass(frozen=True)
class ExperimentConfig:
    """
    One sweep over gap percentages.

    ``gap_plan`` is a template: its ``g`` and ``seed`` are overwritten per
    series, realization and gap percentage.
    """

    system: SystemSpec = SystemSpec()
    measure: MeasureSpec = MeasureSpec()
    methods: tuple = TREATMENTS
    gap_plan: GapPlan = GapPlan()
    gap_percentages: tuple = DEFAULT_GAP_PERCENTAGES
    realizations: int = 50
    base_seed: int = 0

    def __post_init__(self):
        if self.realizations < 1:
            raise ParameterError("need at least one realization")
        for p in self.gap_percentages:
            if not 0 < p < 100:
                raise ParameterError(f"gap percentage must lie in (0, 100), got {p}")
        unknown = set(self.methods) - set(TREATMENTS)
        if unknown:
            raise ParameterError(f"unknown methods: {sorted(unknown)}")

    def gap_count(self, pct):
        return int(round(pct / 100.0 * self.system.n))


@dataclass(frozen=True)
class Record:
    """Outcome of one (realization, method, gap percentage) cell."""

    realization: int
    method: str
    gap_pct: float
    treated: float = math.nan
    original: float = math.nan
    effective_n: int = 0
    error: str | None = None

    @property
    def ok(self):
        return self.error is None

    @property
    def d(self):
        return self.treated - self.original


@dataclass(frozen=True)
class CellStats:
    """
    Summary of one (method, gap percentage) cell.

    Means and standard deviations of the measure run over the successful
    realizations only; ``mean_effective_n`` also includes failed ones whose
    row count is known (MAGR records it even when the estimator fails).
    """

    method: str
    gap_pct: float
    mean_d: float
    std_d: float
    mean_treated: float
    std_treated: float
    mean_original: float
    mean_effective_n: float
    n_success: int
    n_failed: int
    errors: dict = field(default_factory=dict)


def _std(a):
    return float(np.std(a, ddof=1)) if len(a) > 1 else 0.0


def _aggregate(method, pct, records):
    good = [r for r in records if r.ok]
    errors = dict(Counter(r.error for r in records if not r.ok))
    counted = [r.effective_n for r in records if r.effective_n > 0]
    mean_n = float(np.mean(counted)) if counted else math.nan
    if not good:
        nan = math.nan
        return CellStats(method, pct, nan, nan, nan, nan, nan, mean_n, 0, len(records), errors)
    d = np.array([r.d for r in good])
    treated = np.array([r.treated for r in good])
    return CellStats(
        method,
        pct,
        float(d.mean()),
        _std(d),
        float(treated.mean()),
        _std(treated),
        float(np.mean([r.original for r in good])),
        mean_n,
        len(good),
        len(records) - len(good),
        errors,
    )


class ExperimentStats:
    """
    Per-(method, gap percentage) summaries plus the raw per-cell records.

    Index with ``stats[method, gap_pct]`` to get a :class:`CellStats`.
    """

    CSV_COLUMNS = ("method", "gap_pct", "mean_d", "std_d", "mean_effective_n", "n_success")

    def __init__(self, config, records):
        self.config = config
        self.records = sorted(records, key=lambda r: (r.gap_pct, config.methods.index(r.method), r.realization))
        groups = {}
        for r in self.records:
            groups.setdefault((r.method, r.gap_pct), []).append(r)
        self.cells = {
            (m, p): _aggregate(m, p, groups.get((m, p), []))
            for p in config.gap_percentages
            for m in config.methods
        }

    def __getitem__(self, key):
        return self.cells[key]

    def __iter__(self):
        return iter(self.cells.values())

    def series(self, method, attr="mean_d"):
        """``attr`` of ``method`` across the gap percentages, in order."""
        return np.array([getattr(self.cells[method, p], attr) for p in self.config.gap_percentages])

    def to_csv(self, path_or_buf=None, precision=6):
        """Write the summary table; returns the text when no target is given."""
        fmt = (lambda v: repr(float(v))) if precision is None else (lambda v: f"{v:.{precision}g}")
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.CSV_COLUMNS)
        for c in self:
            w.writerow([c.method, f"{c.gap_pct:g}", fmt(c.mean_d), fmt(c.std_d), fmt(c.mean_effective_n), c.n_success])
        text = buf.getvalue()
        if path_or_buf is None:
            return text
        if hasattr(path_or_buf, "write"):
            path_or_buf.write(text)
        else:
            with open(path_or_buf, "w", newline="") as fh:
                fh.write(text)
        return text


def matched_original(x, y, method, measure, removed=0):
    """
    Measure on the clean pair truncated to the size seen by ``method``.

    ``removed`` is N_r for MAGR and g for GC; it is ignored for the
    filling methods, which are compared against the full-length pair.
    """
    n = len(x)
    if method in ("MAGR", "GC"):
        n -= removed
    return estimate(x.head(n), y.head(n), measure)


def _seed(*words):
    return np.random.SeedSequence([int(w) for w in words])


def _pct_key(pct):
    return int(round(pct * 1000))


def _treated_pair(method, gx, gy, sti_seeds):
    """Gap-free pair produced by a closing or filling treatment."""
    if method == "GC":
        return close_pair(gx, gy)
    if method == "STI":
        return tuple(FILLERS["STI"](s, sd) for s, sd in zip((gx, gy), sti_seeds))
    return FILLERS[method](gx), FILLERS[method](gy)


def run_realization(config, index):
    """All records of one realization (every method and gap percentage)."""
    seed = config.base_seed + index
    x, y = generate(replace(config.system, seed=seed))
    n = len(x)
    measure = config.measure
    originals = {}

    def original(method, removed):
        key = (method if method in ("MAGR", "GC") else "fill", removed)
        if key not in originals:
            try:
                originals[key] = matched_original(x, y, method, measure, removed)
            except MagrError as exc:
                originals[key] = exc
        if isinstance(originals[key], MagrError):
            raise originals[key]
        return originals[key]

    records = []
    for pct in config.gap_percentages:
        g = config.gap_count(pct)
        key = _pct_key(pct)
        gx, gy = (
            inject_gaps(s, replace(config.gap_plan, g=g, seed=_seed(seed, _GAP_STREAM, k, key)))
            for k, s in enumerate((x, y))
        )
        sti_seeds = (_seed(seed, _STI_STREAM, 0, key), _seed(seed, _STI_STREAM, 1, key))
        for method in config.methods:
            rows = 0
            try:
                if method == "MAGR":
                    # keep the retained row count even if the estimator fails
                    matrix, n_removed = magr_filter(measure.matrix(gx, gy))
                    rows = matrix.n_rows
                    if rows == 0:
                        raise InsufficientDataError("no complete rows remain after gap removal")
                    treated = measure.evaluate(matrix)
                    orig = original(method, n_removed)
                else:
                    tx, ty = _treated_pair(method, gx, gy, sti_seeds)
                    treated = estimate(tx, ty, measure)
                    orig = original(method, n - len(tx))
            except MagrError as exc:
                records.append(Record(index, method, pct, effective_n=rows, error=f"{type(exc).__name__}: {exc}"))
                continue
            records.append(Record(index, method, pct, treated.value, orig.value, treated.effective_n))
    return records


def _run_one(args):
    return run_realization(*args)


def run_experiment(config, n_jobs=1):
    """
    Run every realization of ``config`` and summarize.

    Parameters
    ----------
    config : ExperimentConfig
    n_jobs : int
        Worker processes; realizations are independent and the result does
        not depend on this value.

    Returns
    -------
    ExperimentStats
    """
    jobs = [(config, i) for i in range(config.realizations)]
    if n_jobs == 1:
        chunks = map(_run_one, jobs)
        records = [r for chunk in chunks for r in chunk]
    else:
        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            records = [r for chunk in pool.map(_run_one, jobs) for r in chunk]
    return ExperimentStats(config, records)


def length_sweep(config, lengths, gap_pct=20, n_jobs=1):
    """Run ``config`` at a single gap percentage for several series lengths."""
    out = {}
    for n in lengths:
        cfg = replace(config, system=replace(config.system, n=n), gap_percentages=(gap_pct,))
        out[n] = run_experiment(cfg, n_jobs=n_jobs)
    return out


@dataclass
class PairwiseMatrix:
    """
    Measure for every ordered pair of series.

    ``values[i, j]`` is the measure with series ``i`` as driver and ``j``
    as response; NaN marks failed or not-applicable cells, whose reason is
    in ``errors``.
    """

    names: list
    values: np.ndarray
    effective_n: np.ndarray
    errors: dict
    directed: bool

    def to_csv(self, path_or_buf=None, precision=6):
        fmt = (lambda v: repr(float(v))) if precision is None else (lambda v: f"{v:.{precision}g}")
        buf = io.StringIO()
        if self.directed:
            buf.write("# rows drive columns\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([""] + list(self.names))
        for name, row in zip(self.names, self.values):
            w.writerow([name] + ["NA" if np.isnan(v) else fmt(v) for v in row])
        text = buf.getvalue()
        if path_or_buf is not None:
            if hasattr(path_or_buf, "write"):
                path_or_buf.write(text)
            else:
                with open(path_or_buf, "w", newline="") as fh:
                    fh.write(text)
        return text


def pairwise_matrix(series, measure=MeasureSpec(), names=None):
    """
    MAGR estimate of ``measure`` on every pair of ``series``.

    Zero-lag correlation measures give a symmetric matrix. Transfer entropy
    (and lagged correlations) give a directed matrix; TE has no diagonal.
    """
    series = list(series)
    k = len(series)
    if k < 2:
        raise ParameterError("need at least two series")
    if len({len(s) for s in series}) != 1:
        raise ParameterError("all series must have the same length")
    names = list(names) if names is not None else [f"s{i}" for i in range(k)]
    directed = measure.kind == "te" or measure.lag != 0
    values = np.full((k, k), np.nan)
    neff = np.zeros((k, k), dtype=int)
    errors = {}
    for i in range(k):
        for j in range(k):
            if not directed and j < i:
                values[i, j], neff[i, j] = values[j, i], neff[j, i]
                if (j, i) in errors:
                    errors[i, j] = errors[j, i]
                continue
            if i == j and measure.kind == "te":
                errors[i, j] = "not applicable"
                continue
            try:
                res = estimate(series[i], series[j], measure)
            except MagrError as exc:
                errors[i, j] = f"{type(exc).__name__}: {exc}"
                continue
            values[i, j], neff[i, j] = res.value, res.effective_n
    return PairwiseMatrix(names, values, neff, errors, directed)


def surrogate_values(x, y, measure=MeasureSpec(), n_surrogates=19, seed=None):
    """
    Measure ``x -> y`` after random time permutations of ``x``.

    The permutation destroys any coupling, so the returned values sample the
    estimator's noise floor for this pair.
    """
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n_surrogates):
        perm = rng.permutation(len(x))
        xs = type(x)(x.data[perm], present=x.present[perm])
        out.append(estimate(xs, y, measure).value)
    return np.array(out)
