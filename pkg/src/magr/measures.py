"""
Connectivity measures computed on a joint data matrix.

All estimators expect a matrix without absent cells, i.e. the output of
:func:`magr.series.magr_filter` (or a matrix built from gap-free series).
:func:`estimate` chains matrix construction, MAGR and the estimator for a
pair of gappy series.

Logarithms are natural throughout. Correlation sums use the Euclidean norm
by default (maximum norm on request) and a strict Heaviside step, so a pair
counts iff its distance is < r.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import pdist

from .errors import (
    DegenerateInputError,
    InputError,
    InsufficientDataError,
    ParameterError,
    UndefinedMeasureError,
)
from .series import LagSpec, build_joint_matrix, build_pair_matrix, magr_filter, normalize

__all__ = [
    "MeasureResult",
    "MeasureSpec",
    "ProbabilityTable",
    "cross_correlation",
    "equiprobable_bins",
    "default_bins",
    "probability_table",
    "cross_mutual_information",
    "correlation_sum",
    "te_pair_counts",
    "transfer_entropy",
    "estimate",
]

MIN_TE_ROWS = 50
MIN_MI_ROWS = 10
MIN_CC_ROWS = 3


@dataclass(frozen=True)
class MeasureResult:
    value: float
    effective_n: int
    params: dict = field(default_factory=dict)
    n_removed: int = 0

    def __post_init__(self):
        if self.effective_n <= 0:
            raise InputError("effective_n must be positive")


def _require_complete(matrix):
    if not np.all(matrix.present):
        raise InputError("matrix has absent cells; apply magr_filter first")


def _pair_columns(matrix):
    _require_complete(matrix)
    if matrix.roles != ("x", "y"):
        raise InputError(f"expected a two-column (x, y) matrix, got roles {matrix.roles}")
    return matrix.cells[:, 0], matrix.cells[:, 1]


def _pearson(a, b):
    a = a - a.mean()
    b = b - b.mean()
    saa, sbb = np.dot(a, a), np.dot(b, b)
    if saa == 0 or sbb == 0:
        raise DegenerateInputError("zero variance in a correlation column")
    return float(np.clip(np.dot(a, b) / math.sqrt(saa * sbb), -1.0, 1.0))


def cross_correlation(matrix):
    """
    Pearson correlation of the ``(x[t], y[t+lag])`` pairs of ``matrix``.

    Means and variances are computed over exactly the rows of the matrix.
    """
    a, b = _pair_columns(matrix)
    n = a.shape[0]
    if n < MIN_CC_ROWS:
        raise InsufficientDataError(f"cross correlation needs >= {MIN_CC_ROWS} pairs, got {n}")
    return MeasureResult(_pearson(a, b), n, {"measure": "cc"})


def equiprobable_bins(column, b):
    """
    Assign each value to one of ``b`` equal-occupancy bins (0-based labels).

    Values are ranked with a stable sort, so ties are split by position and
    occupancies differ by at most one.
    """
    if b < 2:
        raise ParameterError(f"need at least 2 bins, got {b}")
    column = np.asarray(column, dtype=float)
    n = column.shape[0]
    if n < b:
        raise InsufficientDataError(f"{n} values cannot fill {b} bins")
    order = np.argsort(column, kind="stable")
    labels = np.empty(n, dtype=np.int64)
    labels[order] = np.arange(n) * b // n
    return labels


def default_bins(n):
    """Bin count ``floor(sqrt(n / 5))``, at least 2."""
    return max(2, math.isqrt(n // 5))


@dataclass(frozen=True)
class ProbabilityTable:
    bins: int
    p_x: np.ndarray
    p_y: np.ndarray
    p_xy: np.ndarray


def probability_table(a, b_values, bins):
    """Relative frequencies of the equiprobable discretization of two columns."""
    ia = equiprobable_bins(a, bins)
    ib = equiprobable_bins(b_values, bins)
    n = ia.shape[0]
    joint = np.bincount(ia * bins + ib, minlength=bins * bins).reshape(bins, bins) / n
    return ProbabilityTable(bins, joint.sum(axis=1), joint.sum(axis=0), joint)


def cross_mutual_information(matrix, bins=None):
    """
    Mutual information of the ``(x[t], y[t+lag])`` pairs by equiprobable binning.

    Parameters
    ----------
    matrix : JointDataMatrix
        Complete two-column pair matrix.
    bins : int, optional
        Number of bins per axis. Defaults to :func:`default_bins` of the
        number of pairs actually used.

    Returns
    -------
    MeasureResult
        ``params["bins"]`` records the bin count used.
    """
    a, b = _pair_columns(matrix)
    n = a.shape[0]
    if n < MIN_MI_ROWS:
        raise InsufficientDataError(f"mutual information needs >= {MIN_MI_ROWS} pairs, got {n}")
    if bins is None:
        bins = default_bins(n)
    table = probability_table(a, b, bins)
    nz = table.p_xy > 0
    outer = np.outer(table.p_x, table.p_y)
    value = float(np.sum(table.p_xy[nz] * np.log(table.p_xy[nz] / outer[nz])))
    return MeasureResult(max(value, 0.0), n, {"measure": "cmi", "bins": int(bins)})


NORMS = ("euclidean", "max")


def _coordinate_diffs(points, norm):
    """Per-column condensed pair differences: |d| for max, d**2 for euclidean."""
    metric = "cityblock" if norm == "max" else "sqeuclidean"
    return [pdist(points[:, [k]], metric) for k in range(points.shape[1])]


def _combine(diffs, norm):
    out = diffs[0]
    for d in diffs[1:]:
        out = np.maximum(out, d) if norm == "max" else out + d
    return out


def _count_below(combined, r, norm):
    dist = combined if norm == "max" else np.sqrt(combined)
    return int(np.count_nonzero(dist < r))


def _check_norm(norm):
    if norm not in NORMS:
        raise ParameterError(f"norm must be one of {NORMS}, got {norm!r}")


def correlation_sum(points, r, norm="euclidean"):
    """
    Fraction of point pairs closer than ``r``.

    Normalized by the number ``M(M-1)/2`` of unordered pairs. ``norm`` is
    ``"euclidean"`` or ``"max"``.
    """
    _check_norm(norm)
    if not r > 0:
        raise ParameterError(f"radius must be positive, got {r}")
    points = np.asarray(points, dtype=float)
    if points.ndim == 1:
        points = points[:, None]
    m = points.shape[0]
    if m < 2:
        raise InsufficientDataError("correlation sum needs at least two points")
    count = _count_below(_combine(_coordinate_diffs(points, norm), norm), r, norm)
    return 2.0 * count / (m * (m - 1))


def te_pair_counts(matrix, r, norm="euclidean"):
    """
    Raw pair counts of the four subspaces entering the TE ratio.

    Returns a dict with keys ``"future_x_y"``, ``"x_y"``, ``"future_y"`` and
    ``"y"``; each value counts pairs ``i < j`` of rows whose distance in
    that subspace is below ``r``.
    """
    _check_norm(norm)
    _require_complete(matrix)
    roles = np.asarray(matrix.roles)
    d = _coordinate_diffs(matrix.cells, norm)
    block = lambda role: _combine([d[k] for k in np.flatnonzero(roles == role)], norm)
    dy, dx, df = block("y"), block("x"), block("y_future")
    dxy = _combine([dx, dy], norm)
    return {
        "future_x_y": _count_below(_combine([df, dxy], norm), r, norm),
        "x_y": _count_below(dxy, r, norm),
        "future_y": _count_below(_combine([df, dy], norm), r, norm),
        "y": _count_below(dy, r, norm),
    }


def transfer_entropy(matrix, r=0.2, norm="euclidean"):
    """
    Transfer entropy X -> Y from correlation sums.

    ``TE = log( C(f, X, Y) * C(Y) / (C(X, Y) * C(f, Y)) )`` with ``f`` the
    future target value. All four sums run over the same rows, so the pair
    normalization cancels and raw counts are used.

    Parameters
    ----------
    matrix : JointDataMatrix
        Complete matrix from :func:`build_joint_matrix` with ``lead=1``,
        built from normalized series.
    r : float
        Neighbourhood radius in units of the series' standard deviation.
    norm : {"euclidean", "max"}
        Distance used in the correlation sums.
    """
    if "y_future" not in matrix.roles:
        raise InputError("transfer entropy needs a matrix with a y_future column (lead=1)")
    if not r > 0:
        raise ParameterError(f"radius must be positive, got {r}")
    n = matrix.n_rows
    if n < MIN_TE_ROWS:
        raise InsufficientDataError(f"transfer entropy needs >= {MIN_TE_ROWS} rows, got {n}")
    counts = te_pair_counts(matrix, r, norm)
    vanished = [k for k, c in counts.items() if c == 0]
    if vanished:
        raise UndefinedMeasureError(f"correlation sum(s) vanished at r={r}: {', '.join(vanished)}")
    value = math.log(counts["future_x_y"] * counts["y"] / (counts["x_y"] * counts["future_y"]))
    m = sum(1 for role in matrix.roles if role == "x")
    return MeasureResult(value, n, {"measure": "te", "r": r, "m": m, "norm": norm})


@dataclass(frozen=True)
class MeasureSpec:
    """
    Which measure to compute and with what parameters.

    ``lag`` applies to ``cc``/``cmi`` (pairs ``x[t], y[t+lag]``); ``m``,
    ``tau``, ``r`` and ``norm`` apply to ``te``. ``bins=None`` selects the bin count
    from the number of retained pairs.
    """

    kind: str = "cc"
    lag: int = 0
    m: int = 1
    tau: int = 1
    r: float = 0.2
    bins: int | None = None
    norm: str = "euclidean"

    def __post_init__(self):
        if self.kind not in ("cc", "cmi", "te"):
            raise ParameterError(f"unknown measure {self.kind!r}")
        if self.kind == "te":
            LagSpec(self.m, self.tau, 1)

    @property
    def lead(self):
        return 1 if self.kind == "te" else 0

    @property
    def window(self):
        """Rows lost at the series ends by construction of the matrix."""
        return self.lag if self.kind != "te" else (self.m - 1) * self.tau + 1

    def matrix(self, x, y):
        """Joint data matrix for ``x -> y``; TE inputs are normalized first."""
        if self.kind == "te":
            return build_joint_matrix(normalize(x), normalize(y), LagSpec(self.m, self.tau, 1))
        return build_pair_matrix(x, y, self.lag)

    def evaluate(self, matrix):
        if self.kind == "cc":
            res = cross_correlation(matrix)
        elif self.kind == "cmi":
            res = cross_mutual_information(matrix, self.bins)
        else:
            res = transfer_entropy(matrix, self.r, self.norm)
        params = dict(res.params)
        if self.kind == "te":
            params["tau"] = self.tau
        else:
            params["lag"] = self.lag
        return MeasureResult(res.value, res.effective_n, params)


def estimate(x, y, spec=MeasureSpec()):
    """
    Measure ``x -> y`` on possibly gappy series with MAGR.

    Rows of the joint data matrix holding an absent value are removed
    before estimation; on gap-free input this is the plain estimator.
    ``n_removed`` of the result is the number of dropped rows.
    """
    matrix, n_removed = magr_filter(spec.matrix(x, y))
    if matrix.n_rows == 0:
        raise InsufficientDataError("no complete rows remain after gap removal")
    res = spec.evaluate(matrix)
    return MeasureResult(res.value, res.effective_n, res.params, n_removed)
