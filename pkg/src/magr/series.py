"""
Gappy time series and the lagged joint data matrix.

A :class:`GappySeries` holds observations together with a presence mask,
so missing samples are never confused with numeric values. Every measure in
the package is computed from a :class:`JointDataMatrix`, whose rows pair the
values of both series at (possibly lagged) time steps. Measure adapted gap
removal (MAGR) is then just :func:`magr_filter`: drop every row that has an
absent cell and keep the original time stamps of the rest.

Time stamps are 1-based throughout the public API.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInputError, InputError, InsufficientDataError, ParameterError

__all__ = [
    "GappySeries",
    "LagSpec",
    "JointDataMatrix",
    "build_joint_matrix",
    "build_pair_matrix",
    "magr_filter",
    "discard_bound",
    "normalize",
]


def _readonly(a):
    a.setflags(write=False)
    return a


class GappySeries:
    """
    A fixed-length sequence of optional real observations.

    Parameters
    ----------
    values : array_like or numpy.ma.MaskedArray
        Observations. ``None`` entries, NaN entries and masked entries are
        treated as absent.
    present : array_like of bool, optional
        Explicit presence mask. When given, ``values`` at absent positions
        are ignored entirely.
    """

    __slots__ = ("_data", "_present")

    def __init__(self, values, present=None):
        if isinstance(values, GappySeries):
            self._data, self._present = values._data, values._present
            return
        if isinstance(values, np.ma.MaskedArray):
            data = np.array(values.filled(np.nan), dtype=float)
            if present is None:
                present = ~np.ma.getmaskarray(values)
        else:
            if not isinstance(values, np.ndarray):
                values = [np.nan if v is None else v for v in values]
            data = np.array(values, dtype=float)
        if present is None:
            mask = ~np.isnan(data)
        else:
            mask = np.array(present, dtype=bool)
            if mask.shape != data.shape:
                raise InputError("values and presence mask differ in shape")
        if data.ndim != 1:
            raise InputError("a series must be one-dimensional")
        if not np.all(np.isfinite(data[mask])):
            raise InputError("present values must be finite")
        data = np.where(mask, data, 0.0)
        self._data = _readonly(data)
        self._present = _readonly(mask)

    @property
    def data(self):
        """Underlying float array; entries at absent positions are meaningless."""
        return self._data

    @property
    def present(self):
        """Boolean mask, True where an observation exists."""
        return self._present

    @property
    def n(self):
        return self._data.shape[0]

    @property
    def gap_count(self):
        return int(self.n - np.count_nonzero(self._present))

    @property
    def has_gaps(self):
        return self.gap_count > 0

    def __len__(self):
        return self.n

    def __getitem__(self, t):
        """Return the value at 0-based position ``t``, or None if absent."""
        return float(self._data[t]) if self._present[t] else None

    def __iter__(self):
        for v, p in zip(self._data, self._present):
            yield float(v) if p else None

    def __eq__(self, other):
        if not isinstance(other, GappySeries):
            return NotImplemented
        return (
            np.array_equal(self._present, other._present)
            and np.array_equal(self._data[self._present], other._data[other._present])
        )

    def __repr__(self):
        return f"GappySeries(n={self.n}, gaps={self.gap_count})"

    def observed(self):
        """Present values in time order."""
        return self._data[self._present]

    def to_masked(self):
        return np.ma.MaskedArray(self._data.copy(), mask=~self._present)

    def to_numpy(self, fill=np.nan):
        """Dense float array with ``fill`` at absent positions."""
        return np.where(self._present, self._data, fill)

    def head(self, n):
        """The first ``n`` samples."""
        return GappySeries(self._data[:n], present=self._present[:n])

    def with_values(self, data):
        """Same presence mask, new values (absent slots are ignored)."""
        return GappySeries(data, present=self._present)


@dataclass(frozen=True)
class LagSpec:
    """Embedding dimension ``m``, delay ``tau`` and lead of the target."""

    m: int = 1
    tau: int = 1
    lead: int = 0

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 1:
            raise ParameterError(f"embedding dimension must be >= 1, got {self.m}")
        if int(self.tau) != self.tau or self.tau < 1:
            raise ParameterError(f"delay must be >= 1, got {self.tau}")
        if self.lead not in (0, 1):
            raise ParameterError(f"lead must be 0 or 1, got {self.lead}")

    @property
    def span(self):
        """Number of leading time steps lost to the embedding window."""
        return (self.m - 1) * self.tau


class JointDataMatrix:
    """
    Time-ordered rows of cells drawn from two series.

    Attributes
    ----------
    t : ndarray of int
        1-based time index of each row.
    cells : ndarray, shape (rows, columns)
        Cell values; entries where ``present`` is False carry no meaning.
    present : ndarray of bool, same shape as ``cells``
    roles : tuple of str
        Per-column role, one of ``"y_future"``, ``"x"``, ``"y"``.
    names : tuple of str
        Per-column label such as ``"x[t-1]"``.
    """

    __slots__ = ("t", "cells", "present", "roles", "names")

    def __init__(self, t, cells, present, roles, names):
        self.t = _readonly(np.asarray(t, dtype=np.int64))
        self.cells = _readonly(np.asarray(cells, dtype=float))
        self.present = _readonly(np.asarray(present, dtype=bool))
        self.roles = tuple(roles)
        self.names = tuple(names)
        if self.cells.shape != self.present.shape or self.cells.shape[0] != self.t.shape[0]:
            raise InputError("inconsistent joint matrix shapes")
        if self.t.size > 1 and np.any(np.diff(self.t) <= 0):
            raise InputError("row times must be strictly increasing")

    @property
    def n_rows(self):
        return self.t.shape[0]

    @property
    def complete(self):
        """Mask of rows with every cell present."""
        return np.all(self.present, axis=1)

    @property
    def effective_count(self):
        return int(np.count_nonzero(self.complete))

    def __len__(self):
        return self.n_rows

    def __repr__(self):
        return (
            f"JointDataMatrix(rows={self.n_rows}, effective={self.effective_count}, "
            f"columns={list(self.names)})"
        )

    def columns(self, role):
        """Cell block (all rows) of the columns with the given role."""
        idx = [i for i, r in enumerate(self.roles) if r == role]
        return self.cells[:, idx]

    def take(self, rows):
        """Sub-matrix restricted to a boolean mask or index array of rows."""
        return JointDataMatrix(
            self.t[rows], self.cells[rows], self.present[rows], self.roles, self.names
        )


def _check_pair(x, y):
    x, y = GappySeries(x), GappySeries(y)
    if x.n != y.n:
        raise InputError(f"series lengths differ: {x.n} != {y.n}")
    return x, y


def _lag_label(name, k):
    return f"{name}[t]" if k == 0 else (f"{name}[t+{k}]" if k > 0 else f"{name}[t{k}]")


def build_joint_matrix(x, y, spec=LagSpec()):
    """
    Joint data matrix of ``(y[t+lead], x[t], ..., x[t-(m-1)tau], y[t], ...)``.

    Rows exist for ``(m-1)*tau + 1 <= t <= N - lead`` (1-based); the
    ``y_future`` column is present only when ``spec.lead == 1``. Absences
    in the series are carried into the cells unchanged.

    Parameters
    ----------
    x, y : GappySeries
        Driver and response series of equal length.
    spec : LagSpec

    Returns
    -------
    JointDataMatrix
    """
    x, y = _check_pair(x, y)
    n = x.n
    if n <= spec.span + spec.lead:
        raise InsufficientDataError(
            f"series of length {n} too short for m={spec.m}, tau={spec.tau}, lead={spec.lead}"
        )
    # 0-based row positions
    pos = np.arange(spec.span, n - spec.lead)
    offsets = [-k * spec.tau for k in range(spec.m)]
    cols, masks, roles, names = [], [], [], []
    if spec.lead:
        cols.append(y.data[pos + spec.lead])
        masks.append(y.present[pos + spec.lead])
        roles.append("y_future")
        names.append(_lag_label("y", spec.lead))
    for role, s in (("x", x), ("y", y)):
        for off in offsets:
            cols.append(s.data[pos + off])
            masks.append(s.present[pos + off])
            roles.append(role)
            names.append(_lag_label(role, off))
    return JointDataMatrix(pos + 1, np.column_stack(cols), np.column_stack(masks), roles, names)


def build_pair_matrix(x, y, lag=0):
    """
    Two-column matrix of pairs ``(x[t], y[t+lag])`` for ``t = 1..N-lag``.

    This is the substrate of the lagged cross correlation and cross mutual
    information.
    """
    x, y = _check_pair(x, y)
    if int(lag) != lag or lag < 0:
        raise ParameterError(f"lag must be a non-negative integer, got {lag}")
    n = x.n
    if n <= lag:
        raise InsufficientDataError(f"series of length {n} too short for lag {lag}")
    pos = np.arange(0, n - lag)
    cells = np.column_stack([x.data[pos], y.data[pos + lag]])
    present = np.column_stack([x.present[pos], y.present[pos + lag]])
    return JointDataMatrix(pos + 1, cells, present, ("x", "y"), ("x[t]", _lag_label("y", lag)))


def magr_filter(matrix):
    """
    Drop every row of ``matrix`` that holds an absent cell.

    Returns
    -------
    filtered : JointDataMatrix
        Retained rows with their original time stamps.
    n_removed : int
    """
    keep = matrix.complete
    return matrix.take(keep), int(matrix.n_rows - np.count_nonzero(keep))


def discard_bound(m, g_x, g_y):
    """Upper bound ``m*g_x + (m+1)*g_y`` on rows removed from a TE matrix (tau=1)."""
    if m < 1:
        raise ParameterError(f"embedding dimension must be >= 1, got {m}")
    return m * g_x + (m + 1) * g_y


def normalize(series):
    """
    Shift and scale the present values to sample mean 0 and std 1.

    The standard deviation uses ``ddof=1``. Absent entries stay absent.
    """
    series = GappySeries(series)
    obs = series.observed()
    if obs.size < 2:
        raise DegenerateInputError("need at least two present values to normalize")
    sd = obs.std(ddof=1)
    if not sd > 0:
        raise DegenerateInputError("cannot normalize a series with zero variance")
    return series.with_values((series.data - obs.mean()) / sd)
