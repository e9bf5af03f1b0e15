"""
Gap injection and the baseline gap treatments.

Treatments:

=====  ==========================================================
GC     gap closure: drop absent samples and join the remainder
LI     piecewise linear interpolation
CI     piecewise cubic Hermite interpolation (PCHIP)
SPI    natural cubic spline
NNI    nearest present sample, the earlier one on ties
STI    random replacement by observed values of the same series
=====  ==========================================================

Every ``fill_*`` function returns a gap-free series of the original length
and leaves present samples untouched. Absent samples before the first or
after the last observation take the value of that observation.
"""

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline, PchipInterpolator

from .errors import DegenerateInputError, FeasibilityError, InputError, InsufficientDataError, ParameterError
from .series import GappySeries

__all__ = [
    "GapPlan",
    "inject_gaps",
    "gap_closure",
    "close_pair",
    "fill_linear",
    "fill_cubic",
    "fill_spline",
    "fill_nearest",
    "fill_stochastic",
    "FILLERS",
    "TREATMENTS",
]

GAP_KINDS = ("single", "fixed_block", "varying_block")


@dataclass(frozen=True)
class GapPlan:
    """
    How many samples to remove and in what shape.

    ``block_size`` is used by ``fixed_block``; ``block_range`` (inclusive)
    by ``varying_block``. ``seed`` may be an int or a
    :class:`numpy.random.SeedSequence`.
    """

    kind: str = "single"
    g: int = 0
    block_size: int = 1
    block_range: tuple = (1, 15)
    seed: object = None

    def __post_init__(self):
        if self.kind not in GAP_KINDS:
            raise ParameterError(f"unknown gap kind {self.kind!r}")
        if self.g < 0:
            raise ParameterError("gap count must be non-negative")
        if self.block_size < 1:
            raise ParameterError("block size must be positive")
        lo, hi = self.block_range
        if not 1 <= lo <= hi:
            raise ParameterError(f"invalid block range {self.block_range}")

    def block_sizes(self, rng):
        """Sizes of the blocks to place; they sum to ``g``."""
        if self.kind == "single":
            return [1] * self.g
        if self.kind == "fixed_block":
            sizes = [self.block_size] * (self.g // self.block_size)
            if self.g % self.block_size:
                sizes.append(self.g % self.block_size)
            return sizes
        lo, hi = self.block_range
        sizes, total = [], 0
        while total < self.g:
            s = int(rng.integers(lo, hi + 1))
            s = min(s, self.g - total)
            sizes.append(s)
            total += s
        return sizes


def inject_gaps(series, plan):
    """
    Remove ``plan.g`` samples from a gap-free series.

    Single gaps are drawn uniformly without replacement. Blocks are placed
    one at a time at uniform random offsets and rejected if they would
    overlap or touch an existing block, so at least one present sample
    separates any two blocks.
    """
    series = GappySeries(series)
    if series.has_gaps:
        raise InputError("gaps can only be injected into a gap-free series")
    n = series.n
    if plan.g >= n:
        raise InputError(f"cannot remove {plan.g} of {n} samples")
    if plan.g == 0:
        return series
    rng = np.random.default_rng(plan.seed)
    present = np.ones(n, dtype=bool)
    if plan.kind == "single":
        present[rng.choice(n, size=plan.g, replace=False)] = False
        return GappySeries(series.data, present=present)

    sizes = plan.block_sizes(rng)
    if plan.kind == "varying_block" and plan.block_range[1] >= n:
        raise ParameterError("block range must lie within [1, N)")
    # blocked[i] marks samples that are absent or adjacent to an absent one
    blocked = np.zeros(n + 2, dtype=bool)
    budget = 1000 * len(sizes)
    for size in sizes:
        while True:
            if budget == 0:
                raise FeasibilityError(
                    f"could not place {len(sizes)} non-touching blocks in {n} samples"
                )
            budget -= 1
            start = int(rng.integers(0, n - size + 1))
            # padded index start+1 .. start+size are the block itself
            if not blocked[start + 1 : start + size + 1].any():
                break
        present[start : start + size] = False
        blocked[start : start + size + 2] = True
    return GappySeries(series.data, present=present)


def gap_closure(series):
    """Present values in time order, with the gaps squeezed out."""
    series = GappySeries(series)
    obs = series.observed()
    if obs.size == 0:
        raise DegenerateInputError("cannot close a series with no observations")
    return GappySeries(obs)


def close_pair(x, y):
    """
    Close both series independently and pair them index-wise.

    If the closed lengths differ, both are truncated to the shorter one.
    """
    cx, cy = gap_closure(x), gap_closure(y)
    n = min(cx.n, cy.n)
    return cx.head(n), cy.head(n)


def _support(series, minimum, name):
    series = GappySeries(series)
    t = np.flatnonzero(series.present)
    if t.size < minimum:
        raise InsufficientDataError(f"{name} needs at least {minimum} present samples, got {t.size}")
    return series, t, series.data[t]


def _fill_with(series, values):
    """Keep present samples bit-identical; take ``values`` at the gaps."""
    return GappySeries(np.where(series.present, series.data, values))


def _clamped_grid(series, t):
    # outside the observed range the interpolant is evaluated at the edge
    return np.clip(np.arange(series.n), t[0], t[-1])


def fill_linear(series):
    series, t, v = _support(series, 2, "linear interpolation")
    if not series.has_gaps:
        return series
    return _fill_with(series, np.interp(np.arange(series.n), t, v))


def fill_cubic(series):
    """Shape-preserving piecewise cubic Hermite interpolation (C1)."""
    series, t, v = _support(series, 4, "cubic interpolation")
    if not series.has_gaps:
        return series
    return _fill_with(series, PchipInterpolator(t, v)(_clamped_grid(series, t)))


def fill_spline(series):
    """Cubic spline with natural end conditions (C2)."""
    series, t, v = _support(series, 4, "spline interpolation")
    if not series.has_gaps:
        return series
    return _fill_with(series, CubicSpline(t, v, bc_type="natural")(_clamped_grid(series, t)))


def fill_nearest(series):
    """Value of the temporally nearest observation; the earlier one wins ties."""
    series, t, v = _support(series, 2, "nearest neighbour interpolation")
    if not series.has_gaps:
        return series
    grid = np.arange(series.n)
    right = np.clip(np.searchsorted(t, grid), 0, t.size - 1)
    left = np.clip(right - 1, 0, t.size - 1)
    use_left = np.abs(grid - t[left]) <= np.abs(t[right] - grid)
    return _fill_with(series, np.where(use_left, v[left], v[right]))


def fill_stochastic(series, seed=None):
    """Replace each gap by a uniform draw (with replacement) from the observed values."""
    series = GappySeries(series)
    obs = series.observed()
    if obs.size == 0:
        raise DegenerateInputError("no observed values to draw from")
    if not series.has_gaps:
        return series
    rng = np.random.default_rng(seed)
    values = series.data.copy()
    gaps = ~series.present
    values[gaps] = rng.choice(obs, size=int(gaps.sum()), replace=True)
    return GappySeries(values)


FILLERS = {
    "LI": fill_linear,
    "CI": fill_cubic,
    "SPI": fill_spline,
    "NNI": fill_nearest,
    "STI": fill_stochastic,
}

TREATMENTS = ("MAGR", "GC") + tuple(FILLERS)
