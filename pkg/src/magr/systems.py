"""
Benchmark systems: a bivariate linear VAR and the coupled Henon map.

Both generators are deterministic given ``SystemSpec.seed`` and discard a
warm-up transient before returning ``N`` samples of the driver X and the
response Y.
"""

from dataclasses import dataclass

import numpy as np

from .errors import GenerationError, ParameterError
from .series import GappySeries

__all__ = ["SystemSpec", "gen_mvar", "gen_henon", "generate"]

MVAR_Y_FEEDBACK = 0.4
HENON_BOUND = 10.0
HENON_RESTARTS = 100


@dataclass(frozen=True)
class SystemSpec:
    kind: str = "mvar"
    n: int = 500
    coupling: float = 0.0
    seed: object = None
    transient: int = 1000

    def __post_init__(self):
        if self.kind not in ("mvar", "henon"):
            raise ParameterError(f"unknown system {self.kind!r}")
        if self.n < 100:
            raise ParameterError(f"series length must be >= 100, got {self.n}")
        if self.transient < 100:
            raise ParameterError(f"transient must be >= 100, got {self.transient}")
        if not 0.0 <= self.coupling <= 1.0:
            raise ParameterError(f"coupling must lie in [0, 1], got {self.coupling}")


def gen_mvar(spec, innovations=None, initial=None, y_feedback=MVAR_Y_FEEDBACK):
    """
    Simulate the bivariate VAR

        X[t] = 1.2 X[t-1] - 0.95 X[t-2] + W_X[t]
        Y[t] = -0.5 X[t-1] + a Y[t-9] + W_Y[t]

    with independent standard Gaussian innovations.

    The feedback ``a`` defaults to 0.4, for which the stationary zero-lag
    correlation of X and Y is about -0.325; with ``a = -0.4`` it is about
    -0.72.

    Parameters
    ----------
    spec : SystemSpec
    innovations : ndarray, shape (transient + n, 2), optional
        Replaces the random innovations (columns W_X, W_Y).
    initial : ndarray, shape (9, 2), optional
        Pre-sample values (oldest first); zeros by default.
    y_feedback : float
        Coefficient ``a`` of Y[t-9].

    Returns
    -------
    x, y : GappySeries
    """
    total = spec.transient + spec.n
    if innovations is None:
        innovations = np.random.default_rng(spec.seed).standard_normal((total, 2))
    innovations = np.asarray(innovations, dtype=float)
    if innovations.shape != (total, 2):
        raise ParameterError(f"innovations must have shape ({total}, 2)")
    p = 9
    x = np.zeros(total + p)
    y = np.zeros(total + p)
    if initial is not None:
        x[:p], y[:p] = np.asarray(initial, dtype=float).T
    for t in range(p, total + p):
        w = innovations[t - p]
        x[t] = 1.2 * x[t - 1] - 0.95 * x[t - 2] + w[0]
        y[t] = -0.5 * x[t - 1] + y_feedback * y[t - 9] + w[1]
    return GappySeries(x[p + spec.transient :]), GappySeries(y[p + spec.transient :])


def _henon_orbit(x0, y0, c, total):
    x = np.empty(total + 2)
    y = np.empty(total + 2)
    x[:2], y[:2] = x0, y0
    for t in range(1, total + 1):
        x[t + 1] = 1.4 - x[t] * x[t] + 0.3 * x[t - 1]
        y[t + 1] = 1.4 - c * x[t] * y[t] - (1.0 - c) * y[t] * y[t] + 0.3 * y[t - 1]
        if abs(x[t + 1]) > HENON_BOUND or abs(y[t + 1]) > HENON_BOUND:
            return None
    return x[2:], y[2:]


def gen_henon(spec):
    """
    Iterate the uni-directionally coupled Henon map

        X[t+1] = 1.4 - X[t]^2 + 0.3 X[t-1]
        Y[t+1] = 1.4 - C X[t] Y[t] - (1 - C) Y[t]^2 + 0.3 Y[t-1]

    from initial values drawn uniformly in [0, 0.5]. An orbit leaving
    ``|value| <= 10`` is restarted from a fresh draw.
    """
    rng = np.random.default_rng(spec.seed)
    total = spec.transient + spec.n
    for _ in range(HENON_RESTARTS):
        x0, y0 = rng.uniform(0.0, 0.5, size=(2, 2))
        orbit = _henon_orbit(x0, y0, spec.coupling, total)
        if orbit is not None:
            x, y = orbit
            return GappySeries(x[spec.transient :]), GappySeries(y[spec.transient :])
    raise GenerationError(f"Henon orbit diverged {HENON_RESTARTS} times (C={spec.coupling})")


def generate(spec):
    return gen_mvar(spec) if spec.kind == "mvar" else gen_henon(spec)
