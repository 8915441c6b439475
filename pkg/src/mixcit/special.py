"""Special functions and geometric constants used by the k-NN estimators."""

import math

import numpy as np

from .errors import ConfigurationError, DomainError

__all__ = ["digamma", "log_unit_ball_volume", "EULER_GAMMA"]

EULER_GAMMA = 0.57721566490153286061

# B_{2j} / (2j) for j = 1..8; psi(x) ~ ln x - 1/(2x) - sum_j c_j x^{-2j}
_ASYMPTOTIC = (
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
    -3617.0 / 8160.0,
)
_SHIFT_TO = 6.0


def _digamma_array(x):
    x = x.astype(np.float64, copy=True)
    acc = np.zeros_like(x)
    small = x < _SHIFT_TO
    while small.any():
        acc[small] -= 1.0 / x[small]
        x[small] += 1.0
        small = x < _SHIFT_TO
    inv2 = 1.0 / (x * x)
    series = np.zeros_like(x)
    for c in reversed(_ASYMPTOTIC):
        series = (series + c) * inv2
    return acc + np.log(x) - 0.5 / x - series


def digamma(x):
    """Digamma function psi(x) for x > 0.

    Accepts a scalar or an array. Arguments below 6 are shifted upwards with
    psi(x) = psi(x + 1) - 1/x, then an 8-term asymptotic series is summed.
    Absolute error is below 1e-10 on [1e-3, 1e6].

    Raises
    ------
    DomainError
        If any argument is non-positive or non-finite.
    """
    arr = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
        raise DomainError("digamma is only defined here for finite x > 0")
    out = _digamma_array(np.atleast_1d(arr))
    if arr.ndim == 0:
        return float(out[0])
    return out.reshape(arr.shape)


def log_unit_ball_volume(dim, p_norm=math.inf):
    """Log-volume of the unit ball of the max-norm in ``dim`` dimensions."""
    if p_norm != math.inf:
        raise ConfigurationError("only the max-norm (p = inf) is supported")
    if int(dim) != dim or dim < 1:
        raise ConfigurationError(f"dimension must be a positive integer, got {dim!r}")
    return int(dim) * math.log(2.0)
