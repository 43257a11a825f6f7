"""Central finite differences with optional Richardson extrapolation.

Every module that lacks closed-form derivative callbacks routes through
these helpers, so step choices and accuracy orders live in one place.
Plain stencils are O(h^2); one Richardson step upgrades them to O(h^4).
"""

import numpy as np

from .config import DEFAULTS
from .errors import DomainError


def _d1(fn, x, h):
    return (np.asarray(fn(x + h), dtype=float) - np.asarray(fn(x - h), dtype=float)) / (2.0 * h)


def _d2(fn, x, h):
    fp = np.asarray(fn(x + h), dtype=float)
    f0 = np.asarray(fn(x), dtype=float)
    fm = np.asarray(fn(x - h), dtype=float)
    return (fp - 2.0 * f0 + fm) / (h * h)


def numerical_derivative(fn, x, order=1, h=None, richardson=False, domain=None):
    """Differentiate a scalar- or vector-valued function of one real variable.

    order is 1 or 2.  When ``domain`` is given, a stencil that leaves the
    closed interval raises DomainError.  Returns a float for scalar fn.
    """
    if order not in (1, 2):
        raise ValueError(f"order must be 1 or 2, got {order}")
    if h is None:
        h = DEFAULTS.fd_step
    if domain is not None:
        lo, hi = domain
        if x - h < lo or x + h > hi:
            raise DomainError(
                f"stencil [{x - h:g}, {x + h:g}] exits domain [{lo:g}, {hi:g}]"
            )
    base = _d1 if order == 1 else _d2
    if richardson:
        out = (4.0 * base(fn, x, h / 2.0) - base(fn, x, h)) / 3.0
    else:
        out = base(fn, x, h)
    return float(out) if np.ndim(out) == 0 else out


def partial(fn, x, i, h=None, richardson=False):
    """d fn / d x_i at the point x (array input)."""
    x = np.asarray(x, dtype=float)
    e = np.zeros_like(x)
    e[i] = 1.0
    return numerical_derivative(lambda s: fn(x + s * e), 0.0, 1, h, richardson)


def fd_gradient(fn, x, h=None, richardson=False):
    """Gradient of a scalar function on R^n."""
    x = np.asarray(x, dtype=float)
    return np.array([partial(fn, x, i, h, richardson) for i in range(x.size)])


def fd_jacobian(fn, x, h=None, richardson=False):
    """Rows J[i] = d fn / d x_i for vector-valued fn on R^n."""
    x = np.asarray(x, dtype=float)
    return np.vstack([np.atleast_1d(partial(fn, x, i, h, richardson)) for i in range(x.size)])


def fd_hessian(fn, x, h=None):
    """Symmetric matrix of second partials of a scalar function."""
    if h is None:
        h = DEFAULTS.fd_step
    x = np.asarray(x, dtype=float)
    n = x.size
    out = np.empty((n, n))
    eye = np.eye(n)
    for i in range(n):
        out[i, i] = numerical_derivative(lambda s, i=i: fn(x + s * eye[i]), 0.0, 2, h)
        for j in range(i + 1, n):
            fpp = fn(x + h * eye[i] + h * eye[j])
            fpm = fn(x + h * eye[i] - h * eye[j])
            fmp = fn(x - h * eye[i] + h * eye[j])
            fmm = fn(x - h * eye[i] - h * eye[j])
            out[i, j] = out[j, i] = (fpp - fpm - fmp + fmm) / (4.0 * h * h)
    return out


def directional(fn, x, v, h=None, richardson=False):
    """Derivative of fn along the straight line through x with velocity v."""
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    return numerical_derivative(lambda s: fn(x + s * v), 0.0, 1, h, richardson)


def deriv1_order4(fn, x, h):
    """Five-point first-derivative stencil, O(h^4)."""
    return (
        -np.asarray(fn(x + 2 * h), dtype=float)
        + 8.0 * np.asarray(fn(x + h), dtype=float)
        - 8.0 * np.asarray(fn(x - h), dtype=float)
        + np.asarray(fn(x - 2 * h), dtype=float)
    ) / (12.0 * h)


def deriv2_order4(fn, x, h):
    """Five-point second-derivative stencil, O(h^4)."""
    return (
        -np.asarray(fn(x + 2 * h), dtype=float)
        + 16.0 * np.asarray(fn(x + h), dtype=float)
        - 30.0 * np.asarray(fn(x), dtype=float)
        + 16.0 * np.asarray(fn(x - h), dtype=float)
        - np.asarray(fn(x - 2 * h), dtype=float)
    ) / (12.0 * h * h)


def empirical_order(hs, errs):
    """Least-squares slope of log(err) against log(h).

    Zero errors are clipped to the float floor so exact cases do not break
    the fit; callers should feed genuinely inexact data.
    """
    hs = np.asarray(hs, dtype=float)
    errs = np.clip(np.asarray(errs, dtype=float), 1e-300, None)
    slope, _ = np.polyfit(np.log(hs), np.log(errs), 1)
    return float(slope)
