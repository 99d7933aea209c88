"""Generalized Pareto distribution and maximum-likelihood fitting of excesses.

The fit uses the profile reduction ``theta = xi / sigma``: for fixed ``theta``
the likelihood is maximized by ``xi(theta) = mean(log(1 + theta*Y))`` and
``sigma = xi / theta``, leaving a one-dimensional search.
"""
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .errors import DataError, DomainError, FitError
from .sample import SortedSample

__all__ = [
    "GpdFit",
    "gpd_log_density",
    "gpd_cdf",
    "extract_excesses",
    "fit_mle",
    "mle_residuals",
    "XI_CAP",
]

XI_CAP = 5.0
_GRID_SIZE = 200
_EDGE = 1e-8
_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class GpdFit:
    """Fitted GPD for the excesses over ``threshold_u``.

    Attributes
    ----------
    xi, sigma : float
        Shape and scale estimates.
    log_likelihood : float
        Log-likelihood of the excesses at ``(xi, sigma)``.
    k : int
        Number of excesses.
    threshold_u : float
        Threshold the excesses were taken over (0 when fitted standalone).
    xi_capped : bool
        True when the search hit the ``xi <= 5`` boundary.
    residuals : tuple of float
        The two likelihood first-order-condition residuals at the estimate.
    """

    xi: float
    sigma: float
    log_likelihood: float
    k: int
    threshold_u: float = 0.0
    xi_capped: bool = False
    residuals: tuple = field(default=(0.0, 0.0))

    def __post_init__(self):
        if not self.sigma > 0:
            raise DomainError(f"GPD scale must be positive, got {self.sigma}")


def gpd_log_density(xi, sigma, y):
    """Log density ``-log(sigma) - (1/xi + 1) log(1 + xi*y/sigma)``.

    ``xi == 0`` uses the exponential limit. Accepts scalar or array ``y``.
    """
    if not sigma > 0:
        raise DomainError("sigma must be positive")
    y = np.asarray(y, dtype=float)
    z = xi * y / sigma
    if np.any(y < 0) or np.any(1.0 + z <= 0):
        raise DomainError("argument outside the GPD support")
    if xi == 0:
        out = -math.log(sigma) - y / sigma
    else:
        out = -math.log(sigma) - (1.0 / xi + 1.0) * np.log1p(z)
    return out[()] if np.ndim(out) == 0 else out


def gpd_cdf(xi, sigma, y):
    """GPD cdf, clipped to 1 beyond the upper endpoint when ``xi < 0``."""
    if not sigma > 0:
        raise DomainError("sigma must be positive")
    y = np.maximum(np.asarray(y, dtype=float), 0.0)
    if xi == 0:
        out = -np.expm1(-y / sigma)
    else:
        z = np.maximum(xi * y / sigma, -1.0)
        with np.errstate(divide="ignore"):
            out = -np.expm1(-np.log1p(z) / xi)
    out = np.clip(out, 0.0, 1.0)
    return out[()] if np.ndim(out) == 0 else out


def extract_excesses(sample, k):
    """Threshold ``u = X_(n-k)`` and the ``k`` ascending excesses above it."""
    if not isinstance(sample, SortedSample):
        sample = SortedSample(sample)
    n = sample.n
    k = int(k)
    if not 1 <= k < n:
        raise IndexError(f"k must satisfy 1 <= k < n={n}, got {k}")
    u = sample.order_stat(n - k)
    return u, sample.top(k) - u


def mle_residuals(excesses, xi, sigma):
    """Residuals of the two likelihood equations at ``(xi, sigma)``.

    ``r1 = mean(log(1 + xi*Y/sigma)) - xi`` and
    ``r2 = mean(Y / (sigma + xi*Y)) - 1/(1 + xi)``.
    """
    y = np.asarray(excesses, dtype=float)
    r1 = math.fsum(np.log1p(xi * y / sigma)) / y.size - xi
    r2 = math.fsum(y / (sigma + xi * y)) / y.size - 1.0 / (1.0 + xi)
    return r1, r2


def _profile(t, y):
    """Profile log-likelihood per excess at ``theta = t`` (vectorized in t)."""
    t = np.atleast_1d(t)
    xi = np.log1p(np.outer(t, y)).mean(axis=1)
    out = np.empty_like(t)
    zero = t == 0
    nz = ~zero
    out[nz] = -np.log(xi[nz] / t[nz]) - 1.0 - xi[nz]
    out[zero] = -math.log(y.mean()) - 1.0
    return out


def _profile_slope(t, y, m1, m2):
    """d/dtheta of the per-excess profile log-likelihood."""
    if t == 0:
        return m2 / (2.0 * m1) - m1
    xi = math.fsum(np.log1p(t * y)) / y.size
    dxi = math.fsum(y / (1.0 + t * y)) / y.size
    return 1.0 / t - dxi * (1.0 + xi) / xi


def _theta_grid(y):
    ymax = float(y.max())
    lo = -(1.0 - _EDGE) / ymax

    def xi_minus_cap(t):
        return math.fsum(np.log1p(t * y)) / y.size - XI_CAP

    hi = 1.0 / ymax
    while xi_minus_cap(hi) < 0:
        hi *= 4.0
    hi = optimize.brentq(xi_minus_cap, hi / 4.0, hi, xtol=1e-12 * hi, rtol=1e-14)
    # dense near the singular lower endpoint and around zero
    near_edge = lo + (1.0 / ymax) * (np.logspace(math.log10(_EDGE), math.log10(0.5), 60) - _EDGE)
    near_zero = -np.logspace(math.log10(0.45), -6.0, 20) / ymax
    positive = np.logspace(math.log10(hi) - 8.0, math.log10(hi), _GRID_SIZE - 81)
    grid = np.unique(np.concatenate([near_edge, near_zero, [0.0], positive]))
    return grid, lo, hi


def _golden_max(fn, a, b, tol):
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = fn(c), fn(d)
    it = 0
    while abs(b - a) > tol * (abs(c) + abs(d)) + 1e-300 and it < 300:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = fn(d)
        it += 1
    return (c, fc) if fc > fd else (d, fd)


def fit_mle(excesses):
    """Maximum-likelihood GPD fit to nonnegative excesses.

    A 200-point profile grid in ``theta`` locates the global maximum, golden
    section refines it inside the neighbouring grid cells, and a root solve
    on the profile derivative polishes it so the first-order residuals drop
    to rounding level.

    Parameters
    ----------
    excesses : array_like
        At least five nonnegative values, not all equal.

    Returns
    -------
    GpdFit

    Raises
    ------
    DataError
        On fewer than five values, negative or non-finite values, or constant input.
    FitError
        When the likelihood has no interior maximum (``xi < -1`` regime).
    """
    y = np.sort(np.asarray(excesses, dtype=float).ravel())
    if y.size < 5:
        raise DataError(f"need at least 5 excesses, got {y.size}")
    if not np.all(np.isfinite(y)) or y[0] < 0:
        raise DataError("excesses must be finite and nonnegative")
    if y[0] == y[-1]:
        raise DataError("all excesses are equal; the GPD fit is degenerate")
    y = np.where(y == 0.0, 1e-12 * y.mean(), y)
    m1 = float(y.mean())
    m2 = float(np.mean(y * y))

    grid, lo, hi = _theta_grid(y)
    values = _profile(grid, y)
    if not np.all(np.isfinite(values)):
        raise FitError("profile likelihood not finite on the search grid")
    # the likelihood is unbounded for xi < -1; search the regular region only
    xi_grid = np.log1p(np.outer(grid, y)).mean(axis=1)
    regular = np.flatnonzero(xi_grid > -1.0)
    best = int(regular[np.argmax(values[regular])])
    capped = False
    if best == regular[0]:
        raise FitError(
            "profile likelihood increases towards xi = -1; no regular interior maximum"
        )
    if best == grid.size - 1:
        t_hat = hi
        capped = True
    else:
        a, b = grid[best - 1], grid[best + 1]
        t_hat, _ = _golden_max(lambda t: float(_profile(t, y)[0]), a, b, 1e-10)
        slope = lambda t: _profile_slope(t, y, m1, m2)  # noqa: E731
        try:
            sa, sb = slope(a), slope(b)
            if sa > 0 > sb:
                t_hat = optimize.brentq(slope, a, b, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=200)
        except (ValueError, RuntimeError, ZeroDivisionError):
            pass

    if t_hat == 0:
        xi, sigma = 0.0, m1
    else:
        xi = math.fsum(np.log1p(t_hat * y)) / y.size
        sigma = xi / t_hat
    if capped:
        xi = min(xi, XI_CAP)
    ll = float(math.fsum(np.atleast_1d(gpd_log_density(xi, sigma, y))))
    res = mle_residuals(y, xi, sigma) if xi != 0 else (0.0, 0.0)
    return GpdFit(xi=float(xi), sigma=float(sigma), log_likelihood=ll, k=int(y.size),
                  xi_capped=capped, residuals=tuple(float(r) for r in res))
