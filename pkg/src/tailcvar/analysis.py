"""Asymptotic-variance comparison and Monte Carlo error metrics."""
import math
from dataclasses import dataclass

from .cvar import asymptotic_variance
from .errors import DomainError
from .specfun import lower_incomplete_gamma

__all__ = [
    "AvarPoint",
    "k_of_n",
    "avar_upot",
    "avar_sa_frechet",
    "avar_curve",
    "run_metrics",
    "coverage_probability",
]


@dataclass(frozen=True)
class AvarPoint:
    n: int
    k: int
    avar_upot: float
    avar_sa: float = None


def k_of_n(n):
    """Number of excesses ``ceil(n^(2/3))`` used in the variance comparison."""
    k = int(math.ceil(n ** (2.0 / 3.0)))
    # guard against float noise at perfect cubes
    return k - 1 if (k - 1) ** 3 >= n * n else k


def avar_upot(xi, alpha, n):
    """``V / k`` with ``k = ceil(n^(2/3))`` and ``beta = k / (n (1 - alpha))``."""
    if not 0 < xi < 1:
        raise DomainError("xi must lie in (0, 1)")
    k = k_of_n(n)
    beta = k / (n * (1.0 - alpha))
    if beta < 1:
        raise DomainError(f"alpha={alpha} too low for n={n}: k/(n(1-alpha)) < 1")
    return asymptotic_variance(xi, beta) / k


def avar_sa_frechet(gamma, alpha, n):
    """Asymptotic variance of the sample-average CVaR for Frechet(gamma).

    Equals ``Var((X - q)_+) / (n (1 - alpha)^2)`` with ``q`` the alpha-quantile,
    using ``E[X^r; X > q] = gamma_lower(1 - r/gamma, -log alpha)``.
    """
    if not gamma > 2:
        raise DomainError("the SA variance is finite only for gamma > 2")
    if not 0 < alpha < 1:
        raise DomainError("alpha must lie in (0, 1)")
    x = -math.log(alpha)
    q = x ** (-1.0 / gamma)
    tail = 1.0 - alpha
    e1 = lower_incomplete_gamma(1.0 - 1.0 / gamma, x)
    e2 = lower_incomplete_gamma(1.0 - 2.0 / gamma, x)
    m1 = e1 - q * tail
    m2 = e2 - 2.0 * q * e1 + q * q * tail
    return (m2 - m1 * m1) / (n * tail * tail)


def avar_curve(gamma, alpha, n_grid):
    """Variance comparison points for Frechet(gamma) over ``n_grid``."""
    xi = 1.0 / gamma
    return [
        AvarPoint(int(n), k_of_n(n), avar_upot(xi, alpha, n),
                  avar_sa_frechet(gamma, alpha, n) if gamma > 2 else None)
        for n in n_grid
    ]


def run_metrics(estimates, truth):
    """``(rmse, bias)`` of estimates against the truth; bias is signed."""
    e = [float(v) for v in estimates]
    if not e:
        raise ValueError("no estimates")
    m = len(e)
    rmse = math.sqrt(math.fsum((v - truth) ** 2 for v in e) / m)
    bias = math.fsum(e) / m - truth
    return rmse, bias


def coverage_probability(intervals, truth):
    """Fraction of closed intervals ``(lo, hi)`` that contain ``truth``."""
    iv = list(intervals)
    if not iv:
        raise ValueError("no intervals")
    return sum(1 for lo, hi in iv if lo <= truth <= hi) / len(iv)
