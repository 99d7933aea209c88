"""Second-order tail estimation: the parameter rho, A(n/k) and the MLE bias.

All statistics are built from log-spacings ``log(X_(n-i+1) / X_(n-m))`` of the
top order statistics, so they are invariant under rescaling of the data.
"""
import math
from dataclasses import dataclass

import numpy as np

from .errors import DataError, DomainError
from .sample import SortedSample

__all__ = [
    "TailDiagnostics",
    "log_moment",
    "log_moments",
    "t_statistic",
    "rho_from_t",
    "rho_estimate",
    "adarho",
    "select_stable_rho",
    "default_taus",
    "default_ms",
    "a_estimate",
    "bias_vector",
]

_DEGENERATE = 1e-14
FALLBACK_RHO = -1.0


@dataclass(frozen=True)
class TailDiagnostics:
    """Second-order estimates feeding the bias corrections.

    ``run_length`` is the length of the stable ADARHO run, ``unstable`` flags
    the case where no run longer than one grid point existed, and
    ``fallback_used`` flags ``rho_hat = -1`` being substituted because every
    candidate was invalid.
    """

    rho_hat: float
    tau_selected: float = math.nan
    m_selected: int = 0
    A_hat: float = 0.0
    b_hat: tuple = (math.nan, math.nan)
    fallback_used: bool = False
    run_length: int = 0
    unstable: bool = False
    a_hat_failed: bool = False

    def __post_init__(self):
        if not self.rho_hat < 0:
            raise DomainError(f"rho_hat must be negative, got {self.rho_hat}")

    def with_a(self, A_hat, b_hat, a_hat_failed=False):
        return TailDiagnostics(self.rho_hat, self.tau_selected, self.m_selected, float(A_hat),
                               tuple(float(b) for b in b_hat), self.fallback_used,
                               self.run_length, self.unstable, a_hat_failed)


def _as_sorted(sample):
    return sample if isinstance(sample, SortedSample) else SortedSample(sample)


def _spacings(x, m):
    n = x.size
    if not 1 <= m < n:
        raise IndexError(f"m must satisfy 1 <= m < n={n}, got {m}")
    base = x[n - m - 1]
    if not base > 0:
        raise DataError("log-moments need positive order statistics above X_(n-m)")
    return np.log(x[n - m:] / base)


def log_moment(sample, m, j):
    """``M^(j)(m) = (1/m) sum_{i<=m} [log X_(n-i+1) - log X_(n-m)]^j``.

    ``j = 1`` gives the Hill estimator.
    """
    if j not in (1, 2, 3):
        raise ValueError("j must be 1, 2 or 3")
    d = _spacings(_as_sorted(sample).values, int(m))
    return float(np.mean(d**j))


def log_moments(sample, m):
    """``(M1, M2, M3)`` at a single ``m``."""
    d = _spacings(_as_sorted(sample).values, int(m))
    d2 = d * d
    return float(d.mean()), float(d2.mean()), float((d2 * d).mean())


def t_statistic(m1, m2, m3, tau):
    """The ratio statistic ``T^(tau)`` from the first three log-moments.

    ``tau = 0`` uses logarithms in place of the powers. Returns NaN when the
    denominator is degenerate (below ``1e-14`` in magnitude) or inputs are
    not positive.
    """
    if not (m1 > 0 and m2 > 0 and m3 > 0):
        return math.nan
    a, b, c = m1, m2 / 2.0, m3 / 6.0
    if tau == 0:
        num = math.log(a) - 0.5 * math.log(b)
        den = 0.5 * math.log(b) - math.log(c) / 3.0
    else:
        num = a**tau - b ** (tau / 2.0)
        den = b ** (tau / 2.0) - c ** (tau / 3.0)
    if not abs(den) >= _DEGENERATE:
        return math.nan
    return num / den


def rho_from_t(t):
    """``3 (T - 1) / (T - 3)``."""
    if t == 3:
        return math.nan
    return 3.0 * (t - 1.0) / (t - 3.0)


def rho_estimate(sample, m, tau):
    """Estimate rho from the top ``m`` log-spacings with tuning ``tau``.

    Raises
    ------
    DomainError
        When the T statistic is degenerate.
    """
    t = t_statistic(*log_moments(sample, m), tau)
    if math.isnan(t):
        raise DomainError(f"degenerate T statistic at m={m}, tau={tau}")
    return rho_from_t(t)


def default_taus():
    return tuple(-1.5 + 0.25 * i for i in range(13))


def default_ms(sample):
    """``100, 200, ..., n-1`` restricted to positive ``X_(n-m)``; ``{ceil(n/2)}`` for n < 200."""
    x = _as_sorted(sample).values
    n = x.size
    ms = [int(math.ceil(n / 2))] if n < 200 else list(range(100, n, 100))
    return tuple(m for m in ms if m < n and x[n - m - 1] > 0)


def _run_bounds(rounded, valid):
    """Longest run of equal rounded values among valid entries: (start, length)."""
    best_start, best_len = -1, 0
    i, size = 0, len(rounded)
    while i < size:
        if not valid[i]:
            i += 1
            continue
        j = i + 1
        while j < size and valid[j] and rounded[j] == rounded[i]:
            j += 1
        if j - i > best_len:
            best_start, best_len = i, j - i
        i = j
    return best_start, best_len


def adarho(sample, taus=None, ms=None, precision_digits=1):
    """Adaptive selection of ``(tau, m)`` for the rho estimator.

    For each ``tau`` the path ``m -> rho_hat(m)`` is rounded to
    ``precision_digits`` decimals and its longest run of equal values found
    (candidates with ``rho_hat >= 0`` or a degenerate statistic break runs).
    The ``tau`` with the longest run wins, ties going to the earlier ``tau``;
    the estimate is the median of the unrounded values over that run.

    Returns
    -------
    TailDiagnostics
        With the rho fields filled; ``A_hat`` and ``b_hat`` are left unset.
    """
    sample = _as_sorted(sample)
    taus = default_taus() if taus is None else tuple(float(t) for t in taus)
    ms = default_ms(sample) if ms is None else tuple(int(m) for m in ms)
    if not taus:
        raise ValueError("taus must be nonempty")
    if not ms:
        return TailDiagnostics(FALLBACK_RHO, fallback_used=True)

    moments = [log_moments(sample, m) for m in ms]
    paths = [[rho_from_t(t_statistic(*mom, tau)) for mom in moments] for tau in taus]
    return select_stable_rho(paths, taus, ms, precision_digits)


def select_stable_rho(paths, taus, ms, precision_digits=1):
    """Pick the most stable rho path.

    ``paths[i][j]`` is the unrounded estimate at ``taus[i]`` and ``ms[j]``.
    Invalid entries (NaN or ``>= 0``) break runs.
    """
    best = None  # (length, tau_index, start, path)
    first_valid = None
    for ti, tau in enumerate(taus):
        path = np.asarray(paths[ti], dtype=float)
        valid = np.isfinite(path) & (path < 0)
        if first_valid is None and valid.any():
            first_valid = (ti, path, valid)
        rounded = np.round(np.where(valid, path, 0.0), precision_digits)
        start, length = _run_bounds(rounded, valid)
        if length > 0 and (best is None or length > best[0]):
            best = (length, ti, start, path)

    if best is None:
        return TailDiagnostics(FALLBACK_RHO, fallback_used=True)
    length, ti, start, path = best
    if length == 1:
        ti, path, valid = first_valid
        pos = np.flatnonzero(valid)
        mid = int(pos[(pos.size - 1) // 2])
        return TailDiagnostics(float(path[mid]), taus[ti], ms[mid], run_length=1, unstable=True)
    seg = path[start:start + length]
    mid = start + (length - 1) // 2
    return TailDiagnostics(float(np.median(seg)), taus[ti], ms[mid], run_length=length)


def a_estimate(sample, k, xi_mle, rho_hat):
    """Estimate the second-order auxiliary function at ``n/k``.

    ``A = (xi + rho)(1 - rho)^2 (M2 - 2 M1^2) / (2 xi rho M1)`` with the
    log-moments taken at ``m = k``.

    Raises
    ------
    DomainError
        On ``xi_mle <= 0`` or a denominator below ``1e-14`` in magnitude.
    """
    if not xi_mle > 0:
        raise DomainError("a_estimate needs a positive shape estimate")
    m1, m2, _ = log_moments(sample, k)
    return a_from_moments(m1, m2, xi_mle, rho_hat)


def a_from_moments(m1, m2, xi, rho):
    den = 2.0 * xi * rho * m1
    if not abs(den) >= _DEGENERATE:
        raise DomainError("degenerate denominator in the A estimate")
    return (xi + rho) * (1.0 - rho) ** 2 * (m2 - 2.0 * m1 * m1) / den


def bias_vector(xi_mle, rho_hat):
    """Asymptotic MLE bias direction ``[xi + 1, -rho] / ((1 - rho)(1 + xi - rho))``."""
    den = (1.0 - rho_hat) * (1.0 + xi_mle - rho_hat)
    if den == 0:
        raise DomainError("bias vector denominator vanishes")
    return (xi_mle + 1.0) / den, -rho_hat / den
