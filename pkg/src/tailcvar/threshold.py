"""Automated threshold selection by sequential Anderson-Darling tests.

Candidate thresholds are empirical quantiles on a percentile grid. A GPD is
fitted above each one, the fit is scored with the Anderson-Darling statistic,
and the ForwardStop rule picks the first threshold past the last rejection.
"""
import math
from dataclasses import dataclass, field

import numpy as np

from . import _ad_table
from .errors import DataError, DomainError, FitError
from .gpd import GpdFit, extract_excesses, fit_mle, gpd_cdf
from .sample import SortedSample

__all__ = [
    "ThresholdGrid",
    "ThresholdChoice",
    "ad_statistic",
    "ad_pvalue",
    "forward_stop",
    "autothresh",
    "percentile_index",
]

_Z_CLAMP = 1e-12
_P_MIN, _P_MAX = 0.001, 0.999


@dataclass(frozen=True)
class ThresholdGrid:
    """Percentile grid, ForwardStop significance and shape cutoff."""

    percentiles: tuple = tuple(round(0.79 + 0.01 * i, 2) for i in range(20))
    gamma: float = 0.1
    xi_max: float = 0.9

    def __post_init__(self):
        q = tuple(float(v) for v in self.percentiles)
        object.__setattr__(self, "percentiles", q)
        if not q:
            raise DomainError("percentile grid is empty")
        if any(not 0 < v < 1 for v in q):
            raise DomainError("percentiles must lie in (0, 1)")
        if any(b <= a for a, b in zip(q, q[1:])):
            raise DomainError("percentiles must be strictly increasing")
        if not 0 < self.gamma < 1:
            raise DomainError("gamma must lie in (0, 1)")
        if not self.xi_max < 1:
            raise DomainError("xi_max must be below 1")

    @classmethod
    def from_range(cls, start=0.79, end=0.98, step=0.01, gamma=0.1, xi_max=0.9):
        count = int(math.floor((end - start) / step + 1e-9)) + 1
        q = tuple(round(start + i * step, 10) for i in range(count))
        return cls(q, gamma, xi_max)

    def restricted_below(self, level):
        """Grid of the percentiles strictly below ``level`` (None if empty)."""
        q = tuple(v for v in self.percentiles if v < level)
        return ThresholdGrid(q, self.gamma, self.xi_max) if q else None


@dataclass(frozen=True)
class ThresholdChoice:
    """Outcome of :func:`autothresh`.

    ``candidate_index`` is the 0-based position in the percentile grid; it is
    -1 and ``fit`` is None when ``is_nan``.  ``pvalues`` has one entry per grid
    point, NaN for discarded candidates.
    """

    u: float
    k: int
    fit: GpdFit = None
    candidate_index: int = -1
    pvalues: tuple = ()
    rejected_for_xi: frozenset = field(default_factory=frozenset)
    failed: frozenset = field(default_factory=frozenset)
    percentile: float = math.nan
    is_nan: bool = False


def ad_statistic(excesses, fit):
    """Anderson-Darling statistic of ascending ``excesses`` under ``fit``.

    ``A^2 = -k - (1/k) sum_j (2j - 1) [log z_j + log(1 - z_{k+1-j})]`` with
    ``z_j`` the fitted cdf at the j-th excess, clamped to ``[1e-12, 1 - 1e-12]``.
    """
    y = np.asarray(excesses, dtype=float)
    z = np.clip(gpd_cdf(fit.xi, fit.sigma, y), _Z_CLAMP, 1.0 - _Z_CLAMP)
    return _ad_from_z(z)


def _ad_from_z(z):
    z = np.sort(np.asarray(z, dtype=float))
    k = z.size
    j = np.arange(1, k + 1)
    terms = (2 * j - 1) * (np.log(z) + np.log1p(-z[::-1]))
    return -k - math.fsum(terms) / k


def ad_pvalue(a2, xi):
    """Upper-tail p-value of an AD statistic for a fitted GPD with shape ``xi``.

    Critical values are interpolated linearly in ``xi`` (clamped to the table's
    range) and ``log p`` is interpolated linearly in ``a2`` between them; the
    result is clamped to ``[0.001, 0.999]``.
    """
    if math.isnan(a2):
        return math.nan
    xis = _ad_table.XI
    x = min(max(float(xi), xis[0]), xis[-1])
    crit = np.array([np.interp(x, xis, col) for col in zip(*_ad_table.CRIT)])
    logp = np.log(np.asarray(_ad_table.LEVELS))
    if a2 <= crit[0]:
        return _P_MAX
    if a2 >= crit[-1]:
        return _P_MIN
    p = math.exp(float(np.interp(a2, crit, logp)))
    return min(max(p, _P_MIN), _P_MAX)


def forward_stop(pvalues, gamma, indices=None):
    """ForwardStop selection over an ordered index set.

    Parameters
    ----------
    pvalues : sequence of float
        p-values of the tests in ``indices`` order.
    gamma : float
        Significance parameter.
    indices : sequence of int, optional
        The index set ``I`` (ascending). Defaults to ``1..len(pvalues)``.

    Returns
    -------
    int
        ``min(I)`` when no prefix qualifies, ``max(I)`` when the last one
        does, otherwise the element of ``I`` following the last qualifying
        prefix.
    """
    p = np.asarray(pvalues, dtype=float)
    if p.size == 0:
        raise ValueError("index set must be nonempty")
    idx = list(range(1, p.size + 1)) if indices is None else list(indices)
    if len(idx) != p.size:
        raise ValueError("pvalues and indices differ in length")
    stat = np.cumsum(-np.log1p(-p)) / np.arange(1, p.size + 1)
    ok = np.flatnonzero(stat <= gamma)
    if ok.size == 0:
        return idx[0]
    w = int(ok[-1])
    return idx[-1] if w == p.size - 1 else idx[w + 1]


def percentile_index(n, q):
    """1-based order-statistic index ``ceil(q*n)`` with float-noise guard."""
    return int(math.ceil(q * n - 1e-9))


def autothresh(sample, grid=None):
    """Select a POT threshold by ordered AD tests with ForwardStop.

    Candidate ``i`` uses ``u_i = X_(ceil(q_i n))`` and ``k_i = n - ceil(q_i n)``.
    Candidates whose fit fails or has ``xi > xi_max`` are discarded; if none
    survive the result has ``is_nan = True``.
    """
    if not isinstance(sample, SortedSample):
        sample = SortedSample(sample)
    grid = grid or ThresholdGrid()
    n = sample.n
    fits, pvals, rejected, failed = [], [], set(), set()
    for i, q in enumerate(grid.percentiles):
        m = percentile_index(n, q)
        k = n - m
        try:
            if m < 1 or k < 5:
                raise DataError("too few excesses")
            u, y = extract_excesses(sample, k)
            fit = fit_mle(y)
        except (DataError, FitError, IndexError):
            fits.append(None)
            pvals.append(math.nan)
            failed.add(i)
            continue
        fit = GpdFit(fit.xi, fit.sigma, fit.log_likelihood, fit.k, u, fit.xi_capped, fit.residuals)
        fits.append(fit)
        pvals.append(ad_pvalue(ad_statistic(y, fit), fit.xi))
        if fit.xi > grid.xi_max:
            rejected.add(i)
    survivors = [i for i in range(len(fits)) if i not in rejected and i not in failed]
    shown = tuple(math.nan if (i in rejected or i in failed) else pvals[i] for i in range(len(fits)))
    if not survivors:
        return ThresholdChoice(math.nan, 0, None, -1, shown, frozenset(rejected), frozenset(failed),
                               math.nan, True)
    pick = forward_stop([pvals[i] for i in survivors], grid.gamma, survivors)
    fit = fits[pick]
    return ThresholdChoice(fit.threshold_u, fit.k, fit, pick, shown, frozenset(rejected),
                           frozenset(failed), grid.percentiles[pick], False)
