"""CVaR estimators for heavy-tailed samples.

``SA`` averages the observations above the empirical VaR. ``BPOT`` plugs the
raw GPD maximum-likelihood fit above an automatically chosen threshold into
the peaks-over-threshold CVaR formula. ``UPOT`` additionally removes the
asymptotic MLE bias and the GPD approximation error, and reports an
asymptotic confidence interval.
"""
import enum
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import DomainError
from .gpd import GpdFit
from .sample import SortedSample
from .secondorder import TailDiagnostics, a_estimate, adarho, bias_vector
from .specfun import std_normal_quantile
from .threshold import ThresholdChoice, ThresholdGrid, autothresh

__all__ = [
    "Method",
    "CvarEstimate",
    "LevelTooLowError",
    "var_sa",
    "cvar_sa",
    "corrected_params",
    "pot_cvar",
    "i_function",
    "k_function",
    "epsilon_hat",
    "d_beta",
    "d_beta_gradient",
    "mle_covariance",
    "asymptotic_variance",
    "estimate",
    "EPS_CAP",
]

EPS_CAP = 0.5
_MARGIN = 1e-6
_BRANCH_I = 1e-9
_BRANCH_K = 1e-6


class Method(str, enum.Enum):
    SA = "SA"
    BPOT = "BPOT"
    UPOT = "UPOT"

    @classmethod
    def parse(cls, text):
        return text if isinstance(text, cls) else cls(str(text).upper())


class LevelTooLowError(DomainError):
    """The requested level does not exceed ``1 - k/n`` at the threshold."""


@dataclass(frozen=True)
class CvarEstimate:
    """A CVaR estimate with optional confidence interval and diagnostics.

    ``diagnostics`` is a plain dict; for POT methods it holds the threshold
    choice (``u``, ``k``, ``percentile``), the raw ``fit``, and for UPOT the
    second-order ``tail`` diagnostics, corrected parameters, ``epsilon_hat``,
    ``V_hat`` and the clamp flags.
    """

    alpha: float
    method: Method
    value: float
    ci_lower: float = None
    ci_upper: float = None
    diagnostics: dict = field(default_factory=dict)

    @property
    def sa_fallback(self):
        return bool(self.diagnostics.get("sa_fallback", False))

    @property
    def has_ci(self):
        return self.ci_lower is not None

    def to_dict(self):
        """JSON-ready representation (NaN mapped to None)."""
        return _jsonable({
            "alpha": self.alpha,
            "method": self.method.value,
            "value": self.value,
            "ci_lower": self.ci_lower,
            "ci_upper": self.ci_upper,
            "diagnostics": self.diagnostics,
        })


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, frozenset, set)):
        items = sorted(obj) if isinstance(obj, (frozenset, set)) else obj
        return [_jsonable(v) for v in items]
    if isinstance(obj, (GpdFit, TailDiagnostics)):
        return _jsonable(asdict(obj))
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return None if not math.isfinite(v) else v
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def _sorted(sample):
    return sample if isinstance(sample, SortedSample) else SortedSample(sample)


def _check_alpha(alpha):
    if not 0 < alpha < 1:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")


def var_sa(sample, alpha):
    """Empirical VaR ``X_(ceil(alpha n))``."""
    _check_alpha(alpha)
    sample = _sorted(sample)
    m = max(1, int(math.ceil(alpha * sample.n - 1e-9)))
    return sample.order_stat(m)


def cvar_sa(sample, alpha):
    """Average of all observations at or above the empirical VaR."""
    sample = _sorted(sample)
    v = var_sa(sample, alpha)
    x = sample.values
    tail = x[np.searchsorted(x, v, side="left"):]
    return math.fsum(tail) / tail.size


def pot_cvar(xi, sigma, u, k, n, alpha):
    """Peaks-over-threshold CVaR ``u + sigma/(1-xi) (1 + (s^xi - 1)/xi)``.

    Here ``s = k / (n (1 - alpha))``; ``xi = 0`` takes the limit ``log s``.

    Raises
    ------
    LevelTooLowError
        When ``alpha < 1 - k/n`` (``s < 1``).
    DomainError
        When ``xi >= 1`` or ``sigma <= 0``.
    """
    _check_alpha(alpha)
    if not xi < 1:
        raise DomainError(f"POT CVaR needs xi < 1, got {xi}")
    if not sigma > 0:
        raise DomainError("sigma must be positive")
    s = k / (n * (1.0 - alpha))
    if s < 1.0 - 1e-12:
        raise LevelTooLowError(f"alpha={alpha} is not above 1 - k/n = {1 - k / n}")
    log_s = math.log(s)
    bracket = log_s if xi == 0 else math.expm1(xi * log_s) / xi
    return u + sigma / (1.0 - xi) * (1.0 + bracket)


def i_function(xi, rho, x):
    """Second-order kernel ``I_{xi,rho}(x)`` for ``x >= 1``."""
    if x < 1:
        raise DomainError("I is defined for x >= 1")
    if rho > 0:
        raise DomainError("rho must be nonpositive")
    lx = math.log(x)
    first = math.expm1(xi * lx) / xi
    if rho == 0:
        return (math.exp(xi * lx) * lx - first) / xi
    if abs(xi + rho) < _BRANCH_I:
        return (lx - first) / rho
    return (math.expm1((xi + rho) * lx) / (xi + rho) - first) / rho


def k_function(xi, rho, beta):
    """Limit constant ``K_{xi,rho}(beta) = -beta * int_beta^inf I(x)/x^2 dx``.

    Closed forms for the three cases; ``|xi + rho| < 1e-6`` and ``|rho| < 1e-6``
    route to the degenerate branches.
    """
    if not 0 < xi < 1:
        raise DomainError(f"K needs xi in (0, 1), got {xi}")
    if rho > 0:
        raise DomainError("rho must be nonpositive")
    if beta < 1:
        raise DomainError("K needs beta >= 1")
    lb = math.log(beta)
    bx = math.exp(xi * lb)
    head = bx / (xi * (1.0 - xi))
    if abs(rho) < _BRANCH_K:
        return head * ((1.0 - 2.0 * xi) / (xi * (1.0 - xi)) - lb) - 1.0 / xi**2
    if abs(xi + rho) < _BRANCH_K:
        return (head - lb - 1.0 - 1.0 / xi) / rho
    xr = xi + rho
    return (head - (math.exp(xr * lb) / (1.0 - xr) + rho / xi) / xr) / rho


def epsilon_hat(sigma_n, A_hat, xi_n, rho_hat, k, n, alpha):
    """Estimated GPD approximation error ``sigma_n * A_hat * K(k/(n(1-alpha)))``."""
    s = k / (n * (1.0 - alpha))
    if s < 1.0 - 1e-12:
        raise LevelTooLowError(f"alpha={alpha} is not above 1 - k/n")
    if A_hat == 0:
        return 0.0
    return sigma_n * A_hat * k_function(xi_n, rho_hat, max(s, 1.0))


def corrected_params(fit, diag, xi_max=0.9):
    """Bias-corrected ``(xi_n, sigma_n, clamped)``.

    ``xi_n = xi - A b1`` and ``sigma_n = sigma (1 - A b2)``. If that leaves
    ``xi_n`` outside ``(0, 1)`` or ``sigma_n <= 0``, the correction is scaled
    by the largest factor in ``[0, 1]`` keeping ``xi_n`` in ``(0, xi_max]`` and
    ``sigma_n > 0`` (with a ``1e-6`` safety margin).
    """
    A = diag.A_hat
    b1, b2 = diag.b_hat
    if A == 0 or not (math.isfinite(b1) and math.isfinite(b2)):
        return fit.xi, fit.sigma, False
    c1, c2 = A * b1, A * b2
    xi_n, factor = fit.xi - c1, 1.0 - c2
    if 0 < xi_n < 1 and factor > 0:
        return xi_n, fit.sigma * factor, False
    lam = 1.0
    lo, hi = _MARGIN, xi_max
    if c1 > 0:
        lam = min(lam, (fit.xi - lo) / c1)
    elif c1 < 0:
        lam = min(lam, (fit.xi - hi) / c1)
    if c2 > 0:
        lam = min(lam, (1.0 - _MARGIN) / c2)
    lam = max(lam, 0.0)
    return fit.xi - lam * c1, fit.sigma * (1.0 - lam * c2), True


def d_beta(x, y, beta):
    """Normalized POT CVaR functional ``y/(1-x) (1 + (beta^x - 1)/x)``."""
    return y / (1.0 - x) * (1.0 + math.expm1(x * math.log(beta)) / x)


def d_beta_gradient(xi, beta):
    """Gradient of :func:`d_beta` in ``(x, y)`` at ``(xi, 1)``."""
    bx = beta**xi
    lb = math.log(beta)
    dx = bx * (2 * xi + xi * (1 - xi) * lb - 1) / (xi**2 * (1 - xi) ** 2) + 1.0 / xi**2
    dy = (bx + xi - 1) / (xi * (1 - xi))
    return dx, dy


def mle_covariance(xi):
    """Asymptotic covariance of ``sqrt(k) (xi_hat - xi, sigma_hat/a - 1)``."""
    a = 1.0 + xi
    return np.array([[a * a, -a], [-a, 1.0 + a * a]])


def asymptotic_variance(xi, beta):
    """``V = grad^T Sigma grad + 1`` of the POT CVaR estimator (normalized)."""
    if not 0 < xi < 1:
        raise DomainError(f"V needs xi in (0, 1), got {xi}")
    if beta < 1:
        raise DomainError("V needs beta >= 1")
    g = np.array(d_beta_gradient(xi, beta))
    return float(g @ mle_covariance(xi) @ g) + 1.0


def _select_threshold(sample, alpha, grid):
    n = sample.n
    choice = autothresh(sample, grid)
    if choice.is_nan or choice.k / (n * (1.0 - alpha)) >= 1.0 - 1e-12:
        return choice, False
    sub = grid.restricted_below(alpha)
    if sub is None:
        return None, True
    choice = autothresh(sample, sub)
    # index back into the full grid
    if not choice.is_nan:
        idx = grid.percentiles.index(choice.percentile)
        choice = ThresholdChoice(choice.u, choice.k, choice.fit, idx, choice.pvalues,
                                 choice.rejected_for_xi, choice.failed, choice.percentile, False)
        if choice.k / (n * (1.0 - alpha)) < 1.0 - 1e-12:
            return None, True
    return choice, True


def _fallback(sample, alpha, method, reason, extra=None):
    diag = {"sa_fallback": True, "fallback_reason": reason}
    diag.update(extra or {})
    return CvarEstimate(alpha, method, cvar_sa(sample, alpha), None, None, diag)


def estimate(sample, alpha, method="UPOT", delta=0.05, grid=None, *, threshold=None,
             rho_hat=None, A_hat=None, taus=None, ms=None):
    """Estimate ``CVaR_alpha`` from a sample.

    Parameters
    ----------
    sample : SortedSample or array_like
    alpha : float
        Confidence level in ``(0, 1)``.
    method : {"SA", "BPOT", "UPOT"}
    delta : float
        The UPOT interval has nominal coverage ``1 - delta``.
    grid : ThresholdGrid, optional
        Threshold candidates; defaults to percentiles 0.79..0.98.
    threshold : ThresholdChoice, optional
        Reuse a previously computed threshold selection.
    rho_hat, A_hat : float, optional
        Pin the second-order estimates instead of estimating them.
    taus, ms : sequence, optional
        ADARHO grids.

    Returns
    -------
    CvarEstimate
        POT methods fall back to the sample average (``sa_fallback``) when no
        admissible threshold exists. A positive UPOT correction is limited to
        ``EPS_CAP * (c_hat - u)`` and flagged ``correction_clamped``.
    """
    _check_alpha(alpha)
    if not 0 < delta < 1:
        raise DomainError("delta must lie in (0, 1)")
    method = Method.parse(method)
    sample = _sorted(sample)
    n = sample.n
    if method is Method.SA:
        return CvarEstimate(alpha, method, cvar_sa(sample, alpha), None, None, {"n": n})

    grid = grid or ThresholdGrid()
    restricted = False
    if threshold is None:
        threshold, restricted = _select_threshold(sample, alpha, grid)
        if threshold is None:
            return _fallback(sample, alpha, method, "level_too_low", {"n": n})
    if threshold.is_nan:
        return _fallback(sample, alpha, method, "no_admissible_threshold",
                         {"n": n, "rejected_for_xi": threshold.rejected_for_xi,
                          "failed_fits": threshold.failed})
    fit, u, k = threshold.fit, threshold.u, threshold.k
    diag = {"n": n, "u": u, "k": k, "percentile": threshold.percentile,
            "candidate_index": threshold.candidate_index, "grid_restricted": restricted,
            "sa_fallback": False, "fit": fit}
    if method is Method.BPOT:
        return CvarEstimate(alpha, method, pot_cvar(fit.xi, fit.sigma, u, k, n, alpha), None, None, diag)

    # UPOT
    if rho_hat is None:
        tail = adarho(sample, taus, ms)
    else:
        tail = TailDiagnostics(float(rho_hat))
    a_failed = False
    if A_hat is None:
        try:
            A_hat = a_estimate(sample, k, fit.xi, tail.rho_hat)
        except (DomainError, ValueError):
            A_hat, a_failed = 0.0, True
    tail = tail.with_a(A_hat, bias_vector(fit.xi, tail.rho_hat), a_failed)
    xi_n, sigma_n, params_clamped = corrected_params(fit, tail, grid.xi_max)
    c_hat = pot_cvar(xi_n, sigma_n, u, k, n, alpha)
    s = k / (n * (1.0 - alpha))
    eps = epsilon_hat(sigma_n, tail.A_hat, xi_n, tail.rho_hat, k, n, alpha) if xi_n > 0 else 0.0
    # a downward correction may not take the estimate most of the way to u
    cap = EPS_CAP * (c_hat - u)
    eps_clamped = eps > cap
    if eps_clamped:
        eps = cap
    value = c_hat - eps
    v_hat = asymptotic_variance(xi_n, max(s, 1.0)) if 0 < xi_n < 1 else math.nan
    z = float(std_normal_quantile(1.0 - delta / 2.0))
    half = z * sigma_n * math.sqrt(v_hat / k)
    diag.update({
        "tail": tail,
        "xi_n": xi_n,
        "sigma_n": sigma_n,
        "params_clamped": params_clamped,
        "c_hat_uncorrected": c_hat,
        "epsilon_hat": eps,
        "correction_clamped": eps_clamped,
        "beta": s,
        "V_hat": v_hat,
        "z": z,
        "delta": delta,
    })
    lower, upper = (value - half, value + half) if math.isfinite(half) else (None, None)
    return CvarEstimate(alpha, method, value, lower, upper, diag)
