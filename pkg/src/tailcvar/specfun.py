"""Special functions needed by the exact CVaR formulas and the normal quantile.

Gamma-type functions and the regularized incomplete beta are thin, domain-checked
wrappers around :mod:`math` and :mod:`scipy.special`.  The Gauss hypergeometric
function is summed directly after a Pfaff transformation because only the
half-line ``z <= 0`` is ever needed.
"""
import math

from scipy import special

from .errors import ConvergenceError, DomainError

__all__ = [
    "ln_gamma",
    "upper_incomplete_gamma",
    "lower_incomplete_gamma",
    "reg_incomplete_beta",
    "hyp2f1",
    "std_normal_quantile",
]


def ln_gamma(x):
    """Natural log of the gamma function for ``x > 0``."""
    x = float(x)
    if not x > 0 or not math.isfinite(x):
        raise DomainError(f"ln_gamma requires a finite x > 0, got {x!r}")
    return math.lgamma(x)


def upper_incomplete_gamma(a, x):
    """Non-regularized upper incomplete gamma ``Γ(a, x) = ∫_x^∞ t^{a-1} e^{-t} dt``.

    ``a`` may be any real number; for ``a <= 0`` the value is reached by the
    downward recurrence ``Γ(a, x) = (Γ(a+1, x) - x^a e^{-x}) / a`` and requires
    ``x > 0``.
    """
    a = float(a)
    x = float(x)
    if not math.isfinite(a) or not math.isfinite(x):
        raise DomainError("upper_incomplete_gamma requires finite arguments")
    if x < 0:
        raise DomainError(f"upper_incomplete_gamma requires x >= 0, got {x!r}")
    if a > 0:
        if x == 0:
            value = math.exp(ln_gamma(a)) if a < 171.6 else math.inf
        else:
            # Q(a,x) * Γ(a) in log space keeps large a from overflowing early
            q = special.gammaincc(a, x)
            value = 0.0 if q == 0 else math.exp(math.log(q) + math.lgamma(a))
        if math.isinf(value):
            raise OverflowError(f"Γ({a}, {x}) overflows double precision")
        return value
    if x == 0:
        raise DomainError("Γ(a, 0) diverges for a <= 0")
    frac = a - math.floor(a)
    if frac == 0.0:
        order, value = 0.0, float(special.exp1(x))
    else:
        order, value = frac, upper_incomplete_gamma(frac, x)
    log_x = math.log(x)
    while order > a + 0.5:
        order -= 1.0
        value = (value - math.exp(order * log_x - x)) / order
    if not math.isfinite(value):
        raise OverflowError(f"Γ({a}, {x}) overflows double precision")
    return value


def lower_incomplete_gamma(a, x):
    """Non-regularized lower incomplete gamma ``γ(a, x)`` for ``a > 0, x >= 0``.

    Evaluated as ``P(a, x) Γ(a)``, which avoids the cancellation in
    ``Γ(a) - Γ(a, x)`` when ``x`` is small.
    """
    a = float(a)
    x = float(x)
    if not a > 0:
        raise DomainError(f"lower_incomplete_gamma requires a > 0, got {a!r}")
    if x < 0:
        raise DomainError(f"lower_incomplete_gamma requires x >= 0, got {x!r}")
    p = special.gammainc(a, x)
    return 0.0 if p == 0 else math.exp(math.log(p) + math.lgamma(a))


def reg_incomplete_beta(a, b, x):
    """Regularized incomplete beta function ``I_x(a, b)``."""
    a, b, x = float(a), float(b), float(x)
    if not (a > 0 and b > 0):
        raise DomainError(f"reg_incomplete_beta requires a, b > 0, got a={a!r}, b={b!r}")
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"reg_incomplete_beta requires 0 <= x <= 1, got {x!r}")
    return float(special.betainc(a, b, x))


def hyp2f1(a, b, c, z, *, max_terms=200_000, rtol=1e-16):
    """Gauss hypergeometric function ``2F1(a, b; c; z)`` for real ``z <= 0``.

    The Pfaff transformation ``2F1(a,b;c;z) = (1-z)^{-a} 2F1(a, c-b; c; w)``
    with ``w = z/(z-1)`` maps ``z <= 0`` into ``[0, 1)`` where the power series
    converges.  ``a`` and ``b`` are put in a canonical order first so the result
    is exactly symmetric in them.
    """
    a, b, c, z = float(a), float(b), float(c), float(z)
    if c <= 0 and c == math.floor(c):
        raise DomainError(f"hyp2f1 undefined for nonpositive integer c={c!r}")
    if z > 0:
        raise DomainError(f"hyp2f1 is only implemented for z <= 0, got {z!r}")
    if z == 0:
        return 1.0
    a, b = sorted((a, b))
    w = z / (z - 1.0)
    bb = c - b
    term = 1.0
    total = 1.0
    comp = 0.0
    for j in range(max_terms):
        term *= (a + j) * (bb + j) / ((c + j) * (j + 1.0)) * w
        # Kahan summation: long tails near w -> 1
        y = term - comp
        t = total + y
        comp = (t - total) - y
        total = t
        if term == 0.0 or (abs(term) <= rtol * abs(total) and j > 2):
            break
    else:
        raise ConvergenceError(f"hyp2f1({a}, {b}; {c}; {z}) series did not converge", max_terms)
    return total * (1.0 - z) ** (-a)


def std_normal_quantile(p):
    """Inverse of the standard normal cdf."""
    p = float(p)
    if not 0.0 < p < 1.0:
        raise DomainError(f"std_normal_quantile requires 0 < p < 1, got {p!r}")
    return float(special.ndtri(p))
