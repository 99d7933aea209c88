"""Heavy-tailed parametric families used as simulation ground truth.

Each :class:`DistributionSpec` provides its cdf, quantile and inverse survival
function, inverse-transform sampling, the exact CVaR, the true tail parameters
``(xi, rho)`` and, where a closed form exists, the auxiliary functions
``a(t) = t U'(t)`` and ``A(t) = t U''(t)/U'(t) - xi + 1`` with
``U(t) = F^{-1}(1 - 1/t)``.

Unit-scale Student-t conventions are used for the half-t family.
"""
import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import DomainError
from .specfun import hyp2f1, ln_gamma, lower_incomplete_gamma, reg_incomplete_beta

__all__ = ["Family", "DistributionSpec", "TailCharacteristics", "parse_distribution"]


class Family(str, enum.Enum):
    BURR = "burr"
    FRECHET = "frechet"
    HALFT = "halft"
    GPD = "gpd"


_ARITY = {Family.BURR: 2, Family.FRECHET: 1, Family.HALFT: 1, Family.GPD: 2}
_DISPLAY = {Family.BURR: "Burr", Family.FRECHET: "Frechet", Family.HALFT: "half-t", Family.GPD: "GPD"}


@dataclass(frozen=True)
class TailCharacteristics:
    xi: float
    rho: float
    has_closed_aux: bool


@dataclass(frozen=True)
class DistributionSpec:
    """A member of one of the supported heavy-tailed families.

    Parameters are ``Burr(c, d)``, ``Frechet(gamma)``, ``half-t(nu)`` and
    ``GPD(xi, sigma)``; all must be strictly positive.
    """

    family: Family
    params: tuple

    def __post_init__(self):
        family = Family(self.family)
        params = tuple(float(p) for p in self.params)
        object.__setattr__(self, "family", family)
        object.__setattr__(self, "params", params)
        if len(params) != _ARITY[family]:
            raise DomainError(f"{family.value} takes {_ARITY[family]} parameter(s), got {len(params)}")
        if not all(math.isfinite(p) and p > 0 for p in params):
            raise DomainError(f"{family.value} parameters must be finite and positive, got {params}")

    @classmethod
    def parse(cls, text):
        """Parse ``family:p1[,p2]``, e.g. ``burr:0.5,3`` or ``halft:2.5``."""
        return parse_distribution(text)

    def __str__(self):
        return f"{self.family.value}:" + ",".join(f"{p:g}" for p in self.params)

    @property
    def label(self):
        return f"{_DISPLAY[self.family]}(" + ", ".join(f"{p:g}" for p in self.params) + ")"

    @property
    def mean_exists(self):
        f, p = self.family, self.params
        if f is Family.BURR:
            return p[0] * p[1] > 1
        if f is Family.GPD:
            return p[0] < 1
        return p[0] > 1

    # -- distribution functions -------------------------------------------

    def cdf(self, x):
        """Exact cdf on the support ``[0, inf)``; vectorized."""
        x = np.asarray(x, dtype=float)
        if np.any(x < 0) or np.any(np.isnan(x)):
            raise DomainError("cdf argument outside the support [0, inf)")
        f, p = self.family, self.params
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            if f is Family.BURR:
                c, d = p
                out = -np.expm1(-d * np.log1p(x**c))
            elif f is Family.FRECHET:
                out = np.exp(-(x ** -p[0]))
            elif f is Family.HALFT:
                nu = p[0]
                x2 = x * x
                out = special.betainc(0.5, nu / 2.0, np.where(np.isinf(x), 1.0, x2 / (nu + x2)))
            else:
                xi, sigma = p
                out = -np.expm1(-np.log1p(xi * x / sigma) / xi)
        return out[()] if out.ndim == 0 else out

    def sf(self, x):
        """Survival function ``1 - F(x)`` computed without cancellation."""
        x = np.asarray(x, dtype=float)
        if np.any(x < 0) or np.any(np.isnan(x)):
            raise DomainError("sf argument outside the support [0, inf)")
        f, p = self.family, self.params
        with np.errstate(divide="ignore", over="ignore"):
            if f is Family.BURR:
                c, d = p
                out = np.exp(-d * np.log1p(x**c))
            elif f is Family.FRECHET:
                out = -np.expm1(-(x ** -p[0]))
            elif f is Family.HALFT:
                nu = p[0]
                out = special.betainc(nu / 2.0, 0.5, nu / (nu + x * x))
            else:
                xi, sigma = p
                out = np.exp(-np.log1p(xi * x / sigma) / xi)
        return out[()] if out.ndim == 0 else out

    def isf(self, tail):
        """Inverse survival function: the ``x`` with ``1 - F(x) = tail``.

        Working with the tail probability keeps full relative precision for
        quantiles close to 1.
        """
        s = np.asarray(tail, dtype=float)
        if np.any((s < 0) | (s > 1)) or np.any(np.isnan(s)):
            raise DomainError("tail probability must lie in [0, 1]")
        f, p = self.family, self.params
        with np.errstate(divide="ignore", over="ignore"):
            if f is Family.BURR:
                c, d = p
                out = np.expm1(-np.log(s) / d) ** (1.0 / c)
            elif f is Family.FRECHET:
                out = (-np.log1p(-s)) ** (-1.0 / p[0])
            elif f is Family.HALFT:
                nu = p[0]
                w = special.betaincinv(nu / 2.0, 0.5, s)  # nu / (nu + x^2)
                out = np.sqrt(nu * (1.0 - w) / w)
            else:
                xi, sigma = p
                out = sigma / xi * np.expm1(-xi * np.log(s))
        return out[()] if out.ndim == 0 else out

    def quantile(self, p):
        """``F^{-1}(p)`` for ``0 < p < 1``."""
        p = np.asarray(p, dtype=float)
        if np.any((p <= 0) | (p >= 1)) or np.any(np.isnan(p)):
            raise DomainError("quantile level must lie strictly inside (0, 1)")
        f, prm = self.family, self.params
        with np.errstate(divide="ignore"):
            if f is Family.BURR:
                c, d = prm
                out = np.expm1(-np.log1p(-p) / d) ** (1.0 / c)
            elif f is Family.FRECHET:
                # -log(p) through log1p(p - 1); p - 1 is exact for p in [0.5, 1)
                out = (-np.where(p < 0.5, np.log(p), np.log1p(p - 1.0))) ** (-1.0 / prm[0])
            elif f is Family.HALFT:
                nu = prm[0]
                w = special.betaincinv(0.5, nu / 2.0, p)  # x^2 / (nu + x^2)
                out = np.where(p < 0.5, np.sqrt(nu * w / (1.0 - w)), self.isf(1.0 - p))
            else:
                xi, sigma = prm
                out = sigma / xi * np.expm1(-xi * np.log1p(-p))
        return out[()] if out.ndim == 0 else out

    def pdf(self, x):
        """Density; used by the half-t CVaR formula."""
        x = np.asarray(x, dtype=float)
        f, p = self.family, self.params
        with np.errstate(divide="ignore", over="ignore"):
            if f is Family.BURR:
                c, d = p
                out = c * d * x ** (c - 1) * np.exp(-(d + 1) * np.log1p(x**c))
            elif f is Family.FRECHET:
                g = p[0]
                out = g * x ** (-g - 1) * np.exp(-(x**-g))
            elif f is Family.HALFT:
                out = 2.0 * _student_t_pdf(x, p[0])
            else:
                xi, sigma = p
                out = np.exp(-(1.0 / xi + 1.0) * np.log1p(xi * x / sigma)) / sigma
        return out[()] if out.ndim == 0 else out

    def sample(self, rng, count):
        """Draw ``count`` i.i.d. observations by inverse transform.

        ``rng`` is a :class:`numpy.random.Generator`; one uniform is consumed
        per draw, so equal stream states give equal samples.
        """
        if count < 1:
            raise ValueError("count must be a positive integer")
        tail = 1.0 - rng.random(int(count))  # in (0, 1]
        return np.asarray(self.isf(tail), dtype=float)

    # -- risk measures and tail parameters --------------------------------

    def true_cvar(self, alpha):
        """Exact ``CVaR_alpha = E[X | X >= VaR_alpha]``."""
        alpha = float(alpha)
        if not 0 < alpha < 1:
            raise DomainError("alpha must lie in (0, 1)")
        if not self.mean_exists:
            raise DomainError(f"{self} has an infinite mean; CVaR does not exist")
        f, p = self.family, self.params
        tail = 1.0 - alpha
        if f is Family.BURR:
            c, d = p
            # W = q^{-c}; E[X; X > q] = d W^e/e * 2F1(d+1, e; e+1; -W), e = d - 1/c
            w = 1.0 / math.expm1(-math.log(tail) / d)
            e = d - 1.0 / c
            head = d * math.exp(e * math.log(w)) / e
            return head * hyp2f1(d + 1.0, e, e + 1.0, -w) / tail
        if f is Family.FRECHET:
            s = 1.0 - 1.0 / p[0]
            return lower_incomplete_gamma(s, -math.log(alpha)) / tail
        if f is Family.HALFT:
            nu = p[0]
            q = float(self.isf(tail))
            return 2.0 * (nu + q * q) * float(_student_t_pdf(q, nu)) / ((nu - 1.0) * tail)
        xi, sigma = p
        return sigma / (1.0 - xi) * (1.0 + math.expm1(-xi * math.log(tail)) / xi)

    def tail_characteristics(self):
        """True ``(xi, rho)``.

        For the GPD itself the second-order function ``A`` vanishes; ``rho`` is
        reported as ``-xi``, the index the log-spacing statistics converge to.
        """
        f, p = self.family, self.params
        if f is Family.BURR:
            c, d = p
            return TailCharacteristics(1.0 / (c * d), -1.0 / d, True)
        if f is Family.FRECHET:
            return TailCharacteristics(1.0 / p[0], -1.0, True)
        if f is Family.HALFT:
            return TailCharacteristics(1.0 / p[0], -2.0 / p[0], False)
        return TailCharacteristics(p[0], -p[0], True)

    def auxiliary_functions(self, t):
        """Closed-form ``(a(t), A(t))`` for ``t >= 1``.

        Raises
        ------
        DomainError
            For the half-t family, which has no closed form; see
            :meth:`auxiliary_functions_fd`.
        """
        t = float(t)
        if not t >= 1:
            raise DomainError("auxiliary functions need t >= 1")
        f, p = self.family, self.params
        if f is Family.BURR:
            c, d = p
            sm1 = math.expm1(math.log(t) / d)  # t^{1/d} - 1
            a = (sm1 + 1.0) * sm1 ** (1.0 / c - 1.0) / (c * d)
            A = (1.0 - c) / (c * d * sm1)
            return a, A
        if f is Family.FRECHET:
            g = p[0]
            xi = 1.0 / g
            lm1 = _neg_t_log1p_minus_one(t)  # L - 1, L = -t log(1 - 1/t)
            L = 1.0 + lm1
            a = (L / t) ** (-1.0 - xi) / (g * (t - 1.0))
            A = (xi - lm1 * (t * (1.0 + xi) - xi)) / ((t - 1.0) * L)
            return a, A
        if f is Family.GPD:
            xi, sigma = p
            return sigma * t**xi, 0.0
        raise DomainError("half-t has no closed-form auxiliary functions")

    def auxiliary_functions_fd(self, t, h=1e-3):
        """Approximate ``(a(t), A(t))`` by finite differences of ``log U``.

        Uses ``a = dU/dlog t`` and ``A = dlog a/dlog t - xi`` with five-point
        central stencils in ``s = log t``.  Accurate to roughly ``1e-6`` relative;
        available for every family including half-t.
        """
        t = float(t)
        if not t > 1:
            raise DomainError("finite-difference auxiliary functions need t > 1")
        s0 = math.log(t)
        h = min(h, 0.25 * math.log(t)) if t < math.e else h

        def u_of(s):
            return float(self.isf(math.exp(-s)))

        def dlog(fn, s):
            return (-fn(s + 2 * h) + 8 * fn(s + h) - 8 * fn(s - h) + fn(s - 2 * h)) / (12 * h)

        a = dlog(u_of, s0)
        log_a = lambda s: math.log(dlog(u_of, s))  # noqa: E731
        A = dlog(log_a, s0) - self.tail_characteristics().xi
        return a, A


def _neg_t_log1p_minus_one(t):
    """``-t log(1 - 1/t) - 1`` without cancellation for large ``t``."""
    if t < 1e4:
        return -t * math.log1p(-1.0 / t) - 1.0
    x = 1.0 / t
    # sum_{j>=2} x^{j-1} / j
    return sum(x ** (j - 1) / j for j in range(2, 12))


def _student_t_pdf(x, nu):
    x = np.asarray(x, dtype=float)
    log_norm = ln_gamma((nu + 1) / 2) - ln_gamma(nu / 2) - 0.5 * math.log(nu * math.pi)
    return np.exp(log_norm - (nu + 1) / 2 * np.log1p(x * x / nu))


def parse_distribution(text):
    """Parse a CLI distribution string such as ``frechet:2.0`` or ``gpd:0.5,1``."""
    if isinstance(text, DistributionSpec):
        return text
    try:
        name, _, rest = str(text).strip().partition(":")
        family = Family(name.strip().lower().replace("-", "").replace("_", ""))
        params = tuple(float(v) for v in rest.split(",") if v.strip())
    except ValueError as exc:
        raise DomainError(f"cannot parse distribution {text!r}: expected e.g. 'burr:0.5,3'") from exc
    return DistributionSpec(family, params)
