import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate, stats

from tailcvar.distributions import DistributionSpec, Family, parse_distribution
from tailcvar.errors import DomainError

FAMILIES = ["burr:0.38,4", "burr:2,0.75", "frechet:1.75", "frechet:2.5", "halft:1.5", "halft:2.25", "gpd:0.5,2"]


def scipy_law(spec):
    f, p = spec.family, spec.params
    if f is Family.BURR:
        return stats.burr12(p[0], p[1])
    if f is Family.FRECHET:
        return stats.invweibull(p[0])
    if f is Family.HALFT:
        return None
    return stats.genpareto(p[0], scale=p[1])


def test_parse_and_str_roundtrip():
    d = parse_distribution("burr:0.5,3")
    assert d.family is Family.BURR and d.params == (0.5, 3.0)
    assert str(d) == "burr:0.5,3"
    assert parse_distribution(str(d)) == d
    assert parse_distribution("half-t:2.5").family is Family.HALFT
    assert DistributionSpec.parse("gpd:0.5,1.0").params == (0.5, 1.0)


@pytest.mark.parametrize("text", ["burr:1", "frechet:-2", "cauchy:1", "frechet:x", "gpd:0.5,0"])
def test_parse_rejects(text):
    with pytest.raises(DomainError):
        parse_distribution(text)


@pytest.mark.parametrize("text", FAMILIES)
def test_cdf_matches_scipy(text):
    spec = parse_distribution(text)
    x = np.array([0.01, 0.5, 1.0, 3.0, 25.0, 400.0])
    if spec.family is Family.HALFT:
        ref = 2 * stats.t(spec.params[0]).cdf(x) - 1
    else:
        ref = scipy_law(spec).cdf(x)
    assert np.allclose(spec.cdf(x), ref, rtol=1e-12, atol=1e-15)


@pytest.mark.parametrize("text", FAMILIES)
@given(p=st.floats(1e-6, 1 - 1e-9))
def test_quantile_roundtrip(text, p):
    spec = parse_distribution(text)
    x = spec.quantile(p)
    assert spec.cdf(x) == pytest.approx(p, rel=1e-9, abs=1e-12)


@pytest.mark.parametrize("text", FAMILIES)
def test_isf_keeps_tail_precision(text):
    spec = parse_distribution(text)
    for tail in (1e-3, 1e-8, 1e-12):
        assert spec.sf(spec.isf(tail)) == pytest.approx(tail, rel=1e-8)


@pytest.mark.parametrize("text", FAMILIES)
def test_sampling_distribution(text):
    spec = parse_distribution(text)
    draws = spec.sample(np.random.default_rng(7), 20000)
    assert draws.shape == (20000,) and np.all(draws >= 0)
    res = stats.kstest(draws, lambda x: spec.cdf(np.maximum(x, 0)))
    assert res.pvalue > 1e-3


def test_sampling_is_reproducible():
    spec = parse_distribution("frechet:2")
    a = spec.sample(np.random.default_rng(3), 100)
    b = spec.sample(np.random.default_rng(3), 100)
    assert np.array_equal(a, b)


def density_oracle(spec, alpha):
    """CVaR from E[X; X > q] / (1 - alpha) with scipy densities and quantiles."""
    if spec.family is Family.HALFT:
        law = stats.t(spec.params[0])
        q = law.isf((1 - alpha) / 2)
        pdf = lambda x: 2 * law.pdf(x)  # noqa: E731
    else:
        law = scipy_law(spec)
        q = law.isf(1 - alpha)
        pdf = law.pdf
    def integrand(v):
        x = q * math.exp(v)
        with np.errstate(over="ignore"):
            return x * x * float(pdf(x))

    # substitution x = q e^v; the tail beyond v = 300 is far below double precision
    val, _ = integrate.quad(integrand, 0, 300, points=[1, 5, 20, 60], epsabs=0, epsrel=1e-12, limit=1000)
    return val / (1 - alpha)


@pytest.mark.parametrize("text", FAMILIES)
@pytest.mark.parametrize("alpha", [0.9, 0.998])
def test_true_cvar_matches_density_oracle(text, alpha):
    spec = parse_distribution(text)
    assert spec.true_cvar(alpha) == pytest.approx(density_oracle(spec, alpha), rel=1e-8)


def test_true_cvar_requires_finite_mean():
    with pytest.raises(DomainError):
        parse_distribution("frechet:0.9").true_cvar(0.99)
    with pytest.raises(DomainError):
        parse_distribution("gpd:1.2,1").true_cvar(0.99)


def test_tail_characteristics():
    assert parse_distribution("burr:2,0.75").tail_characteristics().rho == pytest.approx(-4 / 3)
    t = parse_distribution("halft:2.5").tail_characteristics()
    assert (t.xi, t.rho, t.has_closed_aux) == (pytest.approx(0.4), pytest.approx(-0.8), False)
    assert parse_distribution("frechet:3").tail_characteristics().rho == -1.0


def mp_aux(spec, t):
    """a(t) = t U'(t), A(t) = t U''(t)/U'(t) - xi + 1 by mpmath differentiation."""
    mp.mp.dps = 40
    c = [mp.mpf(p) for p in spec.params]
    if spec.family is Family.BURR:
        U = lambda s: (s ** (1 / c[1]) - 1) ** (1 / c[0])  # noqa: E731
    elif spec.family is Family.FRECHET:
        U = lambda s: (-mp.log(1 - 1 / s)) ** (-1 / c[0])  # noqa: E731
    else:
        U = lambda s: c[1] / c[0] * (s ** c[0] - 1)  # noqa: E731
    t = mp.mpf(t)
    d1, d2 = mp.diff(U, t, 1), mp.diff(U, t, 2)
    xi = spec.tail_characteristics().xi
    return float(t * d1), float(t * d2 / d1 - xi + 1)


@pytest.mark.parametrize("text", ["burr:0.38,4", "burr:2,0.75", "burr:0.5,3", "frechet:2", "frechet:1.5", "gpd:0.4,3"])
@pytest.mark.parametrize("t", [1.5, 10.0, 500.0, 2e5])
def test_auxiliary_functions_match_definition(text, t):
    spec = parse_distribution(text)
    a, A = spec.auxiliary_functions(t)
    a_ref, A_ref = mp_aux(spec, t)
    assert a == pytest.approx(a_ref, rel=1e-10)
    assert A == pytest.approx(A_ref, rel=1e-8, abs=1e-14)


@pytest.mark.parametrize("text", ["burr:0.5,3", "frechet:2"])
def test_finite_difference_auxiliaries_agree(text):
    spec = parse_distribution(text)
    a, A = spec.auxiliary_functions(100.0)
    a_fd, A_fd = spec.auxiliary_functions_fd(100.0)
    assert a_fd == pytest.approx(a, rel=1e-6)
    assert A_fd == pytest.approx(A, rel=1e-4, abs=1e-6)


def test_half_t_auxiliaries_are_approximate_only():
    spec = parse_distribution("halft:2.5")
    with pytest.raises(DomainError):
        spec.auxiliary_functions(10.0)
    a, A = spec.auxiliary_functions_fd(1e4)
    # A(t) is regularly varying with index rho = -0.8
    _, A2 = spec.auxiliary_functions_fd(2e4)
    assert math.log(A2 / A) / math.log(2) == pytest.approx(-0.8, abs=0.05)
