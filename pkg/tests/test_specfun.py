import math

import mpmath as mp
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tailcvar.errors import ConvergenceError, DomainError
from tailcvar.specfun import (
    hyp2f1,
    ln_gamma,
    lower_incomplete_gamma,
    reg_incomplete_beta,
    std_normal_quantile,
    upper_incomplete_gamma,
)

mp.mp.dps = 30


@pytest.mark.parametrize("x", [0.1, 0.5, 1.0, 2.5, 7.0, 33.3, 171.5])
def test_ln_gamma_matches_mpmath(x):
    assert ln_gamma(x) == pytest.approx(float(mp.loggamma(x)), rel=1e-13, abs=1e-14)


@pytest.mark.parametrize("x", [0.0, -1.0, float("nan"), float("inf")])
def test_ln_gamma_domain(x):
    with pytest.raises(DomainError):
        ln_gamma(x)


@pytest.mark.parametrize(
    "a,x",
    [(0.5, 0.3), (0.5, 6.2), (2.0, 1.0), (0.3333, 2e-3), (3.7, 40.0),
     (-0.5, 0.7), (-1.5, 2.0), (-2.0, 0.4), (-0.25, 1e-3), (0.0, 1.3)],
)
def test_upper_incomplete_gamma_matches_mpmath(a, x):
    assert upper_incomplete_gamma(a, x) == pytest.approx(float(mp.gammainc(a, x, mp.inf)), rel=1e-11)


@pytest.mark.parametrize("a,x", [(0.5, 0.3), (1 - 1 / 1.5, 0.002), (2.5, 4.0), (0.2, 1e-3)])
def test_lower_incomplete_gamma_matches_mpmath(a, x):
    assert lower_incomplete_gamma(a, x) == pytest.approx(float(mp.gammainc(a, 0, x)), rel=1e-12)


@given(st.floats(0.05, 8.0), st.floats(0.01, 20.0))
def test_incomplete_gamma_halves_sum_to_gamma(a, x):
    total = lower_incomplete_gamma(a, x) + upper_incomplete_gamma(a, x)
    assert total == pytest.approx(math.gamma(a), rel=1e-11)


@given(st.floats(-3.0, 3.0).filter(lambda a: abs(a - round(a)) > 1e-3 or a > 0), st.floats(0.05, 10.0))
def test_upper_gamma_recurrence(a, x):
    lhs = upper_incomplete_gamma(a + 1, x)
    rhs = a * upper_incomplete_gamma(a, x) + x**a * math.exp(-x)
    assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-300)


@pytest.mark.parametrize("a,b,x", [(1.25, 0.5, 0.2), (0.75, 0.5, 0.999), (3.0, 2.0, 0.5)])
def test_reg_incomplete_beta(a, b, x):
    assert reg_incomplete_beta(a, b, x) == pytest.approx(float(mp.betainc(a, b, 0, x, regularized=True)), rel=1e-12)


def test_reg_incomplete_beta_domain():
    with pytest.raises(DomainError):
        reg_incomplete_beta(1.0, 1.0, 1.5)


@pytest.mark.parametrize(
    "a,b,c,z",
    [(4.0, 3.0 - 1 / 0.38, 4.0 - 1 / 0.38, -0.3), (1.0, 1.0, 2.0, -0.5), (2.5, 0.75, 1.75, -40.0),
     (3.25, 1.3, 2.3, -1e4), (0.5, 0.5, 1.5, -0.999)],
)
def test_hyp2f1_matches_mpmath(a, b, c, z):
    assert hyp2f1(a, b, c, z) == pytest.approx(float(mp.hyp2f1(a, b, c, z)), rel=1e-12)


def test_hyp2f1_log_identity():
    # 2F1(1,1;2;z) = -log(1-z)/z
    z = -0.75
    assert hyp2f1(1, 1, 2, z) == pytest.approx(-math.log1p(-z) / z, rel=1e-14)


@given(st.floats(0.1, 5), st.floats(0.1, 5), st.floats(0.2, 6), st.floats(-50, -1e-6))
def test_hyp2f1_symmetric_in_ab(a, b, c, z):
    assert hyp2f1(a, b, c, z) == hyp2f1(b, a, c, z)


def test_hyp2f1_edge_cases():
    assert hyp2f1(2.0, 3.0, 4.0, 0.0) == 1.0
    with pytest.raises(DomainError):
        hyp2f1(1.0, 1.0, 2.0, 0.5)
    with pytest.raises(DomainError):
        hyp2f1(1.0, 1.0, -2.0, -0.5)


def test_hyp2f1_reports_nonconvergence():
    with pytest.raises(ConvergenceError) as info:
        hyp2f1(1.0, 0.5, 1.5, -1e12, max_terms=10)
    assert info.value.iterations == 10


@pytest.mark.parametrize("p,expected", [(0.975, 1.959963984540054), (0.5, 0.0), (1e-10, -6.361340902404056)])
def test_std_normal_quantile(p, expected):
    assert std_normal_quantile(p) == pytest.approx(expected, rel=1e-12, abs=1e-15)


@pytest.mark.parametrize("p", [0.0, 1.0, -0.1])
def test_std_normal_quantile_domain(p):
    with pytest.raises(DomainError):
        std_normal_quantile(p)
