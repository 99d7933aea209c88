import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tailcvar.analysis import (
    avar_curve,
    avar_sa_frechet,
    avar_upot,
    coverage_probability,
    k_of_n,
    run_metrics,
)
from tailcvar.cvar import asymptotic_variance, cvar_sa
from tailcvar.distributions import parse_distribution
from tailcvar.errors import DomainError
from tailcvar.sample import SortedSample
from tailcvar.specfun import upper_incomplete_gamma


def test_k_of_n():
    assert k_of_n(10**4) == 465
    assert k_of_n(8000) == 400 and k_of_n(27_000) == 900


def test_avar_upot_composition():
    assert avar_upot(0.5, 0.99, 10**4) == pytest.approx(asymptotic_variance(0.5, 465 / (10**4 * 0.01)) / 465,
                                                        rel=1e-15)
    v = avar_upot(1 / 2.25, 0.999, 10**5)
    assert math.isfinite(v) and v > 0


def test_avar_upot_decreases_with_n():
    for xi in (0.2, 0.5, 0.8):
        vals = [avar_upot(xi, 0.99, n) for n in (10**4, 2 * 10**4, 4 * 10**4, 8 * 10**4)]
        assert all(b < a for a, b in zip(vals, vals[1:]))


def test_avar_upot_increases_with_xi():
    xs = np.linspace(0.1, 0.9, 17)
    vals = [avar_upot(x, 0.99, 10**4) for x in xs]
    assert all(b > a for a, b in zip(vals, vals[1:]))


def test_avar_sa_domain_and_monotonicity():
    with pytest.raises(DomainError):
        avar_sa_frechet(2.0, 0.99, 10**4)
    assert avar_sa_frechet(2.25, 0.99, 10**4) > avar_sa_frechet(4.0, 0.99, 10**4)
    assert avar_sa_frechet(4.0, 0.999, 10**4) > avar_sa_frechet(4.0, 0.99, 10**4)


@pytest.mark.slow
def test_avar_sa_matches_monte_carlo():
    gamma, alpha, n, reps = 4.0, 0.99, 10**4, 2000
    d = parse_distribution(f"frechet:{gamma}")
    est = [cvar_sa(SortedSample(d.sample(np.random.default_rng([41, r]), n)), alpha) for r in range(reps)]
    mc = float(np.var(est, ddof=1))
    assert avar_sa_frechet(gamma, alpha, n) == pytest.approx(mc, rel=0.15)


def test_incomplete_gamma_shortcuts_disagree_with_exact():
    # both readings of the upper-incomplete-gamma formula miss the exact variance by far
    gamma, alpha, n = 4.0, 0.99, 10**4
    q = (-math.log(alpha)) ** (-1 / gamma)
    exact = avar_sa_frechet(gamma, alpha, n)
    for arg in (q, q**-gamma):
        lit = (upper_incomplete_gamma(1 - 2 / gamma, arg) - upper_incomplete_gamma(1 - 1 / gamma, arg) ** 2) / (
            n * (1 - alpha) ** 2)
        assert abs(lit / exact - 1) > 0.3


def test_avar_curve_ordering_heavy_tail():
    pts = avar_curve(2.25, 0.999, range(10**4, 10**5 + 1, 10**4))
    assert len(pts) == 10 and all(p.avar_sa > p.avar_upot for p in pts)
    assert avar_curve(1.8, 0.999, [10**4])[0].avar_sa is None


def test_run_metrics_examples():
    assert run_metrics([5.0], 5.0) == (0.0, 0.0)
    assert run_metrics([4.0, 6.0], 5.0) == (1.0, 0.0)
    rmse, bias = run_metrics([1.0, 2.0, 6.0], 2.0)
    assert bias == pytest.approx(1.0) and rmse == pytest.approx(math.sqrt(17 / 3))
    with pytest.raises(ValueError):
        run_metrics([], 1.0)


def test_coverage_probability_examples():
    assert coverage_probability([(4.0, 6.0)] * 3, 5.0) == 1.0
    assert coverage_probability([(6.0, 7.0), (1.0, 2.0)], 5.0) == 0.0
    assert coverage_probability([(5.0, 6.0), (1.0, 2.0)], 5.0) == 0.5


@given(st.lists(st.tuples(st.integers(-100, 100), st.integers(0, 50)), min_size=1, max_size=30),
       st.integers(-100, 100), st.integers(-3, 3), st.integers(-50, 50))
def test_coverage_affine_invariance(raw, truth, log2a, b):
    # integer endpoints and a power-of-two scale keep the arithmetic exact
    iv = [(float(lo), float(lo + w)) for lo, w in raw]
    a = 2.0**log2a
    moved = [(a * lo + b, a * hi + b) for lo, hi in iv]
    assert coverage_probability(moved, a * truth + b) == coverage_probability(iv, truth)
