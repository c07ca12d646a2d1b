"""Tail calculators against exact and scipy oracles."""

import math
from fractions import Fraction

import pytest
from scipy import stats

from ghrlab.bitkit import Rng
from ghrlab.bounds import (
    DEFAULT_WINDOW_C,
    anticorrelated_expectation_holds,
    binomial_window_lower,
    calibrate_window_lower_c,
    chernoff_dominance_report,
    exact_binomial_deviation,
    exact_binomial_window,
    hoeffding_bound,
    hoeffding_dominance_report,
    markov_chebyshev_bound,
    relaxed_chernoff_bound,
    shift_xor_tail_check,
    window_lower_dominance_report,
)


def test_markov_chebyshev():
    assert markov_chebyshev_bound("markov", 2.0, 8.0) == 0.25
    assert markov_chebyshev_bound("chebyshev", 2.0, 4.0) == 0.125
    assert markov_chebyshev_bound("markov", 5.0, 1.0) == 1.0
    with pytest.raises(ValueError):
        markov_chebyshev_bound("markov", 1.0, 0.0)
    with pytest.raises(ValueError):
        markov_chebyshev_bound("median", 1.0, 1.0)


def test_hoeffding_formula():
    assert hoeffding_bound([(0, 1)] * 10, 2.0) == pytest.approx(2 * math.exp(-0.8))
    assert hoeffding_bound([(0, 2)] * 10, 6.0) == pytest.approx(2 * math.exp(-1.8))
    assert hoeffding_bound([(0, 1)] * 4, 0.1) == 1.0  # capped
    assert hoeffding_bound([(0, 0)], 1.0) == 0.0
    with pytest.raises(ValueError):
        hoeffding_bound([(1, 0)], 1.0)


def test_relaxed_chernoff_exp_form():
    assert relaxed_chernoff_bound("lower_tail", a=8.0, t=4.0) == pytest.approx(
        math.exp(-1.0)
    )
    assert relaxed_chernoff_bound("upper_tail", a=8.0, t=4.0) == pytest.approx(
        math.exp(-16.0 / 20.0)
    )
    assert relaxed_chernoff_bound("lower_tail", a=8.0, t=0.0) == 1.0
    assert relaxed_chernoff_bound("lower_tail", a=0.0, t=1.0) == 0.0
    assert relaxed_chernoff_bound("upper_tail", a=0.0, t=2.0) == pytest.approx(
        math.exp(-2.0)
    )
    with pytest.raises(ValueError):
        relaxed_chernoff_bound("sideways", a=1.0, t=1.0)
    with pytest.raises(ValueError):
        relaxed_chernoff_bound("lower_tail", a=1.0, t=1.0, form="closed")


def test_relaxed_chernoff_ratio_form():
    # level at the mean gives 1; level at the edge uses 0**0 = 1
    assert relaxed_chernoff_bound(
        "upper_tail", form="ratio", m=10, mu=5.0, level=5.0
    ) == 1.0
    edge = relaxed_chernoff_bound("upper_tail", form="ratio", m=10, mu=5.0, level=10.0)
    assert edge == pytest.approx(0.5**10)
    with pytest.raises(ValueError):
        relaxed_chernoff_bound("upper_tail", form="ratio", m=10, mu=5.0, level=4.0)
    with pytest.raises(ValueError):
        relaxed_chernoff_bound("lower_tail", form="ratio", m=10, mu=5.0, level=6.0)


def test_ratio_form_dominates_biased_binomial():
    """Classic Chernoff-Hoeffding check against scipy for p != 1/2."""
    for m, p in ((40, 0.3), (60, 0.7)):
        mu = m * p
        for level in range(int(mu) + 1, m + 1):
            bound = relaxed_chernoff_bound(
                "upper_tail", form="ratio", m=m, mu=mu, level=level
            )
            exact = stats.binom.sf(level - 1, m, p)
            assert exact <= bound + 1e-12
        for level in range(0, int(mu)):
            bound = relaxed_chernoff_bound(
                "lower_tail", form="ratio", m=m, mu=mu, level=level
            )
            exact = stats.binom.cdf(level, m, p)
            assert exact <= bound + 1e-12


def test_exp_form_dominates_hypergeometric():
    """Sampling without replacement stays under the relaxed exp bounds."""
    for m in (20, 60, 100):
        mu = m / 2.0
        for t in range(1, m // 6 + 1):
            lower = stats.hypergeom.cdf(mu - t, 2 * m, m, m)
            upper = stats.hypergeom.sf(mu + t - 1, 2 * m, m, m)
            assert lower <= relaxed_chernoff_bound("lower_tail", a=mu, t=t) + 1e-12
            assert upper <= relaxed_chernoff_bound("upper_tail", a=mu, t=t) + 1e-12


def test_exact_binomial_window_against_scipy():
    for m, a, b in ((10, 3, 7), (31, 0, 15), (64, 28, 36)):
        exact = exact_binomial_window(m, a, b)
        ref = stats.binom.cdf(b, m, 0.5) - (stats.binom.cdf(a - 1, m, 0.5) if a else 0)
        assert float(exact) == pytest.approx(ref, abs=1e-12)
    assert exact_binomial_window(4, 0, 4) == 1
    with pytest.raises(ValueError):
        exact_binomial_window(4, 3, 2)


def test_exact_binomial_deviation():
    assert exact_binomial_deviation(4, 0) == 1
    assert exact_binomial_deviation(4, 2) == Fraction(2, 16)
    assert exact_binomial_deviation(4, Fraction(1, 2)) == Fraction(10, 16)
    ref = stats.binom.cdf(10, 31, 0.5) + stats.binom.sf(20, 31, 0.5)
    assert float(exact_binomial_deviation(31, 5.5)) == pytest.approx(ref, abs=1e-12)


def test_window_lower_formula_and_validation():
    m, a, b = 100, 45, 55
    main = math.sqrt(2 / (math.pi * m)) * (b - a)
    cubic = math.sqrt(8 / (9 * math.pi * m**3)) * ((b - 50) ** 3 - (a - 50) ** 3)
    assert binomial_window_lower(m, a, b) == pytest.approx(
        main - cubic - DEFAULT_WINDOW_C / m
    )
    with pytest.raises(ValueError):
        binomial_window_lower(99, 45, 55)
    with pytest.raises(ValueError):
        binomial_window_lower(100, 55, 45)


def test_window_calibration_regression():
    # shipped constant must still satisfy its defining grid search
    assert calibrate_window_lower_c(tuple(range(50, 201, 2))) <= DEFAULT_WINDOW_C


def test_dominance_reports_small_grids():
    assert hoeffding_dominance_report(range(10, 60)).passed
    assert chernoff_dominance_report(range(10, 60)).passed
    assert window_lower_dominance_report(tuple(range(50, 121, 2))).passed


def test_dominance_report_flags_violations():
    bad = window_lower_dominance_report(tuple(range(50, 61, 2)), c_term=-5.0)
    assert not bad.passed
    assert len(bad.violations()) > 0


def test_shift_xor_tail_check_small():
    report = shift_xor_tail_check(32, [4, 8], 2000, Rng(13))
    assert report.passed
    assert len(report.points) == 31 * 2
    with pytest.raises(ValueError):
        shift_xor_tail_check(1, [1], 10, Rng(0))
    with pytest.raises(ValueError):
        shift_xor_tail_check(8, [-1], 10, Rng(0))


def test_shift_xor_tail_check_thread_invariant(monkeypatch):
    a = shift_xor_tail_check(16, [2], 500, Rng(3))
    monkeypatch.setenv("GHRLAB_THREADS", "4")
    b = shift_xor_tail_check(16, [2], 500, Rng(3))
    assert a == b


def test_anticorrelated_trivial_cases():
    # constant f: any mu passes
    assert anticorrelated_expectation_holds([(2.0, 0.7), (2.0, 0.2), (2.0, 0.1)])
    # uniform mu: any f passes
    third = 1.0 / 3.0
    assert anticorrelated_expectation_holds([(5.0, third), (1.0, third), (9.0, third)])


def test_anticorrelated_decreasing_case():
    values = [(3.0, 0.1), (2.0, 0.2), (1.0, 0.7)]
    assert anticorrelated_expectation_holds(values)


def test_anticorrelated_rejects_positive_correlation():
    with pytest.raises(ValueError):
        anticorrelated_expectation_holds([(1.0, 0.1), (2.0, 0.9)])
    with pytest.raises(ValueError):
        anticorrelated_expectation_holds([(1.0, -0.5), (2.0, 1.5)])
    with pytest.raises(ValueError):
        anticorrelated_expectation_holds([(1.0, 0.4), (2.0, 0.4)])
    with pytest.raises(ValueError):
        anticorrelated_expectation_holds([])
