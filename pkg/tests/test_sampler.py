import math
from collections import Counter
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from scipy import stats

from rgsfp.combinat import bell, stirling2
from rgsfp.fixdist import distribution, expectation_theta
from rgsfp.rgs import enumerate_rgs, validate
from rgsfp.sampler import (
    Histogram,
    RngStream,
    empirical_fixdist,
    mu_weights,
    sample_m,
    sample_partition,
    throw_balls,
    transition_law_check,
    transition_probability,
)


def test_mu_weights_examples():
    w = mu_weights(2)
    assert w.weights[:3] == (1, 2, Fraction(3, 2))
    assert all(x > 0 for x in w.weights)
    assert w.tail_bound <= w.total / 2**64


def test_mu_weights_normaliser_is_e_times_bell():
    with mpmath.workprec(256):
        for n in range(1, 61):
            w = mu_weights(n)
            ratio = mpmath.mpf(w.total.numerator) / w.total.denominator / (mpmath.e * bell(n))
            assert 1 - mpmath.mpf(2) ** -64 <= ratio <= 1


def test_mu_one_probability_of_one_box():
    assert abs(float(mu_weights(1).probability(1)) - math.exp(-1)) < 1e-15


def test_sample_m_determinism():
    w = mu_weights(7)
    a = [sample_m(w, RngStream(123, 4)) for _ in range(1)]
    b = [sample_m(w, RngStream(123, 4)) for _ in range(1)]
    assert a == b
    r1, r2 = RngStream(5, 0), RngStream(5, 0)
    assert [sample_m(w, r1) for _ in range(50)] == [sample_m(w, r2) for _ in range(50)]


def test_streams_differ():
    w = mu_weights(7)
    r1, r2 = RngStream(5, 0), RngStream(5, 1)
    assert [sample_m(w, r1) for _ in range(50)] != [sample_m(w, r2) for _ in range(50)]


def test_sample_m_law_n1():
    rng = RngStream(2024, 0)
    w = mu_weights(1)
    draws = 100_000
    hits = sum(sample_m(w, rng) == 1 for _ in range(draws))
    p = math.exp(-1)
    assert abs(hits / draws - p) <= 3 * math.sqrt(p * (1 - p) / draws)


def test_sample_m_ratio_n2():
    rng = RngStream(99, 0)
    w = mu_weights(2)
    tally = Counter(sample_m(w, rng) for _ in range(100_000))
    # P(M=2)/P(M=1) = w_2/w_1 = 2; delta-method sigma of the ratio
    p1 = float(w.probability(1))
    p2 = float(w.probability(2))
    n = 100_000
    ratio = tally[2] / tally[1]
    sigma = 2 * math.sqrt((1 - p2) / (n * p2) + (1 - p1) / (n * p1) + 2 / n)
    assert abs(ratio - 2) <= 3 * sigma


def test_big_bound_draws_are_uniform_in_range():
    rng = RngStream(1, 0)
    bound = 3 * 2**200 + 17
    draws = [rng.below(bound) for _ in range(2000)]
    assert all(0 <= d < bound for d in draws)
    # the top two bits of a uniform draw on [0, 3*2**200) hit 0, 1, 2 equally
    tally = Counter(d >> 200 for d in draws)
    assert set(tally) <= {0, 1, 2, 3}
    assert stats.chisquare([tally[0], tally[1], tally[2]]).pvalue > 0.001


def test_outputs_are_rgs_and_traces_consistent():
    rng = RngStream(7, 3)
    for _ in range(10_000):
        pi, trace = sample_partition(30, rng)
        assert validate(list(pi)) == pi
        assert trace.nonempty[0] == 1
        prev = 0
        for i, (x, count) in enumerate(zip(trace.x, trace.nonempty), start=1):
            assert count - prev in (0, 1)
            assert count <= min(i, trace.m)
            if count > prev:
                assert x == count
            else:
                assert x <= prev
            prev = count
        assert pi.max_letter <= trace.m
        assert pi.fixed_points() == trace.prefix_statistic()


def test_reproducible_histograms():
    a = empirical_fixdist(12, 500, RngStream(11, 2))
    b = empirical_fixdist(12, 500, RngStream(11, 2))
    assert a == b
    assert (a + b).total == 1000


def test_uniform_against_enumeration_sampler():
    # oracle sampler: pick a uniform element of the enumerated R_5
    n = 5
    words = [tuple(p) for p in enumerate_rgs(n)]
    gen = np.random.default_rng(17)
    oracle = Counter(words[i] for i in gen.integers(len(words), size=40_000))
    rng = RngStream(17, 0)
    stam = Counter(tuple(sample_partition(n, rng)[0]) for _ in range(40_000))
    table = np.array([[oracle[w] for w in words], [stam[w] for w in words]])
    assert stats.chi2_contingency(table).pvalue > 0.001


def test_mean_fixed_points_n10():
    exact = distribution(10)
    hist = empirical_fixdist(10, 100_000, RngStream(10, 0))
    assert abs(hist.mean_z(exact)) <= 3
    assert exact.expectation == expectation_theta(10)


def test_small_n_bins():
    hist = empirical_fixdist(3, 100_000, RngStream(3, 0))
    exact = distribution(3)
    assert exact.as_dict() == {1: Fraction(2, 5), 2: Fraction(2, 5), 3: Fraction(1, 5)}
    assert max(abs(z) for z in hist.z_scores(exact).values()) <= 4


def test_transition_probability_examples():
    assert transition_probability(5, 3, 2) == Fraction(12, 25)
    assert transition_probability(5, 3, 2) == Fraction(stirling2(3, 2) * 120, 125 * 6)
    assert all(transition_probability(m, 1, 1) == 1 for m in range(1, 10))
    assert transition_probability(3, 5, 4) == 0


def test_transition_law_sums_to_one():
    for m in range(1, 8):
        for i in range(1, 8):
            assert sum(transition_probability(m, i, t) for t in range(1, i + 1)) == 1


def test_transition_recurrence():
    # alpha_{i,t} = t/m alpha_{i-1,t} + (m-t+1)/m alpha_{i-1,t-1}
    for m in range(1, 7):
        for i in range(2, 8):
            for t in range(2, min(m, i) + 1):
                lhs = transition_probability(m, i, t)
                rhs = Fraction(t, m) * transition_probability(m, i - 1, t) + Fraction(
                    m - t + 1, m
                ) * transition_probability(m, i - 1, t - 1)
                assert lhs == rhs
            assert transition_probability(m, i, 1) == Fraction(1, m ** (i - 1))


def test_transition_law_check_report():
    report = transition_law_check(4, 6, 50_000, RngStream(8, 0))
    assert report.max_abs_z() <= 4
    report1 = transition_law_check(9, 1, 10_000, RngStream(8, 1))
    assert report1.row(1)[2] == 10_000
    with pytest.raises(ValueError):
        transition_law_check(3, 3, 100, RngStream())


def test_throw_balls_conditioned_on_m3_never_exceeds_three():
    rng = RngStream(4, 4)
    for _ in range(2000):
        trace = throw_balls(3, 5, rng)
        assert max(trace.nonempty) <= 3


def test_histogram_csv():
    hist = Histogram(3, (0, 2, 1, 1))
    lines = hist.to_csv().splitlines()
    assert lines[0] == "j,count,empirical_p,exact_p"
    assert lines[1] == "1,2,0.5,0.4"
    assert hist.total_variation(distribution(3)) == pytest.approx(0.15)  # (0.1 + 0.15 + 0.05) / 2
