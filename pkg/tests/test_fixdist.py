import json
from collections import Counter
from fractions import Fraction

import pytest

from rgsfp.combinat import bell, theta
from rgsfp.fixdist import (
    DomainError,
    a_coeff_closed,
    a_coeffs,
    brute_distribution,
    distribution,
    expectation_brute,
    expectation_genfun,
    expectation_theta,
    float17,
    prob_fixed,
    sequence_counts,
    total_fixed_points,
)

import oracles


def oracle_histogram(n):
    return Counter(oracles.fixed_point_count(w) for w in oracles.all_rgs(n))


def test_prob_fixed_examples():
    # R_3 = {111, 112, 121, 122, 123}
    assert prob_fixed(3, 1) == Fraction(2, 5)
    assert prob_fixed(3, 2) == Fraction(2, 5) == Fraction(2 * theta(0, 2), bell(3))
    assert all(prob_fixed(n, n) == Fraction(1, bell(n)) for n in range(1, 30))


def test_n_equal_one_branches_coincide():
    assert prob_fixed(1, 1) == 1
    assert Fraction(bell(0), bell(1)) == Fraction(1, bell(1))


@pytest.mark.parametrize("j", [0, 4, -1])
def test_prob_fixed_domain(j):
    with pytest.raises(DomainError):
        prob_fixed(3, j)


def test_distribution_small():
    assert distribution(1).as_dict() == {1: 1}
    assert distribution(2).as_dict() == {1: Fraction(1, 2), 2: Fraction(1, 2)}
    zero = distribution(0)
    assert zero.as_dict() == {0: 1} and zero.expectation == 0


@pytest.mark.parametrize("n", range(1, 8))
def test_distribution_matches_definition_oracle(n):
    hist = oracle_histogram(n)
    total = sum(hist.values())
    assert distribution(n).as_dict() == {j: Fraction(hist.get(j, 0), total) for j in range(1, n + 1)}


def test_distribution_matches_enumeration_to_10():
    for n in range(1, 11):
        assert distribution(n) == brute_distribution(n)


def test_normalization_to_300():
    for n in range(1, 301):
        law = distribution(n)
        assert sum(p for _, p in law.probs) == 1
        assert all(p >= 0 for _, p in law.probs)
        assert law.expectation == sum(j * p for j, p in law.probs)


def test_counts_are_integers():
    for n in range(3, 101, 3):
        counts = sequence_counts(n)
        for j in range(2, n):
            assert counts[j] == j * theta(n - j - 1, j) == bell(n) * prob_fixed(n, j)
        assert counts[1] == bell(n - 1) == theta(n - 2, 1)


def test_expectation_examples():
    assert expectation_theta(3) == Fraction(9, 5)
    assert expectation_theta(2) == Fraction(3, 2)
    assert expectation_theta(1) == 1
    assert expectation_genfun(3) == Fraction(9, 5)
    assert expectation_genfun(1) == 1
    assert expectation_genfun(20) == expectation_theta(20)


def test_expectations_agree_to_100():
    for n in range(1, 101):
        assert expectation_theta(n) == expectation_genfun(n)


def test_expectations_match_enumeration():
    for n in range(1, 11):
        assert expectation_theta(n) == expectation_brute(n) == distribution(n).expectation


def test_a_coeff_examples():
    table = a_coeffs(3)
    assert table[1, 1] == 1
    assert (table[2, 1], table[2, 2]) == (1, 2)
    assert table[3, 2] == 5
    assert a_coeff_closed(1, 1) == 1
    assert a_coeff_closed(3, 2) == 5
    assert a_coeff_closed(30, 17) == a_coeffs(30)[30, 17]


def test_a_coeff_closed_vs_recurrence_to_30():
    table = a_coeffs(30)
    for m in range(1, 31):
        for i in range(1, m + 1):
            assert a_coeff_closed(m, i) == table[m, i]


def test_a_coeffs_match_their_generating_functions():
    table = a_coeffs(15)
    reference = oracles.a_by_series(15)
    assert all(table[m, i] == reference[m, i] for (m, i) in reference)


def test_a_row_sums_count_fixed_points():
    table = a_coeffs(10)
    for m in range(1, 11):
        total = sum(oracles.fixed_point_count(w) for w in oracles.all_rgs(m)) if m <= 7 else None
        if total is None:
            total = expectation_brute(m) * bell(m)
        assert table.row_sum(m) == total == total_fixed_points(m)


def test_total_fixed_points_examples():
    assert total_fixed_points(0) == 0
    assert total_fixed_points(2) == 3
    assert total_fixed_points(3) == 9


def test_float17_rounding():
    assert float17(Fraction(1, 3)) == "0.33333333333333333"
    assert float17(Fraction(2, 3)) == "0.66666666666666667"
    assert float17(Fraction(1, 5)) == "0.2"


def test_json_and_csv_forms():
    law = distribution(3)
    obj = json.loads(law.to_json())
    assert obj["n"] == 3
    assert [(p["j"], p["num"], p["den"]) for p in obj["probs"]] == [(1, "2", "5"), (2, "2", "5"), (3, "1", "5")]
    assert obj["expectation"] == {"num": "9", "den": "5", "float": 1.8}
    assert law.to_csv().splitlines() == ["j,num,den,float", "1,2,5,0.4", "2,2,5,0.4", "3,1,5,0.2"]


def test_json_keeps_big_integers_exact():
    law = distribution(120)
    obj = json.loads(law.to_json())
    last = obj["probs"][-1]
    assert int(last["den"]) == bell(120) and last["num"] == "1"
