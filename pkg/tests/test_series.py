import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from rgsfp.combinat import bell, stirling2
from rgsfp.fixdist import total_fixed_points
from rgsfp.series import (
    CoeffPoly,
    MixedSeries,
    NonzeroConstantTerm,
    TruncSeries,
    assemble_from_Rm,
    brute_R,
    check_eqA1,
    check_eqA2,
    dump_lines,
    eqA1_residual,
    exp_blocks,
    expand_Qk,
    expand_R_theorem1,
    expand_Rm,
    expand_T,
    mixed_integrate,
    pde_residual,
    series_exp,
)

import oracles

ORDER = 8


def poly(**terms):
    """poly(y1q2=3) -> 3 y q^2."""
    out = {}
    for key, c in terms.items():
        dy, dq = key[1:].split("q")
        out[int(dy), int(dq)] = c
    return CoeffPoly(out)


def oracle_R_counts(n):
    """sum over R_n of y^max q^F as {(deg_y, deg_q): count}, from the definition filter."""
    counts = {}
    for w in oracles.all_rgs(n):
        key = (max(w, default=0), oracles.fixed_point_count(w))
        counts[key] = counts.get(key, 0) + 1
    return counts


# -- strategies ------------------------------------------------------------------

fractions = st.fractions(min_value=-5, max_value=5, max_denominator=7)
coeff_polys = st.dictionaries(
    st.tuples(st.integers(0, 2), st.integers(0, 2)), fractions, max_size=3
).map(CoeffPoly)


def series_strategy(order=5, zero_constant=False):
    def build(cs):
        if zero_constant:
            cs = [CoeffPoly()] + cs[1:]
        return TruncSeries(cs, order)

    return st.lists(coeff_polys, min_size=order + 1, max_size=order + 1).map(build)


@settings(max_examples=40, deadline=None)
@given(series_strategy(), series_strategy(), series_strategy())
def test_product_associative(f, g, h):
    assert (f * g) * h == f * (g * h)


@settings(max_examples=40, deadline=None)
@given(series_strategy(), series_strategy())
def test_product_commutative_and_distributive(f, g):
    assert f * g == g * f
    assert f * (g + f) == f * g + f * f


@settings(max_examples=25, deadline=None)
@given(series_strategy(zero_constant=True), series_strategy(zero_constant=True))
def test_exp_turns_sums_into_products(f, g):
    assert series_exp(f + g) == series_exp(f) * series_exp(g)


def test_exp_examples():
    assert series_exp(TruncSeries.zero(6)) == TruncSeries.one(6)
    x = TruncSeries.monomial(1, 8)
    assert [c[0, 0] for c in series_exp(x)] == [Fraction(1, math.factorial(j)) for j in range(9)]
    with pytest.raises(NonzeroConstantTerm):
        series_exp(TruncSeries.one(3))


def test_exp_blocks_counts_stirling_numbers():
    s = exp_blocks(ORDER)
    for n in range(ORDER + 1):
        assert s.counts(n) == CoeffPoly({(k, 0): stirling2(n, k) for k in range(n + 1)})


def test_mixed_integrate_examples():
    u = TruncSeries.monomial(1, 4)
    one = TruncSeries.one(4)
    assert mixed_integrate(MixedSeries(((0, u),)), 5) == TruncSeries.monomial(2, 5, Fraction(1, 2))
    assert mixed_integrate(MixedSeries(((1, one),)), 5) == TruncSeries.monomial(2, 5, 1)
    # (x - u) = x*1 - u
    split = MixedSeries(((1, one), (0, -u)))
    assert mixed_integrate(split, 5) == TruncSeries.monomial(2, 5, Fraction(1, 2))


def test_mixed_series_rejects_mixed_orders():
    with pytest.raises(ValueError):
        MixedSeries(((0, TruncSeries.one(3)), (1, TruncSeries.one(4))))


def test_Qk_examples():
    q1 = expand_Qk(1, ORDER)
    assert all(q1[n] == poly(y0q1=1) for n in range(1, ORDER + 1))
    q2 = expand_Qk(2, ORDER)
    assert q2[2] == poly(y0q2=1)
    assert q2[3] == poly(y0q1=1, y0q2=2)
    assert expand_Qk(0, ORDER) == TruncSeries.one(ORDER)


def test_Qk_counts_match_definition():
    for k in range(0, 6):
        qk = expand_Qk(k, 7)
        for n in range(8):
            counts = {}
            for w in oracles.all_rgs(n):
                if max(w, default=0) == k:
                    f = oracles.fixed_point_count(w)
                    counts[0, f] = counts.get((0, f), 0) + 1
            assert qk[n] == CoeffPoly(counts), (k, n)


def test_qk_recurrence():
    assert all(check_eqA1(k, ORDER) for k in range(1, ORDER + 1))
    assert check_eqA1(5, ORDER)


def test_qk_recurrence_detects_perturbation():
    q1 = expand_Qk(1, ORDER)
    perturbed = q1 + TruncSeries.monomial(3, ORDER, poly(y0q1=1))
    assert not eqA1_residual(2, expand_Qk(2, ORDER), perturbed).is_zero()


def test_q_functional_equation():
    assert check_eqA2(ORDER)


def test_brute_R_examples():
    r = brute_R(ORDER)
    assert r[0] == CoeffPoly.const(1)
    assert r[1] == poly(y1q1=1)
    assert r[3][2, 2] == Fraction(1, 3)


def test_brute_R_matches_definition():
    r = brute_R(7)
    for n in range(8):
        assert r.counts(n) == CoeffPoly(oracle_R_counts(n))


def test_brute_R_back_to_counts():
    ogf = brute_R(ORDER).to_ogf()
    for n in range(ORDER + 1):
        at_q1 = ogf[n].subs(q=1)
        assert at_q1.subs(y=1) == bell(n)
        assert at_q1 == CoeffPoly({(k, 0): stirling2(n, k) for k in range(n + 1)})


def test_integral_form_matches_brute_force():
    assert expand_R_theorem1(ORDER) == brute_R(ORDER)


def test_integral_form_specialisations():
    r = expand_R_theorem1(ORDER)
    assert r.subs(q=1) == exp_blocks(ORDER)
    assert r.subs(q=0) == TruncSeries.one(ORDER)


def test_pde_residual_vanishes():
    assert pde_residual(ORDER).is_zero()
    assert pde_residual(brute_R(ORDER)).is_zero()


def test_pde_detects_missing_integral():
    assert not pde_residual(exp_blocks(ORDER).subs(q=2)).is_zero()


def test_Rm_examples():
    r1 = expand_Rm(1, ORDER)
    assert r1[2][1, 0] == Fraction(1, 2)  # only 11
    for n in range(1, ORDER + 1):
        assert expand_Rm(n, ORDER)[n][n, 0] == Fraction(1, math.factorial(n))
    assert expand_Rm(0, ORDER) == TruncSeries.one(ORDER)


def test_Rm_counts_match_definition():
    for m in range(0, 6):
        rm = expand_Rm(m, 7)
        for n in range(8):
            counts = {}
            for w in oracles.all_rgs(n):
                if oracles.fixed_point_count(w) == m:
                    key = (max(w, default=0), 0)
                    counts[key] = counts.get(key, 0) + 1
            assert rm.counts(n) == CoeffPoly(counts), (m, n)


def test_Rm_reassemble_R():
    assert assemble_from_Rm(ORDER) == expand_R_theorem1(ORDER)


def test_T_examples_and_counts():
    t = expand_T(10)
    assert t[0] == CoeffPoly() and t[1] == CoeffPoly.const(1)
    assert t[3] == CoeffPoly.const(Fraction(3, 2))
    for n in range(11):
        assert t.counts(n) == total_fixed_points(n)


def test_T_is_q_derivative_of_R():
    r = expand_R_theorem1(ORDER)
    assert r.diff_q().subs(q=1, y=1) == expand_T(ORDER)


def test_dump_lines_sorted():
    lines = dump_lines(expand_Qk(2, 4))
    assert lines == ["2,0,2,1/1", "3,0,1,1/1", "3,0,2,2/1", "4,0,1,3/1", "4,0,2,4/1"]
    r_lines = dump_lines(brute_R(3))
    keys = [tuple(map(int, line.split(",")[:3])) for line in r_lines]
    assert keys == sorted(keys)
