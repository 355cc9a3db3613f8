"""Cross-check suites behind ``rgsfp verify``.

Each check returns ``None`` on success or a message carrying both sides of
the failing comparison.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator, Optional

from . import combinat, fixdist, rgs, sampler, series

SUITES = ("numbers", "dist", "series", "sampler", "identity")


@dataclass(frozen=True)
class CheckResult:
    suite: str
    name: str
    failure: Optional[str]

    @property
    def ok(self) -> bool:
        return self.failure is None

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        tail = f": {self.failure}" if self.failure else ""
        return f"{status} {self.suite}.{self.name}{tail}"


def _first_mismatch(pairs, label: str) -> Optional[str]:
    for key, lhs, rhs in pairs:
        if lhs != rhs:
            return f"{label} at {key}: lhs={lhs} rhs={rhs}"
    return None


def _numbers(max_n: int, **_) -> Iterator[tuple[str, Callable[[], Optional[str]]]]:
    yield "bell_is_stirling_row_sum", lambda: _first_mismatch(
        ((n, combinat.bell(n), sum(combinat.stirling2(n, k) for k in range(n + 1))) for n in range(301)),
        "B_n vs sum_k S(n,k)",
    )
    yield "bell_counts_rgs", lambda: _first_mismatch(
        ((n, combinat.bell(n), sum(1 for _ in rgs.enumerate_rgs(n))) for n in range(max_n + 1)),
        "B_n vs |R_n|",
    )
    yield "stirling_counts_rgs", lambda: _first_mismatch(
        (
            ((n, k), combinat.stirling2(n, k), sum(1 for _ in rgs.enumerate_with_max(n, k)))
            for n in range(max_n + 1)
            for k in range(n + 1)
        ),
        "S(n,k) vs |R_{n,k}|",
    )
    yield "theta_at_zero_is_bell", lambda: _first_mismatch(
        ((n, combinat.theta(n, 0), combinat.bell(n)) for n in range(101)), "theta(n,0) vs B_n"
    )

    def dobinski() -> Optional[str]:
        for n in range(61):
            err, bound = combinat.dobinski_float_check(n)
            if not err < bound:
                return f"Dobinski at n={n}: |partial/e - B_n|={err:.3e} tail bound={bound:.3e}"
        return None

    yield "dobinski_within_tail_bound", dobinski


def _dist(max_n: int, **_):
    yield "normalization", lambda: _first_mismatch(
        ((n, sum(p for _, p in fixdist.distribution(n).probs), Fraction(1)) for n in range(1, 301)),
        "sum_j P(F_n=j) vs 1",
    )
    yield "law_equals_enumeration", lambda: _first_mismatch(
        ((n, fixdist.distribution(n).as_dict(), fixdist.brute_distribution(n).as_dict()) for n in range(1, max_n + 1)),
        "closed-form law vs enumeration",
    )
    yield "expectation_theta_vs_genfun", lambda: _first_mismatch(
        ((n, fixdist.expectation_theta(n), fixdist.expectation_genfun(n)) for n in range(1, 101)),
        "E(F_n) theta vs genfun",
    )
    yield "expectation_theta_vs_brute", lambda: _first_mismatch(
        ((n, fixdist.expectation_theta(n), fixdist.expectation_brute(n)) for n in range(1, max_n + 1)),
        "E(F_n) theta vs enumeration",
    )

    def a_closed():
        table = fixdist.a_coeffs(30)
        return _first_mismatch(
            (((m, i), fixdist.a_coeff_closed(m, i), table[m, i]) for m in range(1, 31) for i in range(1, m + 1)),
            "a_mi closed form vs recurrence",
        )

    yield "a_coeff_closed_vs_recurrence", a_closed
    yield "a_row_sums_vs_enumeration", lambda: _first_mismatch(
        (
            (m, fixdist.total_fixed_points(m), sum(pi.fixed_points() for pi in rgs.enumerate_rgs(m)))
            for m in range(0, max_n + 1)
        ),
        "sum_i a_mi vs total fixed points",
    )


def _series(order: int, max_n: int, **_):
    brute_order = min(order, 10)
    cache: dict = {}

    def thm1():
        if "r" not in cache:
            cache["r"] = series.expand_R_theorem1(order)
        return cache["r"]

    def zero_or(s, label):
        if s.is_zero():
            return None
        bad = next(n for n, c in enumerate(s.coeffs) if c)
        return f"{label}: coefficient of x^{bad} is {s[bad]!r}, expected 0"

    def eq_or(a, b, label):
        order_ = min(a.order, b.order)
        for n in range(order_ + 1):
            if a[n] != b[n]:
                return f"{label} at x^{n}: lhs={a[n]!r} rhs={b[n]!r}"
        return None

    yield "integral_form_vs_enumeration", lambda: eq_or(
        thm1().truncate(brute_order), series.brute_R(brute_order), "integral-form R vs brute R"
    )
    yield "pde_integral_form", lambda: zero_or(series.pde_residual(thm1()), "PDE residual (integral form)")
    yield "pde_enumeration", lambda: zero_or(
        series.pde_residual(series.brute_R(brute_order)), "PDE residual (brute R)"
    )

    def eqa1():
        for k in range(1, order + 1):
            res = series.eqA1_residual(k, series.expand_Qk(k, order), series.expand_Qk(k - 1, order))
            msg = zero_or(res, f"Q_k recurrence residual k={k}")
            if msg:
                return msg
        return None

    yield "qk_recurrence", eqa1
    yield "q_functional_equation", lambda: None if series.check_eqA2(order) else "Q functional-equation residual nonzero"
    yield "q1_specialization", lambda: eq_or(
        thm1().subs(q=1), series.exp_blocks(order), "R(q=1) vs exp(y(e^x-1))"
    )
    yield "q0_specialization", lambda: eq_or(
        thm1().subs(q=0), series.TruncSeries.one(order), "R(q=0) vs 1"
    )
    yield "Rm_reassembly", lambda: eq_or(series.assemble_from_Rm(order), thm1(), "sum_m q^m R_m vs R")

    def t_counts():
        t_order = max(order, max_n)
        try:
            series.expand_T(t_order)
        except ArithmeticError as exc:
            return str(exc)
        return None

    yield "T_counts_total_fixed_points", t_counts
    yield "dq_R_is_T", lambda: eq_or(
        thm1().diff_q().subs(q=1, y=1), series.expand_T(order), "dR/dq at q=y=1 vs T"
    )


def _sampler(seed: int, **_):
    def uniformity():
        stat, dof, p = sampler.chi_square_uniformity(4, 150_000, sampler.RngStream(seed, 1))
        return None if p > 0.001 else f"chi-square over R_4: stat={stat:.3f} dof={dof} p={p:.3g} <= 0.001"

    yield "uniform_on_R4", uniformity

    def histogram_vs_law(n):
        def check():
            exact = fixdist.distribution(n)
            hist = sampler.empirical_fixdist(n, 20_000, sampler.RngStream(seed, n))
            tv = hist.total_variation(exact)
            z = hist.mean_z(exact)
            if tv > 0.05:
                return f"n={n}: TV={tv:.4f} > 0.05"
            if abs(z) > 3:
                return f"n={n}: mean={float(hist.mean())} exact={float(exact.expectation)} z={z:.2f}"
            return None

        return check

    yield "histogram_vs_law_n50", histogram_vs_law(50)
    yield "histogram_vs_law_n200", histogram_vs_law(200)

    def transition():
        report = sampler.transition_law_check(5, 3, 100_000, sampler.RngStream(seed, 2))
        t, exact, count, z = report.row(2)
        return None if abs(z) <= 3 else f"P_5(N_3=2): empirical={count / report.samples} exact={exact} z={z:.2f}"

    yield "transition_law_m5_i3", transition


def _identity(**_):
    def check():
        for n in range(2, 101):
            lhs, rhs = combinat.closing_identity_sides(n)
            if lhs != rhs:
                return f"closing identity at n={n}: lhs={lhs} rhs={rhs}"
        return None

    yield "closing_identity", check


_BUILDERS = {
    "numbers": _numbers,
    "dist": _dist,
    "series": _series,
    "sampler": _sampler,
    "identity": _identity,
}


def run_suites(suites, *, order: int = 8, max_n: int = 10, seed: int = 0) -> Iterator[CheckResult]:
    for suite in suites:
        for name, fn in _BUILDERS[suite](order=order, max_n=max_n, seed=seed):
            try:
                failure = fn()
            except Exception as exc:  # a crashing check is a failed check
                failure = f"{type(exc).__name__}: {exc}"
            yield CheckResult(suite, name, failure)
