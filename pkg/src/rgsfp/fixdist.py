"""Exact law of the number of fixed points of a uniform random RGS.

``F_n`` counts fixed points of a uniformly chosen RGS of length ``n``.  Its
law is given in closed form through Bell numbers and ``theta``; the mean is
available from two unrelated formulas (the ``theta`` sum and the triple sum
behind the ``a_{mi}`` coefficient triangle), and :func:`brute_histogram` enumerates everything for
small ``n``.
"""

from __future__ import annotations

import csv
import io
import json
import math
from collections import Counter
from dataclasses import dataclass
from decimal import ROUND_HALF_EVEN, Decimal, localcontext
from fractions import Fraction

from .combinat import bell, fixed_point_triple_sum, theta
from .rgs import enumerate_rgs

__all__ = [
    "FixDist",
    "ACoeffTable",
    "DomainError",
    "NonIntegerResult",
    "prob_fixed",
    "distribution",
    "sequence_counts",
    "brute_histogram",
    "brute_distribution",
    "expectation_theta",
    "expectation_genfun",
    "expectation_brute",
    "a_coeffs",
    "a_coeff_closed",
    "total_fixed_points",
    "float17",
]


class DomainError(ValueError):
    pass


class NonIntegerResult(ArithmeticError):
    pass


def float17(x: Fraction) -> str:
    """Decimal rendering of ``x`` rounded half-even to 17 significant digits."""
    with localcontext() as ctx:
        ctx.prec = 17
        ctx.rounding = ROUND_HALF_EVEN
        d = Decimal(x.numerator) / Decimal(x.denominator)
    return str(d)


@dataclass(frozen=True)
class FixDist:
    n: int
    probs: tuple[tuple[int, Fraction], ...]
    expectation: Fraction

    def as_dict(self) -> dict[int, Fraction]:
        return dict(self.probs)

    def variance(self) -> Fraction:
        second = sum((j * j * p for j, p in self.probs), Fraction(0))
        return second - self.expectation**2

    def to_json_obj(self) -> dict:
        def rational(x: Fraction) -> dict:
            return {"num": str(x.numerator), "den": str(x.denominator), "float": float(float17(x))}

        return {
            "n": self.n,
            "probs": [{"j": j, **rational(p)} for j, p in self.probs],
            "expectation": rational(self.expectation),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), indent=2)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["j", "num", "den", "float"])
        for j, p in self.probs:
            writer.writerow([j, p.numerator, p.denominator, float17(p)])
        return buf.getvalue()


def prob_fixed(n: int, j: int) -> Fraction:
    if n < 1:
        raise DomainError("n must be >= 1")
    if not 1 <= j <= n:
        raise DomainError(f"j={j} outside [1, {n}]")
    b = bell(n)
    if j == n:
        # for n == 1 this coincides with the j == 1 branch: B_0 / B_1 == 1
        return Fraction(1, b)
    if j == 1:
        return Fraction(bell(n - 1), b)
    return Fraction(j * theta(n - j - 1, j), b)


def distribution(n: int) -> FixDist:
    if n < 0:
        raise DomainError("n must be nonnegative")
    if n == 0:
        return FixDist(0, ((0, Fraction(1)),), Fraction(0))
    b = bell(n)
    counts = sequence_counts(n)
    probs = tuple((j, Fraction(c, b)) for j, c in enumerate(counts) if j >= 1)
    mean = Fraction(sum(j * c for j, c in enumerate(counts)), b)
    return FixDist(n, probs, mean)


def sequence_counts(n: int) -> list[int]:
    """``counts[j] = B_n P(F_n = j)``, the number of RGS of length ``n`` with ``j`` fixed points."""
    if n < 0:
        raise DomainError("n must be nonnegative")
    if n == 0:
        return [1]
    counts = [0] * (n + 1)
    if n == 1:
        counts[1] = 1
        return counts
    counts[1] = bell(n - 1)
    for j in range(2, n):
        counts[j] = j * theta(n - j - 1, j)
    counts[n] = 1
    return counts


def brute_histogram(n: int) -> Counter:
    """Counts of fixed-point values over all of ``R_n`` (exhaustive)."""
    return Counter(pi.fixed_points() for pi in enumerate_rgs(n))


def brute_distribution(n: int) -> FixDist:
    hist = brute_histogram(n)
    total = sum(hist.values())
    support = range(1, n + 1) if n else (0,)
    probs = tuple((j, Fraction(hist.get(j, 0), total)) for j in support)
    mean = sum((j * p for j, p in probs), Fraction(0))
    return FixDist(n, probs, mean)


def expectation_theta(n: int) -> Fraction:
    if n < 0:
        raise DomainError("n must be nonnegative")
    if n <= 1:
        return Fraction(n)
    total = n + sum(j * j * theta(n - j - 1, j) for j in range(1, n))
    return Fraction(total, bell(n))


def expectation_brute(n: int) -> Fraction:
    if n < 0:
        raise DomainError("n must be nonnegative")
    hist = brute_histogram(n)
    return Fraction(sum(j * c for j, c in hist.items()), sum(hist.values()))


@dataclass(frozen=True)
class ACoeffTable:
    """Triangle ``a[m][i]`` for ``1 <= i <= m <= m_max``; index 0 is padding."""

    m_max: int
    a: tuple[tuple[int, ...], ...]

    def __getitem__(self, mi: tuple[int, int]) -> int:
        m, i = mi
        if not 1 <= i <= m <= self.m_max:
            raise IndexError(mi)
        return self.a[m][i]

    def row_sum(self, m: int) -> int:
        return sum(self.a[m][1:])


def a_coeffs(m_max: int) -> ACoeffTable:
    if m_max < 1:
        raise DomainError("m_max must be >= 1")
    rows: list[tuple[int, ...]] = [(0,), (0, 1)]
    for m in range(2, m_max + 1):
        prev = rows[-1]
        row = [0] * (m + 1)
        for i in range(1, m):
            # prev[0] == 0 is the a_{m,0} boundary
            row[i] = prev[i - 1] + i * prev[i]
        row[m] = 1 + prev[m - 1]
        rows.append(tuple(row))
    return ACoeffTable(m_max, tuple(rows))


def _a_closed_rational(m: int, i: int, fact: list[int]) -> Fraction:
    total = Fraction(0)
    for j in range(1, i + 1):
        inner = 0
        for l in range(j, i + 1):
            sign = -1 if (i - l) % 2 else 1
            inner += sign * math.comb(i - j, l - j) * l ** (m - j)
        total += Fraction(inner, fact[i - j])
    return total


def a_coeff_closed(m: int, i: int) -> int:
    """Partial-fraction closed form of ``a_{mi}``, checked to be a nonnegative integer."""
    if not 1 <= i <= m:
        raise DomainError(f"need 1 <= i <= m, got m={m}, i={i}")
    fact = [math.factorial(r) for r in range(i + 1)]
    value = _a_closed_rational(m, i, fact)
    if value.denominator != 1 or value < 0:
        raise NonIntegerResult(f"a_({m},{i}) evaluated to {value}")
    return value.numerator


def expectation_genfun(n: int) -> Fraction:
    if n < 0:
        raise DomainError("n must be nonnegative")
    if n == 0:
        return Fraction(0)
    return fixed_point_triple_sum(n) / bell(n)


def total_fixed_points(n: int) -> int:
    """Sum of fixed points over all of ``R_n``: the ``a``-triangle row sum."""
    if n < 0:
        raise DomainError("n must be nonnegative")
    if n == 0:
        return 0
    return a_coeffs(n).row_sum(n)
