"""Exact Bell, Stirling and binomial numbers, plus Dobinski sums.

Bell numbers come from the binomial recursion and Stirling numbers of the
second kind from the triangle recurrence.  Dobinski's series is only used to
validate them and to size the sampler's box-count table.

All values are plain Python ``int`` / :class:`fractions.Fraction`.
"""

from __future__ import annotations

import math
import os
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

__all__ = [
    "binomial",
    "bell",
    "stirling2",
    "theta",
    "DobinskiPartial",
    "dobinski_partial",
    "dobinski_cutoff",
    "dobinski_float_check",
    "fixed_point_triple_sum",
    "closing_identity_sides",
    "closing_identity_check",
    "NumberTableCache",
    "CacheFormatError",
    "IdentityMismatch",
    "install_cache",
    "current_cache",
]

CACHE_MAGIC = "rgsfp-tables v1"

# Relative Dobinski tail tolerance used for every truncation decision.
TAIL_TOLERANCE = Fraction(1, 2**64)


class CacheFormatError(ValueError):
    pass


class IdentityMismatch(ArithmeticError):
    """Both sides of an exact identity were evaluated and differ."""

    def __init__(self, name: str, n: int, lhs, rhs):
        super().__init__(f"{name} fails at n={n}: lhs={lhs} rhs={rhs}")
        self.name = name
        self.n = n
        self.lhs = lhs
        self.rhs = rhs


def binomial(n: int, k: int) -> int:
    if n < 0 or k < 0:
        raise ValueError("binomial arguments must be nonnegative")
    return math.comb(n, k)


def _int_pow(base: int, exp: int) -> int:
    # 0**0 == 1 in Python already; kept explicit because theta relies on it.
    if exp == 0:
        return 1
    return base**exp


@dataclass(frozen=True)
class NumberTableCache:
    """Immutable Bell and Stirling tables for ``0 <= n <= max_n``.

    ``stirling[n][k]`` holds S(n, k) for ``0 <= k <= n``.
    """

    max_n: int
    bell: tuple[int, ...] = field(repr=False)
    stirling: tuple[tuple[int, ...], ...] = field(repr=False)

    @classmethod
    def build(cls, max_n: int) -> "NumberTableCache":
        if max_n < 0:
            raise ValueError("max_n must be nonnegative")
        rows: list[tuple[int, ...]] = [(1,)]
        for n in range(1, max_n + 1):
            prev = rows[-1]
            row = [0] * (n + 1)
            for k in range(1, n + 1):
                left = prev[k - 1]
                right = prev[k] if k < n else 0
                row[k] = k * right + left
            rows.append(tuple(row))

        bells = [1]
        for n in range(max_n):
            bells.append(sum(math.comb(n, k) * bells[k] for k in range(n + 1)))
        table = cls(max_n, tuple(bells), tuple(rows))
        table.check()
        return table

    def check(self) -> None:
        """Raise :class:`CacheFormatError` unless the tables are consistent."""
        if len(self.bell) != self.max_n + 1 or len(self.stirling) != self.max_n + 1:
            raise CacheFormatError("table length does not match max_n")
        if self.bell[0] != 1:
            raise CacheFormatError("B_0 must be 1")
        for n, row in enumerate(self.stirling):
            if len(row) != n + 1:
                raise CacheFormatError(f"Stirling row {n} has {len(row)} entries")
            if row[n] != 1 or (n >= 1 and row[0] != 0):
                raise CacheFormatError(f"Stirling row {n} has bad boundary values")
            if sum(row) != self.bell[n]:
                raise CacheFormatError(f"B_{n} disagrees with its Stirling row")

    def dumps(self) -> str:
        lines = [f"{CACHE_MAGIC} max_n={self.max_n}"]
        lines.extend(str(b) for b in self.bell)
        lines.extend(" ".join(map(str, row)) for row in self.stirling)
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "NumberTableCache":
        lines = text.splitlines()
        if not lines:
            raise CacheFormatError("empty cache file")
        magic, _, tail = lines[0].rpartition(" ")
        if magic != CACHE_MAGIC or not tail.startswith("max_n="):
            raise CacheFormatError(f"unrecognised header: {lines[0]!r}")
        try:
            max_n = int(tail[len("max_n="):])
            body = lines[1:]
            if len(body) != 2 * (max_n + 1):
                raise CacheFormatError("wrong number of table lines")
            bells = tuple(int(s) for s in body[: max_n + 1])
            rows = tuple(tuple(int(s) for s in line.split()) for line in body[max_n + 1:])
        except ValueError as exc:
            if isinstance(exc, CacheFormatError):
                raise
            raise CacheFormatError(str(exc)) from exc
        table = cls(max_n, bells, rows)
        table.check()
        return table

    def save(self, path: os.PathLike | str) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_name(path.name + ".tmp")
        tmp.write_text(self.dumps())
        tmp.replace(path)

    @classmethod
    def load(cls, path: os.PathLike | str) -> "NumberTableCache":
        return cls.loads(Path(path).read_text())


_lock = threading.Lock()
_cache: NumberTableCache = NumberTableCache.build(64)


def install_cache(table: NumberTableCache) -> None:
    """Serve Bell/Stirling lookups from ``table`` when it is large enough."""
    global _cache
    with _lock:
        if table.max_n >= _cache.max_n:
            _cache = table


def current_cache() -> NumberTableCache:
    return _cache


def _tables(n: int) -> NumberTableCache:
    global _cache
    table = _cache
    if n <= table.max_n:
        return table
    with _lock:
        if n > _cache.max_n:
            _cache = NumberTableCache.build(max(n, 2 * _cache.max_n))
        return _cache


def bell(n: int) -> int:
    if n < 0:
        raise ValueError("n must be nonnegative")
    return _tables(n).bell[n]


def stirling2(n: int, k: int) -> int:
    if n < 0 or k < 0:
        raise ValueError("arguments must be nonnegative")
    if k > n:
        return 0
    return _tables(n).stirling[n][k]


def theta(n: int, t: int) -> int:
    """Shifted Dobinski sum ``sum_l C(n, l) t**(n-l) B_l`` (so ``theta(n, 0) == B_n``)."""
    if n < 0 or t < 0:
        raise ValueError("arguments must be nonnegative")
    bells = _tables(n).bell
    # Horner in t over l = 0..n; C(n, l) updated incrementally
    acc = 0
    c = 1
    for l in range(n + 1):
        acc = acc * t + c * bells[l]
        c = c * (n - l) // (l + 1)
    return acc


def _dobinski_weight(n: int, m: int) -> Fraction:
    return Fraction(_int_pow(m, n), math.factorial(m))


@dataclass(frozen=True)
class DobinskiPartial:
    """``value`` is ``sum_{m<terms} m**n / m!``; the remaining tail is at most ``tail_bound``."""

    n: int
    terms: int
    value: Fraction
    tail_bound: Fraction


def _ratio_start(n: int) -> int:
    # For m >= max(2n, 3) successive weights shrink by at least a factor 2.
    return max(2 * n, 3)


def dobinski_partial(n: int, terms: int) -> DobinskiPartial:
    if n < 0:
        raise ValueError("n must be nonnegative")
    if terms < 1:
        raise ValueError("terms must be >= 1")
    value = sum((_dobinski_weight(n, m) for m in range(terms)), Fraction(0))
    start = _ratio_start(n)
    if terms >= start:
        bound = 2 * _dobinski_weight(n, terms)
    else:
        bound = sum((_dobinski_weight(n, m) for m in range(terms, start)), Fraction(0))
        bound += 2 * _dobinski_weight(n, start)
    return DobinskiPartial(n, terms, value, bound)


def dobinski_cutoff(n: int, tolerance: Fraction = TAIL_TOLERANCE) -> int:
    """Smallest last index ``M`` with ``2 w_{M+1} / sum_{m<=M} w_m < tolerance``.

    ``M + 1`` is kept inside the geometric-decay region so the bound is rigorous.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    m = _ratio_start(n) - 1
    partial = sum((_dobinski_weight(n, j) for j in range(m + 1)), Fraction(0))
    while 2 * _dobinski_weight(n, m + 1) >= tolerance * partial:
        m += 1
        partial += _dobinski_weight(n, m)
    return m


def fixed_point_triple_sum(n: int) -> Fraction:
    """``sum_{i<=n} sum_{j<=i} sum_{j<=l<=i} (-1)**(l-i) l**(n-j) / ((l-j)! (i-l)!)``.

    Summing over ``i`` first leaves the truncated series of ``1/e``, i.e. the
    derangement numbers ``d_k = k! sum_{r<=k} (-1)**r / r!``, which brings the
    cost down to O(n^2) exact integer operations over the denominator ``n!``.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    derangements = [1]
    for k in range(1, n + 1):
        derangements.append(k * derangements[-1] + (-1) ** k)
    num = 0
    for j in range(1, n + 1):
        # n! / ((l-j)! (n-l)!) == n!/(n-j)! * C(n-j, l-j)
        falling = math.perm(n, j)
        for l in range(j, n + 1):
            num += falling * math.comb(n - j, l - j) * _int_pow(l, n - j) * derangements[n - l]
    return Fraction(num, math.factorial(n))


def dobinski_float_check(n: int, terms: int | None = None) -> tuple[float, float]:
    """Compare ``partial / e`` with ``B_n`` in floating point.

    Returns ``(|partial/e - B_n|, tail_bound/e)`` as floats.  The working
    precision is at least 128 bits and large enough to resolve the bound.
    """
    import mpmath

    if terms is None:
        terms = dobinski_cutoff(n) + 1
    part = dobinski_partial(n, terms)
    target = bell(n)
    bound = part.tail_bound
    resolve = bound.denominator.bit_length() - bound.numerator.bit_length() + 2
    prec = max(128, target.bit_length() + max(resolve, 0) + 64)
    with mpmath.workprec(prec):
        approx = mpmath.mpf(part.value.numerator) / part.value.denominator / mpmath.e
        err = abs(approx - target)
        tail = mpmath.mpf(bound.numerator) / bound.denominator / mpmath.e
        return float(err), float(tail)


def closing_identity_sides(n: int) -> tuple[int, Fraction]:
    """Both sides of the Bell-polynomial identity tying the two expectation formulas."""
    if n < 2:
        raise ValueError("identity is stated for n >= 2")
    bells = _tables(n).bell
    lhs = 0
    for j in range(1, n):
        top = n - j - 1
        lhs += sum(
            math.comb(top, l) * _int_pow(j, n - j + 1 - l) * bells[l] for l in range(top + 1)
        )

    rhs = fixed_point_triple_sum(n)
    rhs -= n
    return lhs, rhs


def closing_identity_check(n: int, strict: bool = False) -> bool:
    lhs, rhs = closing_identity_sides(n)
    ok = rhs.denominator == 1 and lhs == rhs
    if not ok and strict:
        raise IdentityMismatch("closing identity", n, lhs, rhs)
    return ok
