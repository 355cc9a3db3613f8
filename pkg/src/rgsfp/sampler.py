"""Stam's uniform random set partition sampler and its diagnostics.

Draw a box count ``M`` with ``P(M = m) proportional to m**n / m!``, drop balls
``1..n`` into ``M`` boxes uniformly at random, and label boxes in order of first
use.  The labels read off ball by ball form a uniformly random RGS.

The box-count law is tabulated exactly up to the Dobinski cutoff, where the
neglected tail is below ``2**-64`` of the table mass, and sampled by exact
inverse CDF on integers.  Randomness comes from numpy's PCG64, seeded per
``(seed, stream_id)`` through a splitmix64 finalizer.
"""

from __future__ import annotations

import bisect
import csv
import io
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy import stats

from .combinat import dobinski_cutoff, dobinski_partial, stirling2
from .fixdist import FixDist, distribution, float17
from .rgs import Rgs, enumerate_rgs

__all__ = [
    "MuWeights",
    "RngStream",
    "BallTrace",
    "TransitionReport",
    "Histogram",
    "mu_weights",
    "sample_m",
    "throw_balls",
    "sample_partition",
    "transition_probability",
    "transition_law_check",
    "empirical_fixdist",
    "chi_square_uniformity",
]

_MASK64 = (1 << 64) - 1


def _mix64(z: int) -> int:
    z &= _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


@dataclass
class RngStream:
    """Deterministic PCG64 stream keyed by ``(seed, stream_id)``."""

    seed: int = 0
    stream_id: int = 0
    generator: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self):
        key = _mix64((self.seed & _MASK64) ^ _mix64(self.stream_id + 0x9E3779B97F4A7C15))
        self.generator = np.random.Generator(np.random.PCG64(key))

    def spawn(self, stream_id: int) -> "RngStream":
        return RngStream(self.seed, stream_id)

    def below(self, bound: int) -> int:
        """Uniform integer in ``[0, bound)`` for arbitrarily large ``bound``; no modulo bias."""
        if bound < 1:
            raise ValueError("bound must be positive")
        if bound <= 1 << 62:
            # numpy's bounded integers use rejection sampling
            return int(self.generator.integers(bound))
        bits = bound.bit_length()
        words = -(-bits // 64)
        excess = 64 * words - bits
        raw = self.generator.bit_generator.random_raw
        while True:
            value = int.from_bytes(raw(words).tobytes(), "little") >> excess
            if value < bound:
                return value

    def boxes(self, m: int, size: int) -> list[int]:
        """``size`` independent uniform labels in ``[1, m]``."""
        return (self.generator.integers(m, size=size) + 1).tolist()


@dataclass(frozen=True)
class MuWeights:
    """Box-count weights ``w_m = m**n / m!`` for ``1 <= m <= m_star``."""

    n: int
    weights: tuple[Fraction, ...] = field(repr=False)
    m_star: int
    tail_bound: Fraction = field(repr=False)
    # integer cumulative masses over the common denominator m_star!
    cumulative: tuple[int, ...] = field(repr=False)

    @property
    def total(self) -> Fraction:
        return Fraction(self.cumulative[-1], math.factorial(self.m_star))

    def probability(self, m: int) -> Fraction:
        """Law of ``M`` under the truncated, renormalised table."""
        if not 1 <= m <= self.m_star:
            return Fraction(0)
        return self.weights[m - 1] / self.total


@lru_cache(maxsize=64)
def mu_weights(n: int) -> MuWeights:
    if n < 1:
        raise ValueError("n must be >= 1")
    m_star = dobinski_cutoff(n)
    big = math.factorial(m_star)
    scaled = []
    for m in range(1, m_star + 1):
        scaled.append(m**n * (big // math.factorial(m)))
    cumulative = []
    acc = 0
    for s in scaled:
        acc += s
        cumulative.append(acc)
    weights = tuple(Fraction(s, big) for s in scaled)
    tail = dobinski_partial(n, m_star + 1).tail_bound
    return MuWeights(n, weights, m_star, tail, tuple(cumulative))


def sample_m(w: MuWeights, rng: RngStream) -> int:
    u = rng.below(w.cumulative[-1])
    return bisect.bisect_right(w.cumulative, u) + 1


@dataclass(frozen=True)
class BallTrace:
    """One run: box count ``m``, labels ``x`` of the boxes hit and nonempty counts ``nonempty``."""

    m: int
    x: tuple[int, ...]
    nonempty: tuple[int, ...]

    def prefix_statistic(self) -> int:
        """``min(n, max{j : N_j = j})``."""
        j = 0
        for i, count in enumerate(self.nonempty, start=1):
            if count != i:
                break
            j = i
        return min(len(self.nonempty), j)


def throw_balls(m: int, n: int, rng: RngStream) -> BallTrace:
    """Drop ``n`` balls into ``m`` boxes and relabel boxes by first use."""
    label_of: dict[int, int] = {}
    x = []
    nonempty = []
    for box in rng.boxes(m, n):
        label = label_of.get(box)
        if label is None:
            label = len(label_of) + 1
            label_of[box] = label
        x.append(label)
        nonempty.append(len(label_of))
    return BallTrace(m, tuple(x), tuple(nonempty))


def sample_partition(n: int, rng: RngStream) -> tuple[Rgs, BallTrace]:
    if n < 1:
        raise ValueError("n must be >= 1")
    m = sample_m(mu_weights(n), rng)
    trace = throw_balls(m, n, rng)
    return Rgs._trusted(trace.x), trace


def transition_probability(m: int, i: int, t: int) -> Fraction:
    """``P(N_i = t | M = m) = S(i, t) m! / (m**i (m-t)!)`` (zero for ``t > m``)."""
    if t > m or t > i or t < 1:
        return Fraction(0)
    return Fraction(stirling2(i, t) * math.perm(m, t), m**i)


@dataclass(frozen=True)
class TransitionReport:
    m: int
    i: int
    samples: int
    # (t, exact, count, z)
    rows: tuple[tuple[int, Fraction, int, float], ...]

    def row(self, t: int) -> tuple[int, Fraction, int, float]:
        for r in self.rows:
            if r[0] == t:
                return r
        raise KeyError(t)

    def max_abs_z(self) -> float:
        return max(abs(r[3]) for r in self.rows)


def _z(count: int, total: int, p: Fraction) -> float:
    if p == 0 or p == 1:
        expected = total * p
        return 0.0 if count == expected else math.inf
    pf = float(p)
    return (count / total - pf) / math.sqrt(pf * (1 - pf) / total)


def transition_law_check(m: int, i: int, samples: int, rng: RngStream) -> TransitionReport:
    """Simulate ``i`` balls into ``m`` boxes and compare ``N_i`` with its exact law."""
    if m < 1 or i < 1:
        raise ValueError("m and i must be >= 1")
    if samples < 10_000:
        raise ValueError("use at least 10^4 samples")
    draws = np.sort(rng.generator.integers(m, size=(samples, i)), axis=1)
    distinct = 1 + np.count_nonzero(np.diff(draws, axis=1), axis=1)
    counts = np.bincount(distinct, minlength=i + 1)
    rows = []
    for t in range(1, i + 1):
        p = transition_probability(m, i, t)
        c = int(counts[t])
        rows.append((t, p, c, _z(c, samples, p)))
    return TransitionReport(m, i, samples, tuple(rows))


@dataclass(frozen=True)
class Histogram:
    """Counts of the fixed-point statistic over ``total`` sampled RGS of length ``n``."""

    n: int
    counts: tuple[int, ...]  # counts[j] for j = 0..n

    @property
    def total(self) -> int:
        return sum(self.counts)

    def empirical(self, j: int) -> Fraction:
        return Fraction(self.counts[j], self.total)

    def mean(self) -> Fraction:
        return Fraction(sum(j * c for j, c in enumerate(self.counts)), self.total)

    def total_variation(self, exact: FixDist) -> float:
        law = exact.as_dict()
        support = set(law) | {j for j, c in enumerate(self.counts) if c}
        dist = sum(abs(self.empirical(j) - law.get(j, 0)) for j in support) / 2
        return float(dist)

    def z_scores(self, exact: FixDist) -> dict[int, float]:
        return {j: _z(self.counts[j], self.total, p) for j, p in exact.probs}

    def mean_z(self, exact: FixDist) -> float:
        se = math.sqrt(float(exact.variance()) / self.total)
        return float(self.mean() - exact.expectation) / se

    def __add__(self, other: "Histogram") -> "Histogram":
        if other.n != self.n:
            raise ValueError("histograms for different n")
        return Histogram(self.n, tuple(a + b for a, b in zip(self.counts, other.counts)))

    def rows(self, exact: Optional[FixDist] = None):
        """``(j, count, empirical_p, exact_p)`` for ``j = 1..n``."""
        exact = exact or distribution(self.n)
        law = exact.as_dict()
        for j in range(1, self.n + 1):
            yield j, self.counts[j], self.empirical(j), law.get(j, Fraction(0))

    def to_csv(self, exact: Optional[FixDist] = None) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["j", "count", "empirical_p", "exact_p"])
        for j, c, emp, ex in self.rows(exact):
            writer.writerow([j, c, float17(emp), float17(ex)])
        return buf.getvalue()


def empirical_fixdist(n: int, count: int, rng: RngStream) -> Histogram:
    if n < 1 or count < 1:
        raise ValueError("n and count must be >= 1")
    tally = [0] * (n + 1)
    for _ in range(count):
        pi, _trace = sample_partition(n, rng)
        tally[pi.fixed_points()] += 1
    return Histogram(n, tuple(tally))


def chi_square_uniformity(n: int, samples: int, rng: RngStream) -> tuple[float, int, float]:
    """Pearson chi-square of sampled RGS against the uniform law on ``R_n``.

    Returns ``(statistic, degrees_of_freedom, p_value)``.
    """
    cells = [tuple(pi) for pi in enumerate_rgs(n)]
    tally = Counter(tuple(sample_partition(n, rng)[0]) for _ in range(samples))
    stray = set(tally) - set(cells)
    if stray:
        raise AssertionError(f"sampler produced non-RGS words {sorted(stray)[:3]}")
    observed = np.array([tally.get(c, 0) for c in cells], dtype=float)
    result = stats.chisquare(observed)
    return float(result.statistic), len(cells) - 1, float(result.pvalue)
