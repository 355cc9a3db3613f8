"""Restricted growth sequences and their set partitions.

An RGS ``p_1 ... p_n`` has ``p_1 = 1`` and each later letter at most one more
than the running maximum.  It is the canonical sequential form of a set
partition of ``{1..n}``: ``p_i`` is the label of the block holding ``i`` when
blocks are numbered by increasing minimum.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

__all__ = [
    "Rgs",
    "SetPartition",
    "RgsError",
    "FirstLetterNotOne",
    "GrowthViolation",
    "NotStandardForm",
    "validate",
    "parse",
    "fixed_points",
    "enumerate_rgs",
    "enumerate_with_max",
    "to_partition",
    "from_partition",
]


class RgsError(ValueError):
    pass


class FirstLetterNotOne(RgsError):
    def __init__(self, letter):
        super().__init__(f"first letter must be 1, got {letter}")
        self.letter = letter


class GrowthViolation(RgsError):
    """``position`` is the 1-based index of the offending letter."""

    def __init__(self, position: int, letter: int, running_max: int):
        super().__init__(
            f"letter {letter} at position {position} exceeds 1 + running max {running_max}"
        )
        self.position = position
        self.letter = letter
        self.running_max = running_max


class NotStandardForm(RgsError):
    pass


class Rgs(tuple):
    """A validated restricted growth sequence; compares equal to the plain tuple."""

    __slots__ = ()

    def __new__(cls, letters: Iterable[int] = ()):
        letters = tuple(letters)
        _check(letters)
        return tuple.__new__(cls, letters)

    @classmethod
    def _trusted(cls, letters: Sequence[int]) -> "Rgs":
        return tuple.__new__(cls, letters)

    @property
    def n(self) -> int:
        return len(self)

    @property
    def max_letter(self) -> int:
        return max(self, default=0)

    def fixed_points(self) -> int:
        return fixed_points(self)

    def __str__(self) -> str:
        if all(p <= 9 for p in self):
            return "".join(map(str, self))
        return ",".join(map(str, self))

    def __repr__(self) -> str:
        return f"Rgs({str(self)!r})"


def _check(letters: Sequence[int]) -> None:
    if not letters:
        return
    for s in letters:
        if isinstance(s, bool) or not isinstance(s, int) or s < 1:
            raise RgsError(f"letters must be positive integers, got {s!r}")
    if letters[0] != 1:
        raise FirstLetterNotOne(letters[0])
    top = 1
    for pos, s in enumerate(letters[1:], start=2):
        if s > top + 1:
            raise GrowthViolation(pos, s, top)
        if s > top:
            top = s


def validate(letters: Iterable[int]) -> Rgs:
    return Rgs(letters)


def parse(text: str) -> Rgs:
    """Read ``"1213"`` (letters <= 9, no separator) or ``"1,2,...,10"``."""
    text = text.strip()
    if not text:
        return Rgs()
    try:
        if "," in text:
            letters = [int(part) for part in text.split(",")]
        else:
            letters = [int(ch) for ch in text]
    except ValueError:
        raise RgsError(f"cannot parse RGS from {text!r}") from None
    return Rgs(letters)


def fixed_points(pi: Sequence[int]) -> int:
    """Number of ``i`` with ``pi_i == i``; for an RGS these form a prefix ``1 2 ... j``."""
    j = 0
    for i, letter in enumerate(pi, start=1):
        if letter != i:
            break
        j = i
    return j


def enumerate_rgs(n: int) -> Iterator[Rgs]:
    """Yield every RGS of length ``n`` once, in lexicographic order."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n == 0:
        yield Rgs._trusted(())
        return
    a = [1] * n
    # prefix_max[i] = max(a[0..i-1]); prefix_max[0] unused
    prefix_max = [1] * n
    while True:
        yield Rgs._trusted(a)
        i = n - 1
        while i > 0 and a[i] > prefix_max[i]:
            i -= 1
        if i == 0:
            return
        a[i] += 1
        top = max(prefix_max[i], a[i])
        for r in range(i + 1, n):
            a[r] = 1
            prefix_max[r] = top


def enumerate_with_max(n: int, k: int) -> Iterator[Rgs]:
    """Yield every RGS of length ``n`` with maximal letter exactly ``k``, lexicographically."""
    if n < 0 or k < 0:
        raise ValueError("arguments must be nonnegative")
    if k > n or (k == 0) != (n == 0):
        return
    if n == 0:
        yield Rgs._trusted(())
        return

    a = [0] * n

    def extend(pos: int, top: int) -> Iterator[Rgs]:
        remaining = n - pos
        if remaining == 0:
            if top == k:
                yield Rgs._trusted(a)
            return
        # every one of the remaining slots may open at most one new block
        hi = min(top + 1, k)
        for s in range(1, hi + 1):
            new_top = max(top, s)
            if k - new_top > remaining - 1:
                continue
            a[pos] = s
            yield from extend(pos + 1, new_top)

    a[0] = 1
    yield from extend(1, 1)


@dataclass(frozen=True)
class SetPartition:
    """Blocks of ``{1..n}`` in standard form (block minima strictly increasing)."""

    blocks: tuple[frozenset[int], ...]

    def __post_init__(self):
        blocks = tuple(frozenset(b) for b in self.blocks)
        object.__setattr__(self, "blocks", blocks)
        seen: set[int] = set()
        for b in blocks:
            if not b:
                raise RgsError("blocks must be nonempty")
            if seen & b:
                raise RgsError("blocks must be pairwise disjoint")
            seen |= b
        if seen != set(range(1, len(seen) + 1)):
            raise RgsError("blocks must cover {1..n}")
        minima = [min(b) for b in blocks]
        if any(x >= y for x, y in zip(minima, minima[1:])):
            raise NotStandardForm(f"block minima {minima} are not increasing")

    @property
    def n(self) -> int:
        return sum(len(b) for b in self.blocks)

    def __str__(self) -> str:
        return "|".join("{" + ",".join(map(str, sorted(b))) + "}" for b in self.blocks)


def to_partition(pi: Rgs) -> SetPartition:
    blocks: list[list[int]] = [[] for _ in range(max(pi, default=0))]
    for i, label in enumerate(pi, start=1):
        blocks[label - 1].append(i)
    return SetPartition(tuple(frozenset(b) for b in blocks))


def from_partition(p: SetPartition) -> Rgs:
    letters = [0] * p.n
    for label, block in enumerate(p.blocks, start=1):
        for i in block:
            letters[i - 1] = label
    return Rgs(letters)
