"""Truncated power series in ``x`` with exact coefficients polynomial in ``y`` and ``q``.

``y`` marks the number of blocks (the maximal letter) and ``q`` the number of
fixed points.  The engine is just big enough to expand every generating
function around the fixed-point statistic and compare the expansions with
each other and with brute-force enumeration.

Integrals of the form ``int_0^x F(x, t) dt`` are expanded by writing the
integrand as ``sum_r x**r g_r(u)`` (a :class:`MixedSeries`) and integrating
each ``g_r`` term by term, see :func:`mixed_integrate`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Mapping, Union

from .fixdist import total_fixed_points
from .rgs import enumerate_rgs

__all__ = [
    "CoeffPoly",
    "TruncSeries",
    "MixedSeries",
    "NonzeroConstantTerm",
    "series_exp",
    "mixed_integrate",
    "expand_Qk",
    "eqA1_residual",
    "check_eqA1",
    "expand_Q",
    "check_eqA2",
    "brute_R",
    "exp_blocks",
    "expand_R_theorem1",
    "pde_residual",
    "expand_Rm",
    "assemble_from_Rm",
    "expand_T",
    "dump_lines",
]

OGF = "ogf"
EGF = "egf"

Scalar = Union[int, Fraction]


class NonzeroConstantTerm(ValueError):
    pass


class CoeffPoly:
    """Sparse polynomial in ``y`` and ``q``: ``{(deg_y, deg_q): Fraction}``, zeros dropped."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[tuple[int, int], Scalar] | None = None):
        clean: dict[tuple[int, int], Fraction] = {}
        if terms:
            for key, c in terms.items():
                if c:
                    clean[key] = Fraction(c)
        self._terms = clean

    @classmethod
    def const(cls, c: Scalar) -> "CoeffPoly":
        return cls({(0, 0): c})

    @classmethod
    def monomial(cls, dy: int = 0, dq: int = 0, c: Scalar = 1) -> "CoeffPoly":
        return cls({(dy, dq): c})

    @property
    def terms(self) -> dict[tuple[int, int], Fraction]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = CoeffPoly.const(other)
        if not isinstance(other, CoeffPoly):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __getitem__(self, key: tuple[int, int]) -> Fraction:
        return self._terms.get(key, Fraction(0))

    def __add__(self, other: "CoeffPoly | Scalar") -> "CoeffPoly":
        if not isinstance(other, CoeffPoly):
            other = CoeffPoly.const(other)
        out = dict(self._terms)
        for key, c in other._terms.items():
            out[key] = out.get(key, 0) + c
        return CoeffPoly(out)

    __radd__ = __add__

    def __neg__(self) -> "CoeffPoly":
        return CoeffPoly({k: -c for k, c in self._terms.items()})

    def __sub__(self, other: "CoeffPoly | Scalar") -> "CoeffPoly":
        if not isinstance(other, CoeffPoly):
            other = CoeffPoly.const(other)
        return self + (-other)

    def __rsub__(self, other: Scalar) -> "CoeffPoly":
        return CoeffPoly.const(other) - self

    def __mul__(self, other: "CoeffPoly | Scalar") -> "CoeffPoly":
        if not isinstance(other, CoeffPoly):
            if not other:
                return CoeffPoly()
            return CoeffPoly({k: c * other for k, c in self._terms.items()})
        out: dict[tuple[int, int], Fraction] = {}
        for (ay, aq), a in self._terms.items():
            for (by, bq), b in other._terms.items():
                key = (ay + by, aq + bq)
                out[key] = out.get(key, 0) + a * b
        return CoeffPoly(out)

    __rmul__ = __mul__

    def map_terms(self, fn: Callable[[int, int, Fraction], tuple[tuple[int, int], Fraction]]):
        out: dict[tuple[int, int], Fraction] = {}
        for (dy, dq), c in self._terms.items():
            key, value = fn(dy, dq, c)
            out[key] = out.get(key, 0) + value
        return CoeffPoly(out)

    def subs(self, *, y: Scalar | None = None, q: Scalar | None = None) -> "CoeffPoly":
        """Specialise ``y`` and/or ``q`` to a number (0**0 counts as 1)."""

        def fn(dy, dq, c):
            if y is not None:
                c = c * Fraction(y) ** dy
                dy = 0
            if q is not None:
                c = c * Fraction(q) ** dq
                dq = 0
            return (dy, dq), c

        return self.map_terms(fn)

    def diff_q(self) -> "CoeffPoly":
        return CoeffPoly({(dy, dq - 1): dq * c for (dy, dq), c in self._terms.items() if dq})

    def y_diff_y(self) -> "CoeffPoly":
        """``y * d/dy``."""
        return CoeffPoly({(dy, dq): dy * c for (dy, dq), c in self._terms.items()})

    def __repr__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for (dy, dq), c in sorted(self._terms.items()):
            mono = "".join(
                s for s in (f"y^{dy}" if dy else "", f"q^{dq}" if dq else "") if s
            )
            parts.append(f"{c}*{mono}" if mono else str(c))
        return " + ".join(parts)


ZERO = CoeffPoly()
ONE = CoeffPoly.const(1)
Y = CoeffPoly.monomial(dy=1)
Q = CoeffPoly.monomial(dq=1)


def _as_poly(c) -> CoeffPoly:
    return c if isinstance(c, CoeffPoly) else CoeffPoly.const(c)


class TruncSeries:
    """``sum_{n<=order} c_n x**n`` with ``c_n`` a :class:`CoeffPoly`.

    ``kind`` only records how coefficients relate to counts: for ``"egf"``
    the count is ``n! * c_n``.  Arithmetic never looks at it.
    """

    __slots__ = ("order", "coeffs", "kind")

    def __init__(self, coeffs: Iterable, order: int | None = None, kind: str = OGF):
        cs = [_as_poly(c) for c in coeffs]
        if order is None:
            order = len(cs) - 1
        if order < 0:
            raise ValueError("order must be >= 0")
        cs = cs[: order + 1] + [ZERO] * (order + 1 - len(cs))
        if kind not in (OGF, EGF):
            raise ValueError(f"unknown kind {kind!r}")
        self.order = order
        self.coeffs = tuple(cs)
        self.kind = kind

    # -- constructors -------------------------------------------------------
    @classmethod
    def zero(cls, order: int, kind: str = OGF) -> "TruncSeries":
        return cls([], order, kind)

    @classmethod
    def one(cls, order: int, kind: str = OGF) -> "TruncSeries":
        return cls([ONE], order, kind)

    @classmethod
    def monomial(cls, power: int, order: int, c: CoeffPoly | Scalar = 1) -> "TruncSeries":
        cs = [ZERO] * (order + 1)
        if power <= order:
            cs[power] = _as_poly(c)
        return cls(cs, order)

    @classmethod
    def from_function(cls, fn: Callable[[int], CoeffPoly | Scalar], order: int, kind: str = OGF):
        return cls([fn(n) for n in range(order + 1)], order, kind)

    def with_kind(self, kind: str) -> "TruncSeries":
        return TruncSeries(self.coeffs, self.order, kind)

    # -- access ---------------------------------------------------------------
    def __getitem__(self, n: int) -> CoeffPoly:
        if n < 0:
            raise IndexError(n)
        return self.coeffs[n] if n <= self.order else ZERO

    def __len__(self) -> int:
        return self.order + 1

    def __iter__(self) -> Iterator[CoeffPoly]:
        return iter(self.coeffs)

    def counts(self, n: int) -> CoeffPoly:
        """The counting polynomial behind ``[x^n]`` (multiplied by ``n!`` for an EGF)."""
        c = self[n]
        return c * math.factorial(n) if self.kind == EGF else c

    def truncate(self, order: int) -> "TruncSeries":
        return TruncSeries(self.coeffs, min(order, self.order), self.kind)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TruncSeries):
            return NotImplemented
        order = min(self.order, other.order)
        return all(self[n] == other[n] for n in range(order + 1))

    __hash__ = None

    # -- ring operations ------------------------------------------------------
    def _binary_order(self, other: "TruncSeries") -> int:
        return min(self.order, other.order)

    def __add__(self, other) -> "TruncSeries":
        if not isinstance(other, TruncSeries):
            other = TruncSeries([_as_poly(other)], self.order)
        order = self._binary_order(other)
        return TruncSeries([self[n] + other[n] for n in range(order + 1)], order, self.kind)

    __radd__ = __add__

    def __neg__(self) -> "TruncSeries":
        return TruncSeries([-c for c in self.coeffs], self.order, self.kind)

    def __sub__(self, other) -> "TruncSeries":
        if not isinstance(other, TruncSeries):
            other = TruncSeries([_as_poly(other)], self.order)
        return self + (-other)

    def __rsub__(self, other) -> "TruncSeries":
        return (-self) + other

    def __mul__(self, other) -> "TruncSeries":
        if not isinstance(other, TruncSeries):
            c = _as_poly(other)
            return TruncSeries([a * c for a in self.coeffs], self.order, self.kind)
        order = self._binary_order(other)
        out = []
        for n in range(order + 1):
            acc = ZERO
            for k in range(n + 1):
                a = self.coeffs[k]
                if not a:
                    continue
                b = other.coeffs[n - k]
                if b:
                    acc = acc + a * b
            out.append(acc)
        return TruncSeries(out, order, self.kind)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "TruncSeries":
        if e < 0:
            raise ValueError("negative powers are not supported")
        result = TruncSeries.one(self.order, self.kind)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def shift(self, k: int) -> "TruncSeries":
        """Multiply by ``x**k`` keeping the same order."""
        return TruncSeries([ZERO] * k + list(self.coeffs), self.order, self.kind)

    def diff_x(self) -> "TruncSeries":
        """Derivative in ``x``; valid through ``order - 1``."""
        out = [self.coeffs[n + 1] * (n + 1) for n in range(self.order)]
        return TruncSeries(out or [ZERO], max(self.order - 1, 0), self.kind)

    def map_coeffs(self, fn: Callable[[CoeffPoly], CoeffPoly]) -> "TruncSeries":
        return TruncSeries([fn(c) for c in self.coeffs], self.order, self.kind)

    def subs(self, **kw) -> "TruncSeries":
        return self.map_coeffs(lambda c: c.subs(**kw))

    def diff_q(self) -> "TruncSeries":
        return self.map_coeffs(CoeffPoly.diff_q)

    def y_diff_y(self) -> "TruncSeries":
        return self.map_coeffs(CoeffPoly.y_diff_y)

    def to_ogf(self) -> "TruncSeries":
        """Rescale EGF coefficients to counts: ``c_n -> n! c_n``."""
        if self.kind == OGF:
            return self
        return TruncSeries(
            [c * math.factorial(n) for n, c in enumerate(self.coeffs)], self.order, OGF
        )

    def to_egf(self) -> "TruncSeries":
        if self.kind == EGF:
            return self
        return TruncSeries(
            [c * Fraction(1, math.factorial(n)) for n, c in enumerate(self.coeffs)],
            self.order,
            EGF,
        )

    def __repr__(self) -> str:
        body = ", ".join(repr(c) for c in self.coeffs)
        return f"TruncSeries([{body}], order={self.order}, kind={self.kind!r})"


def series_exp(f: TruncSeries) -> TruncSeries:
    """``exp(f)`` through ``f.order``; ``f`` must have zero constant term.

    Uses ``h' = f' h``, i.e. ``n h_n = sum_k k f_k h_{n-k}``.
    """
    if f[0]:
        raise NonzeroConstantTerm(f"constant term {f[0]!r}")
    h = [ONE]
    for n in range(1, f.order + 1):
        acc = ZERO
        for k in range(1, n + 1):
            fk = f.coeffs[k]
            if fk:
                acc = acc + fk * h[n - k] * k
        h.append(acc * Fraction(1, n))
    return TruncSeries(h, f.order, f.kind)


def _exp_scalar(c: Scalar, order: int) -> TruncSeries:
    """``exp(c u)``."""
    c = Fraction(c)
    return TruncSeries([c**n / math.factorial(n) for n in range(order + 1)], order)


@dataclass(frozen=True)
class MixedSeries:
    """``sum_r x**r g_r(u)``; every ``g_r`` is a series in the integration variable ``u``."""

    parts: tuple[tuple[int, TruncSeries], ...]

    def __post_init__(self):
        orders = {g.order for _, g in self.parts}
        if len(orders) > 1:
            raise ValueError(f"inconsistent truncation orders {sorted(orders)}")
        if any(r < 0 for r, _ in self.parts):
            raise ValueError("x exponents must be nonnegative")

    @property
    def order(self) -> int:
        return self.parts[0][1].order if self.parts else 0


def mixed_integrate(f: MixedSeries, order: int | None = None) -> TruncSeries:
    """``int_0^x sum_r x**r g_r(u) du = sum_r sum_j g_{r,j} x**(r+j+1) / (j+1)``.

    Terms beyond ``x**order`` are dropped; ``order`` defaults to ``f.order + 1``,
    the highest power fully determined by the ``g_r``.
    """
    if order is None:
        order = f.order + 1
    out = [ZERO] * (order + 1)
    for r, g in f.parts:
        for j, c in enumerate(g.coeffs):
            p = r + j + 1
            if p > order:
                break
            if c:
                out[p] = out[p] + c * Fraction(1, j + 1)
    return TruncSeries(out, order)


# -- ordinary generating functions Q_k ---------------------------------------

def _geometric(ratio: int, order: int) -> TruncSeries:
    """``1 / (1 - ratio x)``."""
    return TruncSeries([ratio**n for n in range(order + 1)], order)


def expand_Qk(k: int, order: int) -> TruncSeries:
    """OGF of ``R_{n,k}`` with ``q`` marking fixed points, via the case split on the fixed prefix."""
    if k < 0 or order < 0:
        raise ValueError("k and order must be nonnegative")
    if k == 0:
        return TruncSeries.one(order)
    total = (_geometric(k, order) * CoeffPoly.monomial(dq=k)).shift(k)
    for i in range(1, k):
        denom_inv = TruncSeries.one(order)
        for j in range(i, k + 1):
            denom_inv = denom_inv * _geometric(j, order)
        total = total + (denom_inv * CoeffPoly.monomial(dq=i, c=i)).shift(k + 1)
    return total


def eqA1_residual(k: int, qk: TruncSeries, qk_prev: TruncSeries) -> TruncSeries:
    """``(1 - kx) Q_k - x Q_{k-1} - x**k q**(k-1) (q-1)``."""
    order = min(qk.order, qk_prev.order)
    qk, qk_prev = qk.truncate(order), qk_prev.truncate(order)
    lhs = qk - (qk * k).shift(1) - qk_prev.shift(1)
    rhs = TruncSeries.monomial(k, order, CoeffPoly.monomial(dq=k) - CoeffPoly.monomial(dq=k - 1))
    return lhs - rhs


def check_eqA1(k: int, order: int) -> bool:
    if k < 1:
        raise ValueError("k must be >= 1")
    return eqA1_residual(k, expand_Qk(k, order), expand_Qk(k - 1, order)).is_zero()


def expand_Q(order: int) -> TruncSeries:
    """``Q(x, y; q) = sum_k y**k Q_k(x; q)`` (``Q_k`` starts at ``x**k``)."""
    total = TruncSeries.zero(order)
    for k in range(order + 1):
        total = total + expand_Qk(k, order) * CoeffPoly.monomial(dy=k)
    return total


def check_eqA2(order: int) -> bool:
    """``(1 - xy) Q - xy dQ/dy == (1 - xy) / (1 - xyq)`` through ``order``."""
    q_series = expand_Q(order)
    lhs = q_series - (q_series * Y).shift(1) - (q_series.y_diff_y()).shift(1)
    inv = TruncSeries([CoeffPoly.monomial(dy=n, dq=n) for n in range(order + 1)], order)
    rhs = inv - (inv * Y).shift(1)
    return (lhs - rhs).is_zero()


# -- exponential generating function R ----------------------------------------

def brute_R(order: int) -> TruncSeries:
    """``sum_n x**n / n! sum_{pi in R_n} y**max(pi) q**F(pi)`` by enumeration."""
    if order > 10:
        raise ValueError("brute_R enumerates R_n; keep order <= 10")
    out = []
    for n in range(order + 1):
        terms: dict[tuple[int, int], int] = {}
        for pi in enumerate_rgs(n):
            key = (pi.max_letter, pi.fixed_points())
            terms[key] = terms.get(key, 0) + 1
        out.append(CoeffPoly({k: Fraction(c, math.factorial(n)) for k, c in terms.items()}))
    return TruncSeries(out, order, EGF)


def _exp_minus_one(order: int) -> TruncSeries:
    """``e**u - 1``."""
    return TruncSeries([0] + [Fraction(1, math.factorial(n)) for n in range(1, order + 1)], order)


def exp_blocks(order: int) -> TruncSeries:
    """``exp(y (e**x - 1))``, the EGF of the Stirling numbers."""
    return series_exp(_exp_minus_one(order) * Y).with_kind(EGF)


def expand_R_theorem1(order: int) -> TruncSeries:
    """Expand ``exp(y(e^x-1)) + int_0^x (q-1) y exp(x-t + (1+qt) y e^(x-t) - y) dt``.

    With ``u = x - t`` the exponent is ``u + y(e^u-1) - q u y e^u + q x y e^u``;
    the last summand is expanded as ``sum_r x**r (q y e^u)**r / r!``.
    """
    if order < 0:
        raise ValueError("order must be >= 0")
    base = exp_blocks(order)
    if order == 0:
        return base
    inner = order - 1
    e_u = _exp_scalar(1, inner)
    u = TruncSeries.monomial(1, inner)
    exponent = u + _exp_minus_one(inner) * Y - (u * e_u) * (Y * Q)
    kernel = series_exp(exponent) * ((Q - 1) * Y)
    qye = e_u * (Y * Q)
    parts = []
    power = TruncSeries.one(inner)
    for r in range(order):
        parts.append((r, kernel * power * Fraction(1, math.factorial(r))))
        power = power * qye
    integral = mixed_integrate(MixedSeries(tuple(parts)), order)
    return (base + integral).with_kind(EGF)


def pde_residual(r_series: TruncSeries | int) -> TruncSeries:
    """``dR/dx - y R - y dR/dy - y (q-1) exp(xyq)``; should vanish through ``order - 1``.

    Accepts a series or an order (in which case the integral-form expansion is used).
    """
    if isinstance(r_series, int):
        r_series = expand_R_theorem1(r_series)
    if r_series.order < 1:
        raise ValueError("need order >= 1")
    order = r_series.order - 1
    r = r_series.truncate(order)
    forcing = TruncSeries(
        [CoeffPoly.monomial(dy=n, dq=n, c=Fraction(1, math.factorial(n))) for n in range(order + 1)],
        order,
    ) * ((Q - 1) * Y)
    return (r_series.diff_x() - r * Y - r.y_diff_y() - forcing).with_kind(EGF)


def _binomial_kernel(power: int, cfactor: int, inner: int) -> list[tuple[int, TruncSeries]]:
    """``(x-u)**power * exp(y(e^u-1) + c u)`` split as ``sum_r x**r g_r(u)``."""
    g = series_exp(_exp_minus_one(inner) * Y + TruncSeries.monomial(1, inner, cfactor))
    parts = []
    for r in range(power + 1):
        s = power - r
        coef = math.comb(power, r) * (-1) ** s
        parts.append((r, g.shift(s) * coef))
    return parts


def expand_Rm(m: int, order: int) -> TruncSeries:
    """EGF (in ``x``, marking blocks by ``y``) of RGS with exactly ``m`` fixed points."""
    if m < 0 or order < 0:
        raise ValueError("m and order must be nonnegative")
    if m == 0:
        return TruncSeries.one(order, EGF)
    if order == 0:
        return TruncSeries.zero(0, EGF)
    inner = order - 1
    first = MixedSeries(tuple(_binomial_kernel(m - 1, m, inner)))
    second = MixedSeries(tuple(_binomial_kernel(m, m + 1, inner)))
    a = mixed_integrate(first, order) * (CoeffPoly.monomial(dy=m) * Fraction(1, math.factorial(m - 1)))
    b = mixed_integrate(second, order) * (CoeffPoly.monomial(dy=m + 1) * Fraction(1, math.factorial(m)))
    return (a - b).with_kind(EGF)


def assemble_from_Rm(order: int) -> TruncSeries:
    """``sum_m q**m R_m``; only ``m <= order`` contribute through ``x**order``."""
    total = TruncSeries.zero(order, EGF)
    for m in range(order + 1):
        total = total + expand_Rm(m, order) * CoeffPoly.monomial(dq=m)
    return total


def expand_T(order: int) -> TruncSeries:
    """EGF of total fixed-point counts: ``int_0^x exp((x-t) e^t + e^t + t - 1) dt``.

    The exponent is split as ``x e^t + (e^t - 1) + t (1 - e^t)`` and ``exp(x e^t)``
    is expanded as ``sum_r x**r e^(rt) / r!``.
    """
    if order < 0:
        raise ValueError("order must be >= 0")
    if order == 0:
        return TruncSeries.zero(0, EGF)
    inner = order - 1
    t = TruncSeries.monomial(1, inner)
    em1 = _exp_minus_one(inner)
    kernel = series_exp(em1 - t * em1)
    parts = tuple(
        (r, kernel * _exp_scalar(r, inner) * Fraction(1, math.factorial(r))) for r in range(order)
    )
    result = mixed_integrate(MixedSeries(parts), order).with_kind(EGF)
    for n in range(order + 1):
        count = result.counts(n)
        expected = total_fixed_points(n)
        if count != CoeffPoly.const(expected):
            raise ArithmeticError(f"T expansion gives {count!r} at n={n}, expected {expected}")
    return result


def dump_lines(series: TruncSeries) -> list[str]:
    """``n,deg_y,deg_q,num/den`` per nonzero coefficient, sorted by ``(n, deg_y, deg_q)``."""
    rows = []
    for n, c in enumerate(series.coeffs):
        for (dy, dq), v in c.items():
            rows.append((n, dy, dq, v))
    rows.sort(key=lambda row: row[:3])
    return [f"{n},{dy},{dq},{v.numerator}/{v.denominator}" for n, dy, dq, v in rows]
