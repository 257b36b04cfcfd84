"""Certified real arithmetic on dyadic intervals.

Every real quantity in the package (mu, lambda, tile lengths, positions)
is a :class:`CReal`: a closed interval ``[lo, hi]`` with dyadic endpoints
``m * 2**e``.  Arithmetic is rounded outward to the current working
precision, so the exact result of operating on any reals inside the
operands is always contained in the result.

The working precision (in bits, relative to the larger endpoint) is held
in a context variable and changed with :func:`working_precision`.
"""

from __future__ import annotations

import contextlib
import contextvars
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Union

from mpmath import libmp

from .errors import NoSignChange, NonConvergent, PrecisionExhausted

DEFAULT_PRECISION = 128
MAX_PRECISION = 4096

_precision = contextvars.ContextVar("infsubst_precision", default=DEFAULT_PRECISION)

Number = Union[int, Fraction, float, str, "CReal"]


def get_precision() -> int:
    return _precision.get()


@contextlib.contextmanager
def working_precision(bits: int):
    """Temporarily set the working precision (in bits)."""
    if bits < 2:
        raise ValueError("precision must be at least 2 bits")
    token = _precision.set(int(bits))
    try:
        yield
    finally:
        _precision.reset(token)


def bits_for_width(width) -> int:
    """Number of fractional bits needed to resolve ``width``."""
    width = Fraction(width)
    if width <= 0:
        raise ValueError("width must be positive")
    return max(1, -_floor_log2(width) + 1)


def _floor_log2(q: Fraction) -> int:
    """floor(log2(q)) for q > 0, exact."""
    n, d = q.numerator, q.denominator
    k = n.bit_length() - d.bit_length()
    # 2**k <= n/d < 2**(k+1) may be off by one
    if k >= 0:
        if n < d << k:
            k -= 1
    else:
        if n << -k < d:
            k -= 1
    return k


def _log2(q: Fraction) -> float:
    """Approximate log2 for positive rationals of any magnitude."""
    k = _floor_log2(q)
    return k + math.log2(float(q / (Fraction(2) ** k)))


def _round_fraction(q: Fraction, prec: int, up: bool) -> tuple[int, int]:
    """Round q to a dyadic ``m * 2**e`` with ``prec`` significant bits."""
    if q == 0:
        return 0, 0
    e = _floor_log2(abs(q)) - prec + 1
    n, d = q.numerator, q.denominator
    if e < 0:
        n <<= -e
    else:
        d <<= e
    m = -((-n) // d) if up else n // d
    return m, e


def _is_dyadic(q: Fraction) -> bool:
    d = q.denominator
    return d & (d - 1) == 0


def _to_dyadic_exact(q: Fraction) -> tuple[int, int]:
    d = q.denominator
    return q.numerator, -(d.bit_length() - 1)


def _shift(m: int, s: int) -> int:
    return m << s if s >= 0 else m >> -s


class CReal:
    """A closed interval with dyadic endpoints; immutable."""

    __slots__ = ("_lo", "_hi", "_e")

    def __init__(self, lo, hi=None):
        """Build ``[lo, hi]`` from exact dyadic numbers (int, float, dyadic Fraction).

        Non-dyadic endpoints are rounded outward at the working precision.
        """
        if hi is None:
            hi = lo
        lo, hi = Fraction(lo), Fraction(hi)
        if lo > hi:
            raise ValueError(f"empty interval [{lo}, {hi}]")
        prec = get_precision()
        ml, el = _to_dyadic_exact(lo) if _is_dyadic(lo) else _round_fraction(lo, prec, up=False)
        mh, eh = _to_dyadic_exact(hi) if _is_dyadic(hi) else _round_fraction(hi, prec, up=True)
        e = min(el, eh)
        self._set(_shift(ml, el - e), _shift(mh, eh - e), e)

    def _set(self, lo: int, hi: int, e: int) -> None:
        if lo == 0 and hi == 0:
            e = 0
        else:
            # drop common trailing zero bits so exponents stay small
            tz = ((lo | hi) & -(lo | hi)).bit_length() - 1
            if tz > 0:
                lo >>= tz
                hi >>= tz
                e += tz
        object.__setattr__(self, "_lo", lo)
        object.__setattr__(self, "_hi", hi)
        object.__setattr__(self, "_e", e)

    def __setattr__(self, name, value):
        raise AttributeError("CReal is immutable")

    @classmethod
    def _raw(cls, lo: int, hi: int, e: int, prec: int | None = None) -> "CReal":
        if prec is not None:
            n = max(abs(lo), abs(hi)).bit_length()
            s = n - prec
            if s > 0:
                lo >>= s
                hi = -((-hi) >> s)
                e += s
        obj = cls.__new__(cls)
        obj._set(lo, hi, e)
        return obj

    # -- construction -------------------------------------------------
    @classmethod
    def coerce(cls, value: Number) -> "CReal":
        if isinstance(value, CReal):
            return value
        if isinstance(value, int):
            return cls._raw(value, value, 0)
        if isinstance(value, str):
            value = Fraction(value)
        return cls(value, value)

    @classmethod
    def hull(cls, a: "CReal", b: "CReal") -> "CReal":
        return cls(min(a.lo, b.lo), max(a.hi, b.hi))

    # -- accessors ----------------------------------------------------
    @property
    def lo(self) -> Fraction:
        return Fraction(self._lo) * Fraction(2) ** self._e

    @property
    def hi(self) -> Fraction:
        return Fraction(self._hi) * Fraction(2) ** self._e

    @property
    def width(self) -> Fraction:
        return Fraction(self._hi - self._lo) * Fraction(2) ** self._e

    @property
    def mid(self) -> Fraction:
        return Fraction(self._lo + self._hi) * Fraction(2) ** (self._e - 1)

    def mag(self) -> Fraction:
        """Largest absolute value in the interval."""
        return max(abs(self.lo), abs(self.hi))

    def mig(self) -> Fraction:
        """Smallest absolute value in the interval."""
        if self._lo <= 0 <= self._hi:
            return Fraction(0)
        return min(abs(self.lo), abs(self.hi))

    def __eq__(self, other) -> bool:
        if not isinstance(other, CReal):
            return NotImplemented
        return (self._lo, self._hi, self._e) == (other._lo, other._hi, other._e)

    def __hash__(self) -> int:
        return hash((self._lo, self._hi, self._e))

    def is_exact(self) -> bool:
        return self._lo == self._hi

    def __float__(self) -> float:
        return float(self.mid)

    # -- predicates ---------------------------------------------------
    def contains(self, value) -> bool:
        if isinstance(value, CReal):
            return self.lo <= value.lo and value.hi <= self.hi
        value = Fraction(value)
        return self.lo <= value <= self.hi

    def contains_zero(self) -> bool:
        return self._lo <= 0 <= self._hi

    def certainly_positive(self) -> bool:
        return self._lo > 0

    def certainly_negative(self) -> bool:
        return self._hi < 0

    def certainly_lt(self, other: Number) -> bool:
        return self.hi < CReal.coerce(other).lo

    def certainly_le(self, other: Number) -> bool:
        return self.hi <= CReal.coerce(other).lo

    def intersects(self, other: "CReal") -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def intersection(self, other: "CReal") -> "CReal":
        lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
        if lo > hi:
            raise ValueError("disjoint intervals")
        return CReal(lo, hi)

    # -- arithmetic ---------------------------------------------------
    def __neg__(self) -> "CReal":
        return CReal._raw(-self._hi, -self._lo, self._e)

    def __abs__(self) -> "CReal":
        if self._lo >= 0:
            return self
        if self._hi <= 0:
            return -self
        return CReal._raw(0, max(-self._lo, self._hi), self._e)

    def __add__(self, other: Number) -> "CReal":
        other = CReal.coerce(other)
        if other._lo == 0 and other._hi == 0:
            return self
        if self._lo == 0 and self._hi == 0:
            return other
        e = min(self._e, other._e)
        a, b = self._e - e, other._e - e
        return CReal._raw(
            (self._lo << a) + (other._lo << b),
            (self._hi << a) + (other._hi << b),
            e,
            get_precision(),
        )

    __radd__ = __add__

    def __sub__(self, other: Number) -> "CReal":
        return self + (-CReal.coerce(other))

    def __rsub__(self, other: Number) -> "CReal":
        return CReal.coerce(other) - self

    def __mul__(self, other: Number) -> "CReal":
        other = CReal.coerce(other)
        a, b, c, d = self._lo, self._hi, other._lo, other._hi
        if a >= 0 and c >= 0:
            lo, hi = a * c, b * d
        else:
            p = (a * c, a * d, b * c, b * d)
            lo, hi = min(p), max(p)
        return CReal._raw(lo, hi, self._e + other._e, get_precision())

    __rmul__ = __mul__

    def reciprocal(self) -> "CReal":
        if self._lo <= 0 <= self._hi:
            raise ZeroDivisionError("division by an interval containing 0")
        prec = get_precision()
        lo, hi = self._lo, self._hi
        s = prec + max(abs(lo), abs(hi)).bit_length() + 2
        one = 1 << s
        # 1/x is decreasing on each sign branch
        rlo = one // hi
        rhi = -((-one) // lo)
        return CReal._raw(rlo, rhi, -s - self._e, prec)

    def __truediv__(self, other: Number) -> "CReal":
        return self * CReal.coerce(other).reciprocal()

    def __rtruediv__(self, other: Number) -> "CReal":
        return CReal.coerce(other) * self.reciprocal()

    def __pow__(self, n: int) -> "CReal":
        if not isinstance(n, int):
            raise TypeError("only integer powers are supported")
        if n < 0:
            return (self**-n).reciprocal()
        if n == 0:
            return CReal(1)
        if self._lo < 0 < self._hi:
            if n % 2 == 0:
                return abs(self) ** n
            return CReal.hull(
                CReal._raw(self._lo, self._lo, self._e) ** n,
                CReal._raw(self._hi, self._hi, self._e) ** n,
            )
        if self._hi <= 0 and self._lo < 0:
            r = (-self) ** n
            return r if n % 2 == 0 else -r
        result = CReal(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def sqrt(self) -> "CReal":
        if self._lo < 0:
            raise ValueError("square root of an interval with negative part")
        prec = get_precision()
        lo, hi, e = self._lo, self._hi, self._e
        if e % 2:
            lo, hi, e = lo << 1, hi << 1, e - 1
        t = max(0, prec + 2 - hi.bit_length() // 2)
        lo, hi, e = lo << (2 * t), hi << (2 * t), e - 2 * t
        rlo = math.isqrt(lo)
        rhi = math.isqrt(hi)
        if rhi * rhi < hi:
            rhi += 1
        return CReal._raw(rlo, rhi, e // 2, prec)

    # -- formatting ---------------------------------------------------
    def decimal_bounds(self, digits: int = 30) -> tuple[str, str]:
        """Endpoints as decimal strings, rounded outward to ``digits`` decimals."""
        scale = 10**digits
        lo = self.lo * scale
        hi = self.hi * scale
        lo_i = lo.numerator // lo.denominator
        hi_i = -((-hi.numerator) // hi.denominator)
        return _fmt_scaled(lo_i, digits), _fmt_scaled(hi_i, digits)

    def __repr__(self) -> str:
        if self.is_exact():
            return f"CReal({self.lo})"
        lo, hi = self.decimal_bounds(20)
        return f"CReal([{lo}, {hi}])"


def _fmt_scaled(v: int, digits: int) -> str:
    sign = "-" if v < 0 else ""
    v = abs(v)
    s = str(v).rjust(digits + 1, "0")
    return f"{sign}{s[:-digits]}.{s[-digits:]}" if digits else f"{sign}{s}"


def from_fraction(q: Number) -> CReal:
    """Tightest enclosure of a rational at the working precision."""
    return CReal.coerce(q)


def const_pi() -> CReal:
    prec = get_precision() + 8
    return _from_mpf(libmp.mpf_pi(prec, "f"), libmp.mpf_pi(prec, "c"))


def const_e() -> CReal:
    prec = get_precision() + 8
    return _from_mpf(libmp.mpf_e(prec, "f"), libmp.mpf_e(prec, "c"))


def _from_mpf(lo, hi) -> CReal:
    def to_frac(t):
        sign, man, exp, _ = t
        v = Fraction(int(man)) * Fraction(2) ** exp
        return -v if sign else v

    return CReal(to_frac(lo), to_frac(hi))


# ---------------------------------------------------------------------------
# power series


@dataclass(frozen=True)
class SeriesSpec:
    """A power series ``sum_i a_{start+i} x**i`` with ``|a_i| <= bound``.

    ``coefficients`` is any callable ``i -> int``.  Coefficients are
    checked against ``[lower, bound]`` as they are read; ``signed=True``
    sets ``lower = -bound``.
    """

    coefficients: Callable[[int], int]
    coefficient_bound: int
    start_index: int = 0
    signed: bool = False

    def __post_init__(self):
        if self.coefficient_bound < 0:
            raise ValueError("coefficient bound must be non-negative")
        if self.start_index < 0:
            raise ValueError("start index must be non-negative")

    def coefficient(self, i: int) -> int:
        v = int(self.coefficients(self.start_index + i))
        lo = -self.coefficient_bound if self.signed else 0
        if not lo <= v <= self.coefficient_bound:
            raise ValueError(
                f"coefficient a_{self.start_index + i} = {v} outside [{lo}, {self.coefficient_bound}]"
            )
        return v


def tail_depth(bound: int, x_hi: Fraction, width: Fraction) -> int:
    """Smallest T (approximately) with ``bound * x_hi**(T+1) / (1 - x_hi) <= width``."""
    if bound == 0 or x_hi == 0:
        return 0
    need = _log2(Fraction(width) * (1 - x_hi) / bound)
    per = _log2(x_hi)
    return max(0, math.ceil(need / per) + 1)


def eval_series(spec: SeriesSpec, x: Number, target_width) -> CReal:
    """Certified enclosure of the series at ``x`` with width at most ``target_width``.

    The truncation depth is chosen so that the geometric tail bound uses
    half the width budget; precision is doubled until the enclosure is
    narrow enough.
    """
    x = CReal.coerce(x)
    target = Fraction(target_width)
    if target <= 0:
        raise ValueError("target width must be positive")
    if x.hi >= 1:
        raise NonConvergent(f"series diverges or is not certified at x.hi = {float(x.hi)}")
    if x.lo < 0:
        raise ValueError("series evaluation requires x >= 0")
    T = tail_depth(spec.coefficient_bound, x.hi, target / 2)
    coeffs = [spec.coefficient(i) for i in range(T + 1)]
    prec = max(get_precision(), bits_for_width(target) + 16)
    last_width = None
    while True:
        with working_precision(prec):
            value = _horner(coeffs, spec, x)
        if value.width <= target:
            return value
        if prec >= MAX_PRECISION or (last_width is not None and value.width * 2 > last_width):
            raise PrecisionExhausted(
                f"series enclosure width {float(value.width):.3e} exceeds target {float(target):.3e}"
            )
        last_width = value.width
        prec = min(2 * prec, MAX_PRECISION)


def _horner(coeffs: list[int], spec: SeriesSpec, x: CReal) -> CReal:
    """Interval Horner scheme in fixed point, floor/ceil tracked separately."""
    bound = spec.coefficient_bound
    if bound == 0:
        return CReal(0)
    prec = get_precision()
    s = prec + 2 * len(coeffs).bit_length() + 16
    k = x._e + s
    x_lo = _shift(x._lo, k)
    x_hi = x._hi << k if k >= 0 else -((-x._hi) >> -k)
    tail = Fraction(bound) / (1 - x.hi)
    t = -((-tail.numerator << s) // tail.denominator)
    r_lo, r_hi = (-t if spec.signed else 0), t
    for c in reversed(coeffs):
        lo = r_lo * (x_lo if r_lo >= 0 else x_hi)
        hi = r_hi * (x_hi if r_hi >= 0 else x_lo)
        c <<= s
        r_lo = (lo >> s) + c
        r_hi = -((-hi) >> s) + c
    return CReal._raw(r_lo, r_hi, -s, prec)


# ---------------------------------------------------------------------------
# root finding


def bisect_root(f: Callable[[CReal], CReal], lo, hi, target_width) -> CReal:
    """Enclose the root of a monotone function by certified bisection.

    ``f`` maps a point interval to an enclosure of the function value and
    may read the working precision.  A half is discarded only when the
    sign of ``f`` at the midpoint is certified; otherwise the root is
    bracketed tightly around the midpoint or the precision is doubled.
    Monotonicity is the caller's responsibility.
    """
    lo, hi = Fraction(lo), Fraction(hi)
    target = Fraction(target_width)
    if not (_is_dyadic(lo) and _is_dyadic(hi)):
        raise ValueError("bracket endpoints must be dyadic")
    if target <= 0 or lo >= hi:
        raise ValueError("invalid bracket or target width")
    prec = max(get_precision(), bits_for_width(target) + 32)
    with working_precision(prec):
        flo, fhi = f(CReal(lo)), f(CReal(hi))
    if flo.certainly_positive() and fhi.certainly_negative():
        g = f
        f = lambda x: -g(x)  # noqa: E731
    elif not (flo.certainly_negative() and fhi.certainly_positive()):
        raise NoSignChange(f"no certified sign change on [{lo}, {hi}]")
    delta = Fraction(2) ** _floor_log2(target / 4)
    while hi - lo > target:
        mid = (lo + hi) / 2
        with working_precision(prec):
            v = f(CReal(mid))
            if v.certainly_positive():
                hi = mid
                continue
            if v.certainly_negative():
                lo = mid
                continue
            if v.is_exact():
                return CReal(mid)
            left, right = f(CReal(mid - delta)), f(CReal(mid + delta))
            if left.certainly_negative() and right.certainly_positive():
                return CReal(mid - delta, mid + delta)
        if prec >= MAX_PRECISION:
            raise PrecisionExhausted(f"cannot certify the sign of f near {float(mid)}")
        prec = min(2 * prec, MAX_PRECISION)
    return CReal(lo, hi)
