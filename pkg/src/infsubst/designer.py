"""Build a coefficient sequence with a prescribed inflation factor.

Given ``lambda > 2`` let ``mu`` be the root in (0, 1) of ``mu + 1/mu = lambda``.
With ``C`` minimal such that ``mu + mu**C <= 1`` the spike series
``sum_{C | i} mu**i = 1 / (1 - mu**C)`` already satisfies A2 and A3, and the
gap ``mu' = 1/mu - 1/(1 - mu**C) >= 0`` is filled by greedy digits
``c_i in [0, N]``.  The sequence ``a_i = [C | i] + c_i`` then solves
``1/mu = sum a_i mu**i`` up to the truncation residual.

Rational targets put ``mu`` in a quadratic field; there exact arithmetic
settles comparisons that land exactly on a tie (``lambda = 3`` gives
``mu' = 1``).  Other targets fall back to the smaller digit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .errors import InternalInconsistency, PrecisionExhausted
from .numerics import (
    CReal,
    MAX_PRECISION,
    bisect_root,
    bits_for_width,
    const_e,
    const_pi,
    get_precision,
    working_precision,
)
from .sequence import DesignedSequence


# ---------------------------------------------------------------------------
# exact arithmetic in Q(sqrt(D))


def _rational_sqrt(q: Fraction) -> Fraction | None:
    n, d = q.numerator, q.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


@dataclass(frozen=True)
class QuadraticNumber:
    """``x + y * sqrt(D)`` with rational ``x, y`` and a fixed rational ``D > 0``."""

    x: Fraction
    y: Fraction
    D: Fraction

    def _wrap(self, x, y) -> "QuadraticNumber":
        return QuadraticNumber(Fraction(x), Fraction(y), self.D)

    def _lift(self, other) -> "QuadraticNumber":
        if isinstance(other, QuadraticNumber):
            if other.D != self.D:
                raise ValueError("mismatched quadratic fields")
            return other
        return self._wrap(other, 0)

    def __add__(self, other):
        o = self._lift(other)
        return self._wrap(self.x + o.x, self.y + o.y)

    __radd__ = __add__

    def __neg__(self):
        return self._wrap(-self.x, -self.y)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        o = self._lift(other)
        return self._wrap(self.x * o.x + self.y * o.y * self.D, self.x * o.y + self.y * o.x)

    __rmul__ = __mul__

    def reciprocal(self):
        norm = self.x * self.x - self.y * self.y * self.D
        if norm == 0:
            raise ZeroDivisionError("zero divisor in quadratic field")
        return self._wrap(self.x / norm, -self.y / norm)

    def __truediv__(self, other):
        return self * self._lift(other).reciprocal()

    def __rtruediv__(self, other):
        return self._lift(other) * self.reciprocal()

    def __pow__(self, n: int):
        result, base = self._wrap(1, 0), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def sign(self) -> int:
        sx = (self.x > 0) - (self.x < 0)
        sy = (self.y > 0) - (self.y < 0)
        if sy == 0 or sx == sy:
            return sx if sx else sy
        if sx == 0:
            return sy
        lhs, rhs = self.x * self.x, self.y * self.y * self.D
        return sx if lhs > rhs else (sy if lhs < rhs else 0)


def exact_mu(lam: Fraction) -> QuadraticNumber:
    """``(lambda - sqrt(lambda**2 - 4)) / 2`` in ``Q(sqrt(lambda**2 - 4))``."""
    D = lam * lam - 4
    r = _rational_sqrt(D)
    if r is not None:
        return QuadraticNumber((lam - r) / 2, Fraction(0), D)
    return QuadraticNumber(lam / 2, Fraction(-1, 2), D)


# ---------------------------------------------------------------------------
# targets


@dataclass(frozen=True)
class LambdaTarget:
    """A target inflation factor: an enclosure at the working precision, plus the
    exact value when it is rational."""

    label: str
    enclose: Callable[[], CReal] = field(compare=False)
    exact: Fraction | None = None

    def enclosure(self) -> CReal:
        return self.enclose()


def _rational_target(q: Fraction, label: str) -> LambdaTarget:
    return LambdaTarget(label, lambda: CReal.coerce(q), q)


def parse_lambda(value) -> LambdaTarget:
    """Accepts ``pi``, ``e``, ``sqrt:n``, ``p/q``, decimals, numbers, or a ``CReal``.

    Floats are read through their shortest decimal representation, so
    ``2.1`` means 21/10.
    """
    if isinstance(value, LambdaTarget):
        return value
    if isinstance(value, CReal):
        return LambdaTarget(repr(value), lambda: value, value.lo if value.is_exact() else None)
    if isinstance(value, float):
        value = repr(value)
    if isinstance(value, (int, Fraction)):
        return _rational_target(Fraction(value), str(value))
    text = str(value).strip().lower()
    if text in ("pi", "π"):
        return LambdaTarget("pi", const_pi)
    if text == "e":
        return LambdaTarget("e", const_e)
    if text.startswith("sqrt:"):
        radicand = Fraction(text[5:])
        if radicand < 0:
            raise ValueError("sqrt of a negative number")
        r = _rational_sqrt(radicand)
        if r is not None:
            return _rational_target(r, text)
        return LambdaTarget(text, lambda: CReal.coerce(radicand).sqrt())
    try:
        q = Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"cannot parse lambda {value!r}") from exc
    return _rational_target(q, text)


# ---------------------------------------------------------------------------
# parameters


def mu_from_lambda(lam) -> CReal:
    """Smaller root of ``x**2 - lambda x + 1``, cross-checked by bisection.

    Evaluated as ``2 / (lambda + sqrt(lambda**2 - 4))``, the same root as
    ``(lambda - sqrt(lambda**2 - 4)) / 2`` without the cancellation.
    """
    lam = parse_lambda(lam).enclosure() if not isinstance(lam, CReal) else lam
    if not lam.lo > 2:
        raise ValueError("lambda must be certified > 2")
    mu = 2 / (lam + (lam * lam - 4).sqrt())
    f = lambda x: x + 1 / x - lam  # noqa: E731
    lo = Fraction(1, 2 ** math.ceil(math.log2(float(lam.hi)) + 1))
    j = 1
    while not f(CReal(1 - Fraction(1, 2**j))).certainly_negative():
        j += 1
        if j > get_precision():
            raise PrecisionExhausted("cannot bracket mu away from 1")
    width = max(8 * mu.width, Fraction(1, 2 ** max(8, get_precision() - 16)))
    width = Fraction(1, 2 ** bits_for_width(width))
    check = bisect_root(f, lo, 1 - Fraction(1, 2**j), width)
    if not mu.intersects(check):
        raise InternalInconsistency(f"mu from the quadratic formula {mu} misses the bisection {check}")
    return mu.intersection(check)


@dataclass(frozen=True)
class DesignParameters:
    lambda_target: CReal
    mu: CReal
    spike_period_C: int
    digit_cap_N: int
    mu_prime: CReal
    #: exact ``(mu, mu')`` when the target is rational
    exact: tuple | None = field(default=None, compare=False, repr=False)
    #: True when an uncertifiable tie for the minimal C forced C + 1
    c_tie_broken: bool = False


def choose_parameters(lam) -> DesignParameters:
    """Minimal certified ``C``, digit cap ``ceil((1-mu)/mu) + 1`` and ``mu'``."""
    target = parse_lambda(lam)
    enclosure = target.enclosure()
    if not enclosure.lo > 2:
        raise ValueError("lambda must be certified > 2")
    mu = mu_from_lambda(enclosure)
    exact_m = None
    if target.exact is not None:
        exact_m = exact_mu(target.exact)

    C = 1
    tie = False
    while True:
        s = mu + mu**C
        if s.hi <= 1:
            break
        if s.lo > 1:
            C += 1
            continue
        if exact_m is not None:
            if (exact_m + exact_m**C - 1).sign() <= 0:
                break
            C += 1
            continue
        # the tie cannot be settled; C + 1 is always certified
        tie = True
        C += 1

    ratio = (1 - mu) / mu
    if exact_m is not None:
        er = (1 - exact_m) / exact_m
        n = math.floor(ratio.lo)
        while (er - n).sign() > 0:
            n += 1
        N = n + 1
    else:
        N = math.ceil(ratio.hi) + 1
    mu_prime = 1 / mu - 1 / (1 - mu**C)
    if mu_prime.hi < 0:
        raise InternalInconsistency("mu' is negative")
    exact = None
    if exact_m is not None:
        exact = (exact_m, 1 / exact_m - 1 / (1 - exact_m**C))
    return DesignParameters(enclosure, mu, C, N, mu_prime, exact, tie)


# ---------------------------------------------------------------------------
# greedy digits


def greedy_digits(params: DesignParameters, T: int) -> tuple[list[int], CReal]:
    """Digits ``c_0..c_T`` and the residual ``mu' - sum c_i mu**i``.

    ``c_i`` is the largest digit keeping the partial sum ``<= mu'``.
    Uncertifiable comparisons are settled exactly for rational targets and
    otherwise resolved to the smaller digit, which the enlarged cap absorbs.
    """
    if T < 0:
        raise ValueError("T must be non-negative")
    mu, target, N = params.mu, params.mu_prime, params.digit_cap_N
    exact = params.exact
    digits: list[int] = []
    S = CReal(0)
    power = CReal(1)
    eS = ep = None
    if exact is not None:
        eS, ep = exact[0] * 0, exact[0] ** 0

    def fits(c: int) -> bool:
        v = S + power * c
        if v.hi <= target.lo:
            return True
        if v.lo > target.hi:
            return False
        if exact is not None:
            return (exact[1] - (eS + ep * c)).sign() >= 0
        return False

    for i in range(T + 1):
        if (target - S).width >= power.lo:
            raise PrecisionExhausted(f"enclosures too wide to choose digit {i}")
        gap = (target - S) / power
        c = max(0, min(N, math.floor(gap.mid) + 1))
        while c > 0 and not fits(c):
            c -= 1
        while c < N and fits(c + 1):
            c += 1
        digits.append(c)
        S = S + power * c
        if exact is not None:
            eS = eS + ep * c
            ep = ep * exact[0]
        power = power * mu
    return digits, target - S


def design_precision(mu: float, T: int) -> int:
    """Bits needed so that enclosure widths stay far below ``mu**T``."""
    return max(get_precision(), math.ceil(T * -math.log2(mu)) + 64 + T.bit_length())


def design_sequence(lam, T: int = 300, precision: int | None = None) -> DesignedSequence:
    """Designed sequence for ``lambda``; ``.residual`` and ``.parameters`` are attached."""
    target = parse_lambda(lam)
    with working_precision(64):
        rough = float(mu_from_lambda(target.enclosure()).mid)
    prec = precision or design_precision(rough, T)
    while True:
        try:
            with working_precision(prec):
                params = choose_parameters(target)
                digits, residual = greedy_digits(params, T)
            break
        except PrecisionExhausted:
            if precision is not None or prec >= MAX_PRECISION:
                raise
            prec = min(2 * prec, MAX_PRECISION)
    seq = DesignedSequence(params.spike_period_C, digits, params.digit_cap_N)
    seq.residual = residual
    seq.parameters = params
    return seq


def residual_bound(params: DesignParameters, T: int) -> CReal:
    """``N mu**(T+1) / (1 - mu)``."""
    mu = params.mu
    return params.digit_cap_N * mu ** (T + 1) / (1 - mu)
