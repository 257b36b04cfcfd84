"""Integer polynomial certificates and Thue-Morse consistency checks.

For an eventually periodic sequence with preperiod ``j`` and period ``k``
the defining equation of ``mu`` reads

    1/mu = Pre(mu) + Per(mu) / (1 - mu**k),
    Pre(x) = sum_{i<j} a_i x**i,   Per(x) = sum_{i=j}^{j+k-1} a_i x**i,

and multiplying by ``mu (1 - mu**k)`` leaves the integer polynomial
``x (1 - x**k) Pre(x) + x Per(x) - (1 - x**k)`` with constant term -1.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .geometry import InflationData, solve_mu
from .numerics import CReal, SeriesSpec, eval_series, get_precision, working_precision
from .sequence import EventuallyPeriodicSequence, ThueMorseSequence, thue_morse_coefficient


@dataclass(frozen=True)
class IntegerPolynomial:
    """Coefficients in ascending degree; the leading one is non-zero."""

    coefficients: tuple

    def __post_init__(self):
        coeffs = [int(c) for c in self.coefficients]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        if not coeffs:
            raise ValueError("the zero polynomial is not a certificate")
        object.__setattr__(self, "coefficients", tuple(coeffs))

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @property
    def constant_term(self) -> int:
        return self.coefficients[0]

    def normalized(self) -> "IntegerPolynomial":
        """Same polynomial with a positive leading coefficient."""
        if self.coefficients[-1] < 0:
            return IntegerPolynomial(tuple(-c for c in self.coefficients))
        return self

    def __call__(self, x):
        if isinstance(x, CReal):
            acc = CReal(0)
        else:
            acc = 0
        for c in reversed(self.coefficients):
            acc = acc * x + c
        return acc

    def to_json(self) -> dict:
        return {"coeffs": [str(c) for c in self.coefficients]}

    @classmethod
    def from_json(cls, data: dict) -> "IntegerPolynomial":
        return cls(tuple(int(c) for c in data["coeffs"]))

    def __str__(self) -> str:
        terms = []
        for i in range(self.degree, -1, -1):
            c = self.coefficients[i]
            if c == 0:
                continue
            mag = abs(c)
            body = "" if (mag == 1 and i) else str(mag)
            if i:
                body += "x" if i == 1 else f"x^{i}"
            sign = "-" if c < 0 else "+"
            terms.append((sign, body))
        first_sign, first = terms[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in terms[1:]:
            out += f" {sign} {body}"
        return out


def _poly_mul(p: list[int], q: list[int]) -> list[int]:
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return out


def _poly_add(*polys: list[int]) -> list[int]:
    out = [0] * max(len(p) for p in polys)
    for p in polys:
        for i, c in enumerate(p):
            out[i] += c
    return out


def certificate_from_presentation(pre, period) -> IntegerPolynomial:
    """Certificate for the literal presentation ``pre`` + ``period`` repeated (not canonicalised)."""
    pre = [int(v) for v in pre]
    period = [int(v) for v in period]
    j, k = len(pre), len(period)
    if k == 0:
        raise ValueError("period must be non-empty")
    one_minus_xk = [1] + [0] * (k - 1) + [-1]
    pre_poly = pre or [0]
    per_poly = [0] * j + period
    x = [0, 1]
    terms = _poly_add(
        _poly_mul(_poly_mul(x, one_minus_xk), pre_poly),
        _poly_mul(x, per_poly),
        [-c for c in one_minus_xk],
    )
    return IntegerPolynomial(tuple(terms)).normalized()


def periodic_certificate(seq: EventuallyPeriodicSequence) -> IntegerPolynomial:
    """Integer polynomial vanishing at ``mu``, from the canonical presentation."""
    if not isinstance(seq, EventuallyPeriodicSequence):
        raise TypeError("certificates exist for eventually periodic sequences only")
    return certificate_from_presentation(seq.pre, seq.period)


def certificate_residual(poly: IntegerPolynomial, data: InflationData) -> CReal:
    """Enclosure of ``P(mu)``; contains 0 for a valid certificate."""
    return poly(data.mu)


def constant_term_obstruction(mu) -> bool:
    """True when the rational ``mu = p/q`` cannot come from an eventually periodic sequence.

    Such a ``mu`` would be a root of an integer polynomial with constant
    term -1, and the rational root test then forces ``p | 1``.
    """
    mu = Fraction(mu)
    if not 0 < mu < 1:
        raise ValueError("mu must lie in (0, 1)")
    return mu.numerator != 1


# ---------------------------------------------------------------------------
# Thue-Morse


def _signs(i: int) -> int:
    return 2 * thue_morse_coefficient(i) - 3


def thue_morse_series(z, width=None) -> CReal:
    """``T(z) = sum_n t_n z**n`` with ``t_n = +-1``, tail bounded by ``z**(T+1) / (1 - z)``."""
    z = CReal.coerce(z)
    if width is None:
        width = Fraction(1, 2 ** max(8, get_precision() - 8))
        if z.hi < 1:
            # |T'(x)| <= 1 / (1 - x)**2 sets a floor from the width of z
            width += 8 * z.width / (1 - z.hi) ** 2
    return eval_series(SeriesSpec(_signs, 1, signed=True), z, width)


def thue_morse_identity(x: CReal) -> CReal:
    """``1/x - 3 / (2 (1 - x)) - T(x) / 2``; vanishes at ``mu``."""
    return 1 / x - 3 / (2 * (1 - x)) - thue_morse_series(x) / 2


def thue_morse_consistency(data: InflationData, precision: int | None = None) -> CReal:
    """Residual of the generating-function identity at ``mu``.

    ``mu`` is re-solved when its enclosure is coarser than the requested
    precision, so the residual width shrinks as the precision grows.
    """
    if not isinstance(data.seq, ThueMorseSequence):
        raise TypeError("the identity holds for the Thue-Morse coefficients only")
    prec = precision or get_precision()
    with working_precision(prec):
        fine = Fraction(1, 2 ** max(8, prec - 16))
        if data.mu.width > fine:
            data = solve_mu(data.seq, fine, precision=prec)
        return thue_morse_identity(data.mu)


def functional_equation_residual(z) -> CReal:
    """``T(z) - (1 - z) T(z**2)``, which should contain 0."""
    z = CReal.coerce(z)
    return thue_morse_series(z) - (1 - z) * thue_morse_series(z * z)
