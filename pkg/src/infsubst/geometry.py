"""Inflation factor, natural tile lengths and geometric realisations.

``mu`` is the unique root in (0, 1) of ``x * sum_i a_i x**i = 1`` and the
inflation factor is ``lambda = mu + 1/mu``.  The natural length of ``[k]``
is::

    l([0]) = 1,   l([k]) = mu**k + sum_{j=1..k} sum_{i>=j} a_i mu**(i+k+1-2j)

which makes ``(l([0]), l([1]), ...)`` a left eigenvector of the
substitution matrix for ``lambda``.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import BudgetExceeded, DeloneViolation, InternalInconsistency, PrecisionExhausted, UnsupportedLimitLetter
from .numerics import (
    CReal,
    MAX_PRECISION,
    SeriesSpec,
    bisect_root,
    bits_for_width,
    eval_series,
    get_precision,
    tail_depth,
    working_precision,
)
from .sequence import CoefficientSequence, validate
from .substitution import apply_word, letter_histogram, supertile, supertile_size, truncated_matrix

DEFAULT_MU_WIDTH = Fraction(1, 10**30)
DEFAULT_LENGTH_WIDTH = Fraction(1, 10**20)


@dataclass(frozen=True)
class InflationData:
    mu: CReal
    lam: CReal
    seq: CoefficientSequence = field(compare=False)
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if not (self.mu.lo > 0 and self.mu.hi < 1):
            raise ValueError("mu enclosure must lie inside (0, 1)")
        if not self.lam.lo > 2:
            raise ValueError("lambda enclosure must exceed 2")
        if not self.lam.intersects(self.mu + 1 / self.mu):
            raise ValueError("lambda must enclose mu + 1/mu")
        if not self._residual().contains(0):
            raise ValueError("mu does not solve the equation of the sequence")

    def _residual(self) -> CReal:
        # d/dx (x sum a_i x**i) <= N / (1 - x)**2 bounds the spread from the width of mu
        mu = self.mu
        prec = max(get_precision(), bits_for_width(mu.width) + 16) if mu.width else get_precision()
        with working_precision(prec):
            width = Fraction(1, 2 ** (prec - 8)) + 8 * self.seq.N * mu.width / (1 - mu.hi) ** 2
            return mu * eval_series(_series(self.seq), mu, width) - 1


def _series(seq: CoefficientSequence, start: int = 0) -> SeriesSpec:
    return SeriesSpec(seq, seq.N, start_index=start)


def mu_equation(seq: CoefficientSequence):
    """``x -> x * sum_i a_i x**i - 1`` evaluated to the working precision."""
    spec = _series(seq)

    def f(x: CReal) -> CReal:
        if x.is_exact() and x.lo == 0:
            return CReal(-1)
        width = Fraction(1, 2 ** max(8, get_precision() - 8))
        return x * eval_series(spec, x, width) - 1

    return f


def solve_mu(seq: CoefficientSequence, target_width=DEFAULT_MU_WIDTH, precision: int | None = None) -> InflationData:
    """Certified ``mu`` and ``lambda``, both with width at most ``target_width``."""
    validate(seq)
    target = Fraction(target_width)
    prec = precision if precision is not None else max(get_precision(), bits_for_width(target) + 32)
    with working_precision(prec):
        f = mu_equation(seq)
        lo = Fraction(1, 2 ** (seq.N + 1).bit_length())
        j = 1
        while True:
            hi = 1 - Fraction(1, 2**j)
            if f(CReal(hi)).certainly_positive():
                break
            j += 1
            if j > prec:
                raise PrecisionExhausted("no certified upper bracket for mu")
        # lambda' = 1 - 1/mu**2, so shrink the mu budget by about mu**2
        mu_target = target * lo * lo / 4
        mu_target = Fraction(1, 2 ** bits_for_width(mu_target))
        mu = bisect_root(f, lo, hi, mu_target)
        lam = mu + 1 / mu
        if lam.width > target:
            raise PrecisionExhausted(f"lambda width {float(lam.width):.3e} exceeds target")
    return InflationData(mu, lam, seq)


def refine(data: InflationData, target_width) -> InflationData:
    """Re-solve ``mu`` to a tighter width (no-op if already tight enough)."""
    if data.lam.width <= Fraction(target_width):
        return data
    return solve_mu(data.seq, target_width)


# ---------------------------------------------------------------------------
# tile lengths


def _lengths_by_series(data: InflationData, kmax: int, target: Fraction) -> list[CReal]:
    """Nested evaluation of the double sum.

    With the shifted series ``R_j = sum_{m>=0} a_{j+m} mu**m`` the length
    formula reads ``l([k]) = mu**k + sum_{j=1..k} mu**(k+1-j) R_j``, i.e.
    ``l([k]) = mu * (l([k-1]) + R_k)``.  The ``R_j`` come from one backward
    Horner pass started from the geometric tail enclosure ``[0, N/(1-mu)]``.
    """
    seq, mu = data.seq, data.mu
    T = tail_depth(seq.N, mu.hi, target * (1 - mu.hi) / 4)
    top = kmax + T + 1
    a = seq.prefix(top).tolist()
    if any(v < 0 or v > seq.N for v in a):
        raise ValueError("coefficient outside [0, N]")
    bound = CReal((seq.N / (1 - mu)).hi)
    R = [CReal(0)] * (kmax + 1)
    r = CReal(0, bound.hi)
    for i in range(top - 1, 0, -1):
        r = r * mu + a[i]
        if i <= kmax:
            R[i] = r
    out = [CReal(1)]
    ell = CReal(1)
    for k in range(1, kmax + 1):
        ell = mu * (ell + R[k])
        out.append(ell)
    return out


def _lengths_by_recursion(data: InflationData, kmax: int) -> list[CReal]:
    """``l([1]) = lambda - a_0``, ``l([k]) = lambda l([k-1]) - l([k-2]) - a_{k-1}``.

    Widths grow like ``lambda**k``; the list stops once an entry is wider than 1.
    """
    a = data.seq.prefix(kmax + 1).tolist()
    out = [CReal(1)]
    if kmax >= 1:
        out.append(data.lam - a[0])
    for k in range(2, kmax + 1):
        nxt = data.lam * out[-1] - out[-2] - a[k - 1]
        if nxt.width > 1:
            break
        out.append(nxt)
    return out


def tile_lengths(data: InflationData, kmax: int, target_width=DEFAULT_LENGTH_WIDTH) -> list[CReal]:
    """Certified ``l([0]) .. l([kmax])`` from two independent formulas, intersected."""
    if kmax < 0:
        raise ValueError("kmax must be non-negative")
    target = Fraction(target_width)
    cached = data._cache.get("lengths")
    if cached is not None and len(cached[1]) > kmax and cached[0] <= target:
        return cached[1][: kmax + 1]
    prec = max(get_precision(), bits_for_width(target) + 32 + kmax.bit_length())
    current = data
    while True:
        with working_precision(prec):
            series = _lengths_by_series(current, kmax, target)
            recursion = _lengths_by_recursion(current, kmax)
        if max(x.width for x in series) <= target:
            break
        if prec >= MAX_PRECISION:
            raise PrecisionExhausted("tile length enclosure too wide")
        prec = min(2 * prec, MAX_PRECISION)
        current = refine(current, current.lam.width / 2**32)
    out = []
    for k, s in enumerate(series):
        if k < len(recursion):
            if not s.intersects(recursion[k]):
                raise InternalInconsistency(f"series and recursion disagree for l([{k}]): {s} vs {recursion[k]}")
            s = s.intersection(recursion[k])
        out.append(s)
    data._cache["lengths"] = (target, out)
    return out


def tile_length(data: InflationData, k: int, target_width=DEFAULT_LENGTH_WIDTH) -> CReal:
    return tile_lengths(data, k, target_width)[k]


def frequency_vector(data: InflationData, upto: int) -> list[CReal]:
    """Letter frequencies ``(1 - mu) mu**i`` for ``i = 0..upto``."""
    out = []
    f = 1 - data.mu
    for _ in range(upto + 1):
        out.append(f)
        f = f * data.mu
    return out


def frequency_tail(data: InflationData, upto: int) -> CReal:
    """Total frequency of the letters beyond ``upto``: ``mu**(upto+1)``."""
    return data.mu ** (upto + 1)


def empirical_frequencies(data: InflationData, k: int, budget: int = 10_000_000) -> dict[int, Fraction]:
    """Exact relative letter counts in ``rho^k([0])``."""
    word = supertile(data.seq, 0, k, budget)
    n = word.size
    return {i: Fraction(c, n) for i, c in letter_histogram(word).items()}


# ---------------------------------------------------------------------------
# eigenvector identities


def left_eigen_residuals(data: InflationData, M: int, target_width=DEFAULT_LENGTH_WIDTH) -> list[CReal]:
    """``(l A)_j - lambda l_j`` for the interior columns ``1 <= j <= M-2`` of the M x M corner."""
    A = truncated_matrix(data.seq, M).entries
    ell = tile_lengths(data, M - 1, target_width)
    out = []
    for j in range(1, M - 1):
        rows = np.flatnonzero(A[:, j])
        total = CReal(0)
        for i in rows.tolist():
            total = total + ell[i] * int(A[i, j])
        out.append(total - data.lam * ell[j])
    return out


def first_column_residual(data: InflationData) -> CReal:
    """``a_0 l([0]) + l([1]) - lambda``."""
    return int(data.seq[0]) + tile_length(data, 1) - data.lam


def right_eigen_residuals(data: InflationData, upto: int) -> list[CReal]:
    """``mu**(i-1) + mu**(i+1) - lambda mu**i`` for ``i = 1..upto``; row 0 is the mu equation."""
    mu = data.mu
    out = []
    p_prev, p = CReal(1), mu
    for _ in range(1, upto + 1):
        p_next = p * mu
        out.append(p_prev + p_next - data.lam * p)
        p_prev, p = p, p_next
    return out


def max_abs(residuals: list[CReal]) -> CReal:
    """Interval for ``max_j |r_j|``: contains 0 iff every residual does."""
    if not residuals:
        return CReal(0)
    return CReal(max(r.mig() for r in residuals), max(r.mag() for r in residuals))


def continuity_bound(data: InflationData, n: int) -> CReal:
    """Bound on ``|l([k]) - l([k+t])|`` when the coefficient windows of radius n agree."""
    mu, N = data.mu, data.seq.N
    one_minus = (1 - mu) ** 2
    return (1 + 2 * N / one_minus + 2 * mu * mu * N / one_minus) * mu**n


# ---------------------------------------------------------------------------
# patches


@dataclass(frozen=True)
class Tile:
    letter: int
    position: CReal
    length: CReal


@dataclass(frozen=True)
class Patch:
    tiles: list
    origin_offset: CReal

    @property
    def span(self) -> CReal:
        if not self.tiles:
            return CReal(0)
        last = self.tiles[-1]
        return last.position + last.length - self.tiles[0].position

    def positions(self) -> list[CReal]:
        return [t.position for t in self.tiles]


def realize(data: InflationData, word, anchor=0) -> Patch:
    """Lay the tiles of ``word`` end to end, the first starting at ``anchor``."""
    word = np.asarray(word, dtype=np.int64)
    if word.size and word.min() < 0:
        raise UnsupportedLimitLetter("limit letters have no first-class length")
    anchor = CReal.coerce(anchor)
    if word.size == 0:
        return Patch([], anchor)
    ell = tile_lengths(data, int(word.max()))
    tiles = []
    pos = anchor
    for c in word.tolist():
        tiles.append(Tile(c, pos, ell[c]))
        pos = pos + ell[c]
    return Patch(tiles, anchor)


def verify_inflation(data: InflationData, word) -> CReal:
    """Max over j of ``|lambda * x_j - y_j|``, where ``x_j`` is the j-th tile position
    in ``word`` and ``y_j`` the position of its supertile in ``rho(word)``."""
    word = np.asarray(word, dtype=np.int64)
    image = apply_word(data.seq, word)
    small = realize(data, word)
    big = realize(data, image)
    a = data.seq.prefix(int(word.max()) + 1) if word.size else np.zeros(1, dtype=np.int64)
    sizes = a[word] + 1 + (word >= 1)
    offsets = np.concatenate([[0], np.cumsum(sizes)[:-1]]).tolist()
    residuals = [data.lam * t.position - big.tiles[o].position for t, o in zip(small.tiles, offsets)]
    return max_abs(residuals)


def delone_lower_bound(data: InflationData) -> CReal:
    return data.mu ** (data.seq.C + 1)


def delone_bounds(data: InflationData, k_max: int) -> tuple[CReal, CReal]:
    """Smallest and largest tile length over ``[0..k_max]``, checked against ``mu**(C+1)``."""
    if k_max < 0:
        raise ValueError("k_max must be non-negative")
    ell = tile_lengths(data, k_max)
    lo = CReal(min(x.lo for x in ell), min(x.hi for x in ell))
    hi = CReal(max(x.lo for x in ell), max(x.hi for x in ell))
    bound = delone_lower_bound(data)
    if lo.hi < bound.lo:
        raise DeloneViolation(f"minimum tile length {lo} below the bound {bound}")
    return lo, hi


@dataclass(frozen=True)
class DeloneSet:
    """Left endpoints of a self-similar patch, restricted to a window ``[0, W]``."""

    points: list
    power: int
    scale: CReal
    window: Fraction
    anchor: str

    def containment_defect(self) -> tuple[Fraction, Fraction]:
        """Largest distance from ``scale * p`` (inside the window) to the nearest point,
        and the tolerance ``3 * max interval width`` it is judged against."""
        mids = [p.mid for p in self.points]
        worst = Fraction(0)
        max_width = Fraction(0)
        for p in self.points:
            q = self.scale * p
            if q.hi > self.window or q.lo < 0:
                continue
            i = bisect.bisect_left(mids, q.mid)
            cands = [self.points[j] for j in (i - 1, i) if 0 <= j < len(self.points)]
            best = min(cands, key=lambda c: abs(c.mid - q.mid))
            worst = max(worst, (q - best).mag())
            max_width = max(max_width, q.width, best.width)
        return worst, 3 * max_width

    def is_inflation_invariant(self) -> bool:
        worst, tol = self.containment_defect()
        return worst <= tol


def fixed_point_delone(data: InflationData, window, anchor: str = "origin", budget: int = 1_000_000) -> DeloneSet:
    """Points of a self-similar Delone set ``Lambda`` with ``lambda**k Lambda`` inside ``Lambda``.

    ``k = 2`` when ``a_0 = 1`` and ``k = 1`` otherwise; then ``rho^k([0])``
    starts with ``[0]`` and has another ``[0]`` away from its ends.

    ``anchor="origin"``: the seed ``[0]`` sits on ``[0, 1]``.  Its image
    under the inflation starts with ``[0]`` at 0 again, so the patches
    ``rho^(kn)([0])`` on ``[0, lambda**(kn)]`` are nested and the set is
    one-sided.

    ``anchor="interior"``: the seed is placed so that the inflation maps it
    onto the interior copy of ``[0]`` in its own image.  The origin is then
    the fixed point of the inflation, strictly inside the seed, and the
    patches grow in both directions.
    """
    W = Fraction(window)
    if W <= 0:
        raise ValueError("window must be positive")
    seq = data.seq
    k = 2 if seq[0] == 1 else 1
    lam_k = data.lam**k
    if anchor == "interior":
        seed = supertile(seq, 0, k)
        d = next(i for i in range(1, seed.size - 1) if seed[i] == 0)
        ell = tile_lengths(data, int(seed.max()))
        offset = CReal(0)
        for c in seed[:d].tolist():
            offset = offset + ell[c]
        t = -offset / (lam_k - 1)
    elif anchor == "origin":
        t = CReal(0)
    else:
        raise ValueError(f"unknown anchor {anchor!r}")

    max_len = max(x.hi for x in tile_lengths(data, 8))
    n = 0
    scale = CReal(1)
    while True:
        right = scale * (t + 1)
        if right.lo >= W + 2 * max(max_len, 1) and n >= 1:
            break
        n += 1
        scale = scale * lam_k
        if supertile_size(seq, 0, k * n) > budget:
            raise BudgetExceeded(f"level-{k * n} supertile exceeds budget {budget}")
    word = supertile(seq, 0, k * n, budget)
    patch = realize(data, word, scale * t)
    pts = [p for p in patch.positions() if p.hi >= 0 and p.lo <= W]
    return DeloneSet(pts, k, lam_k, W, anchor)
