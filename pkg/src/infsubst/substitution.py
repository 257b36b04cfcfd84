"""The substitution on isolated and limit letters.

Letters are plain ``int`` for the isolated letters ``[i]`` and
:class:`Limit` for accumulation points.  A *word* is a 1-D int64 array of
letter codes: code ``i >= 0`` is ``[i]``; code ``-1 - r`` is the limit
letter of phase ``r`` of an eventually periodic sequence (so codes of
limit letters only make sense together with their sequence).

The rule is::

    [0]      -> [0]^a_0 [1]
    [i]      -> [0]^a_i [i-1] [i+1]                    (i > 0)
    [inf_b]  -> [0]^b_0 [inf_{shift^-1 b}] [inf_{shift b}]
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Union

import numpy as np

from . import _kernels
from .errors import BudgetExceeded, NoConvergence, UnsupportedLimitLetter
from .numerics import CReal
from .sequence import CoefficientSequence, EventuallyPeriodicSequence

DEFAULT_BUDGET = 10_000_000


def _canonical_rotation(block: tuple[int, ...]) -> int:
    k = len(block)
    return min(range(k), key=lambda r: block[r:] + block[:r])


@dataclass(frozen=True)
class Limit:
    """The limit letter whose window is the periodic bi-infinite word ``b_m = period[(phase + m) % k]``.

    Stored with the lexicographically least rotation of the shortest
    period, so equal windows compare equal.
    """

    period: tuple
    phase: int = 0

    def __post_init__(self):
        block = tuple(int(v) for v in self.period)
        if not block:
            raise ValueError("period must be non-empty")
        if any(v < 0 for v in block):
            raise ValueError("window entries must be non-negative integers")
        k = len(block)
        for p in range(1, k + 1):
            if k % p == 0 and block == block[:p] * (k // p):
                block = block[:p]
                break
        k = len(block)
        r = _canonical_rotation(block)
        object.__setattr__(self, "period", block[r:] + block[:r])
        object.__setattr__(self, "phase", (int(self.phase) - r) % k)

    @property
    def b0(self) -> int:
        return self.period[self.phase]

    def window(self, radius: int) -> list[int]:
        """``b_{-radius} .. b_{radius}``."""
        k = len(self.period)
        return [self.period[(self.phase + m) % k] for m in range(-radius, radius + 1)]

    def shifted(self, steps: int) -> "Limit":
        """``shift**steps`` of the window (positive steps shift left)."""
        return Limit(self.period, self.phase + steps)

    def to_json(self) -> dict:
        return {"limit": {"period": list(self.period), "phase": self.phase}}


Letter = Union[int, Limit]


# ---------------------------------------------------------------------------
# encoding words


def limit_letters(seq: CoefficientSequence) -> list[Limit]:
    """All limit letters of the alphabet (one per phase of the period)."""
    if not isinstance(seq, EventuallyPeriodicSequence):
        raise UnsupportedLimitLetter(f"{seq.kind} sequences have no finite set of limit letters")
    return [Limit(seq.period, r) for r in range(len(seq.period))]


def _phase_in(seq: CoefficientSequence, letter: Limit) -> int:
    if not isinstance(seq, EventuallyPeriodicSequence):
        raise UnsupportedLimitLetter(f"limit letters are not supported for {seq.kind} sequences")
    ref = Limit(seq.period, 0)
    if letter.period != ref.period:
        raise UnsupportedLimitLetter(f"{letter} is not an accumulation point of this alphabet")
    return (letter.phase - ref.phase) % len(seq.period)


def letter_code(seq: CoefficientSequence, letter: Letter) -> int:
    if isinstance(letter, Limit):
        return -1 - _phase_in(seq, letter)
    letter = int(letter)
    if letter < 0:
        raise ValueError("isolated letters are non-negative integers")
    return letter


def encode(seq: CoefficientSequence, letters) -> np.ndarray:
    return np.array([letter_code(seq, x) for x in letters], dtype=np.int64)


def decode(seq: CoefficientSequence, word) -> list[Letter]:
    out: list[Letter] = []
    for c in np.asarray(word).tolist():
        if c >= 0:
            out.append(c)
        else:
            out.append(Limit(seq.period, -1 - c))
    return out


def word_to_json(seq: CoefficientSequence, word) -> list:
    return [x.to_json() if isinstance(x, Limit) else x for x in decode(seq, word)]


def word_from_json(seq: CoefficientSequence, items) -> np.ndarray:
    letters = []
    for x in items:
        if isinstance(x, dict):
            lim = x["limit"]
            letters.append(Limit(tuple(lim["period"]), lim.get("phase", 0)))
        else:
            letters.append(int(x))
    return encode(seq, letters)


# ---------------------------------------------------------------------------
# substitution


def _coefficients_for(seq: CoefficientSequence, word: np.ndarray) -> np.ndarray:
    top = int(word.max()) if word.size else 0
    return seq.prefix(max(top, 0) + 3)


def _apply_limit_code(seq: EventuallyPeriodicSequence, code: int) -> list[int]:
    k = len(seq.period)
    r = -1 - code
    b0 = seq.period[r]
    return [0] * b0 + [-1 - (r - 1) % k, -1 - (r + 1) % k]


def apply(seq: CoefficientSequence, letter: Letter) -> np.ndarray:
    """Image of a single letter."""
    return apply_word(seq, np.array([letter_code(seq, letter)], dtype=np.int64))


def apply_word(seq: CoefficientSequence, word) -> np.ndarray:
    """Image of a word (concatenation of the letter images, in order)."""
    word = np.asarray(word, dtype=np.int64)
    if word.size == 0:
        return np.empty(0, dtype=np.int64)
    if word.min() >= 0:
        return _kernels.expand(word, _coefficients_for(seq, word))
    if not isinstance(seq, EventuallyPeriodicSequence):
        raise UnsupportedLimitLetter(f"limit letters are not supported for {seq.kind} sequences")
    a = _coefficients_for(seq, word)
    out: list[int] = []
    for c in word.tolist():
        if c >= 0:
            out.extend(_kernels.expand_numpy(np.array([c]), a).tolist())
        else:
            out.extend(_apply_limit_code(seq, c))
    return np.array(out, dtype=np.int64)


def supertile_size(seq: CoefficientSequence, letter_index: int, k: int) -> int:
    """Exact ``|rho^k([i])|`` from letter counts, without building the word."""
    if k < 0 or letter_index < 0:
        raise ValueError("k and letter index must be non-negative")
    a = [int(v) for v in seq.prefix(letter_index + k + 2)]
    counts = [0] * (letter_index + k + 2)
    counts[letter_index] = 1
    top = letter_index
    for _ in range(k):
        new = [0] * len(counts)
        for j in range(top + 1):
            c = counts[j]
            if not c:
                continue
            new[0] += c * a[j]
            new[j + 1] += c
            if j >= 1:
                new[j - 1] += c
        counts = new
        top += 1
    return sum(counts)


def supertile(seq: CoefficientSequence, letter: Letter, k: int, budget: int = DEFAULT_BUDGET) -> np.ndarray:
    """The level-k supertile ``rho^k(letter)``; raises ``BudgetExceeded`` past ``budget`` letters."""
    if k < 0:
        raise ValueError("k must be non-negative")
    code = letter_code(seq, letter)
    if code >= 0:
        size = supertile_size(seq, code, k)
        if size > budget:
            raise BudgetExceeded(f"|rho^{k}([{code}])| = {size} exceeds budget {budget}")
    word = np.array([code], dtype=np.int64)
    for _ in range(k):
        word = apply_word(seq, word)
        if word.size > budget:
            raise BudgetExceeded(f"supertile exceeds budget {budget}")
    return word


def letter_histogram(word, seq: CoefficientSequence | None = None) -> dict:
    """Exact letter counts; limit letters are decoded when ``seq`` is given."""
    word = np.asarray(word, dtype=np.int64)
    counts: dict = {}
    iso = word[word >= 0]
    if iso.size:
        bc = np.bincount(iso)
        counts.update({int(i): int(c) for i, c in enumerate(bc) if c})
    for code, c in Counter(word[word < 0].tolist()).items():
        key = Limit(seq.period, -1 - code) if seq is not None else code
        counts[key] = c
    return counts


def count_outside(seq: CoefficientSequence, letter_index: int, k: int, top: int) -> tuple[int, int]:
    """``(#letters of rho^k([i]) with index > top, |rho^k([i])|)``."""
    word = supertile(seq, letter_index, k)
    return int(np.count_nonzero(word > top)), int(word.size)


# ---------------------------------------------------------------------------
# the substitution matrix


@dataclass(frozen=True)
class TruncatedOperator:
    """Upper-left ``size x size`` corner of the substitution matrix.

    Entry ``(i, j)`` counts ``[i]`` in ``rho([j])``.
    """

    size: int
    entries: np.ndarray

    def column_sums(self) -> np.ndarray:
        return self.entries.sum(axis=0)


def truncated_matrix(seq: CoefficientSequence, M: int) -> TruncatedOperator:
    if M < 3:
        raise ValueError("truncation size must be at least 3")
    a = seq.prefix(M)
    A = np.zeros((M, M), dtype=np.int64)
    A[0, :] = a
    A[0, 1] += 1
    idx = np.arange(1, M)
    A[idx, idx - 1] = 1
    A[idx[:-1], idx[:-1] + 1] = 1
    A.setflags(write=False)
    return TruncatedOperator(M, A)


def _has_substitution_shape(op: TruncatedOperator) -> bool:
    A = op.entries
    M = op.size
    if M < 3 or A.shape != (M, M) or (A < 0).any():
        return False
    lower = A[1:, :].copy()
    idx = np.arange(M - 1)
    if not (lower[idx, idx] == 1).all():
        return False
    lower[idx, idx] = 0
    inner = np.arange(M - 2)
    if not (lower[inner, inner + 2] == 1).all():
        return False
    lower[inner, inner + 2] = 0
    return A[0, 0] >= 1 and not lower.any()


def power_iteration(op: TruncatedOperator, iters: int = 20000, tol: float = 1e-12) -> CReal:
    """Dominant eigenvalue of the finite corner by power iteration.

    Returns the Collatz-Wielandt bracket ``[min_i (Av)_i/v_i, max_i (Av)_i/v_i]``
    once it is narrower than ``tol``.  Floating point, and the finite corner
    slightly underestimates the infinite-matrix eigenvalue: an estimate,
    not a certified enclosure.
    """
    if not _has_substitution_shape(op):
        raise ValueError("matrix does not have the substitution-matrix structure")
    A = op.entries.astype(np.float64)
    v = np.ones(op.size)
    for _ in range(iters):
        w = A @ v
        ratios = w / v
        lo, hi = ratios.min(), ratios.max()
        v = w / np.linalg.norm(w)
        if hi - lo <= tol * hi:
            return CReal(float(lo), float(hi))
    raise NoConvergence(f"power iteration did not converge in {iters} iterations (bracket {lo}, {hi})")
