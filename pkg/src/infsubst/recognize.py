"""Decomposition of legal words into level-1 and level-k supertiles.

A maximal block of zeros always opens a level-1 supertile, so cuts sit
wherever a non-zero letter is followed by ``[0]``.  Inside a segment
(zero block, then ``m`` non-zero letters) the first supertile takes one
non-zero letter when ``m`` is odd and two when ``m`` is even; the rest pair
up as zero-free supertiles ``[i-1][i+1] = rho([i])``.

Finite words get an edge policy: letters that cannot start a complete
supertile on the left (a truncated zero block, an unmatched leading letter)
form ``left_fragment``, and an unfinished supertile at the end forms
``right_fragment``.  A truncated tail can look like a complete image of
the wrong letter; deeper levels detect this and push it into the fragment.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from ._kernels import INCOMPLETE, ODD_LEFTOVER, OK, TOO_FEW_ZEROS
from .errors import NotLegal
from .sequence import CoefficientSequence

_STATUS_NAMES = {1: "too few zeros", 2: "no valid preimage", 3: "incomplete", 4: "unmatched letter"}


@dataclass(frozen=True)
class Decomposition:
    left_fragment: np.ndarray
    supertiles: list
    right_fragment: np.ndarray
    #: index in the input word where each supertile starts
    offsets: list = field(default_factory=list)

    @property
    def preimage(self) -> np.ndarray:
        return np.array([p for p, _ in self.supertiles], dtype=np.int64)

    def concatenation(self) -> np.ndarray:
        parts = [self.left_fragment] + [img for _, img in self.supertiles] + [self.right_fragment]
        return np.concatenate(parts).astype(np.int64)

    @property
    def has_fragments(self) -> bool:
        return bool(self.left_fragment.size or self.right_fragment.size)

    def to_json(self) -> dict:
        return {
            "left": self.left_fragment.tolist(),
            "supertiles": [{"preimage": int(p), "image": img.tolist()} for p, img in self.supertiles],
            "right": self.right_fragment.tolist(),
        }


def _coefficients(seq: CoefficientSequence, w: np.ndarray) -> np.ndarray:
    top = int(w.max()) if w.size else 0
    return seq.prefix(top + 3)


def _interpret(w: np.ndarray, a: np.ndarray, N: int, parser):
    """``(left_len, [(preimage, start, end)], right_len)`` or a failure message."""
    start, end, pre, stat = parser(w, a)
    lo, hi = 0, start.size
    left = 0
    if lo < hi and stat[lo] == ODD_LEFTOVER:
        left = int(end[lo])
        lo += 1
    if lo < hi and stat[lo] != OK and start[lo] == left:
        in_prefix = w[start[lo]] != 0
        truncated_block = start[lo] == 0 and stat[lo] == TOO_FEW_ZEROS
        if (in_prefix and left == 0) or truncated_block:
            left = int(end[lo])
            lo += 1
    right = 0
    if hi > lo and stat[hi - 1] == INCOMPLETE:
        right = int(end[hi - 1] - start[hi - 1])
        if right > N + 1:
            return f"zero block of length {right} at the end exceeds N + 1"
        hi -= 1
    bad = np.flatnonzero(stat[lo:hi] != OK)
    if bad.size:
        j = lo + int(bad[0])
        return f"{_STATUS_NAMES[int(stat[j])]} at letters {int(start[j])}..{int(end[j]) - 1}"
    tiles = list(zip(pre[lo:hi].tolist(), start[lo:hi].tolist(), end[lo:hi].tolist()))
    return left, tiles, right


def _level1_spans(seq: CoefficientSequence, w: np.ndarray, parser=None):
    parser = parser or _kernels.parse
    if w.size == 0:
        return 0, [], 0
    if w.min() < 0:
        raise NotLegal("words with limit letters cannot be decomposed")
    a = _coefficients(seq, w)
    result = _interpret(w, a, seq.N, parser)
    if not isinstance(result, str):
        return result
    # The word may end inside a supertile whose cut-off head is itself a valid
    # image, which leaves a wrong last letter one level up.  Drop letters of
    # the last segment (at most two non-zero ones) until the rest parses.
    n = w.size
    cuts = np.flatnonzero((w[1:] == 0) & (w[:-1] != 0)) + 1
    last_cut = int(cuts[-1]) if cuts.size else 0
    for d in range(1, n - last_cut + 1):
        if np.count_nonzero(w[n - d :]) > 2:
            break
        retry = _interpret(w[: n - d], a, seq.N, parser)
        if not isinstance(retry, str):
            left, tiles, right = retry
            return left, tiles, right + d
    raise NotLegal(result)


def _check_zero_runs(w: np.ndarray, N: int) -> None:
    # images end in a non-zero letter, so zero runs never exceed a_1 + 1 <= N + 1
    edges = np.flatnonzero(np.diff(np.concatenate([[1], w, [1]]) == 0))
    runs = edges[1::2] - edges[::2]
    if runs.size and runs.max() > N + 1:
        raise NotLegal(f"zero run of length {int(runs.max())} exceeds N + 1")


def _build(w: np.ndarray, left: int, spans, right: int) -> Decomposition:
    n = w.size
    tiles = [(p, w[s:e].copy()) for p, s, e in spans]
    return Decomposition(w[:left].copy(), tiles, w[n - right :].copy(), [s for _, s, _ in spans])


def decompose_level1(seq: CoefficientSequence, word, parser=None) -> Decomposition:
    """Split ``word`` into level-1 supertiles with edge fragments; ``NotLegal`` if impossible."""
    w = np.asarray(word, dtype=np.int64)
    _check_zero_runs(w, seq.N)
    left, spans, right = _level1_spans(seq, w, parser)
    return _build(w, left, spans, right)


def decompose_levelk(seq: CoefficientSequence, word, k: int, parser=None) -> Decomposition:
    """Iterate the level-1 decomposition ``k`` times on the preimage words.

    Fragments found at deeper levels are mapped back to letters of the
    original word, so the concatenation invariant still holds.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    w = np.asarray(word, dtype=np.int64)
    _check_zero_runs(w, seq.N)
    left, spans, right = _level1_spans(seq, w, parser)
    for _ in range(k - 1):
        if not spans:
            break
        cur = np.array([p for p, _, _ in spans], dtype=np.int64)
        l2, sub, r2 = _level1_spans(seq, cur, parser)
        if l2:
            left = spans[l2 - 1][2]
        if r2:
            right = w.size - spans[len(spans) - r2][1]
        spans = [(p, spans[s][1], spans[e - 1][2]) for p, s, e in sub]
    return _build(w, left, spans, right)
