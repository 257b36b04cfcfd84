"""Array kernels for word expansion and level-1 parsing.

Each kernel exists twice: a vectorised numpy version and a numba
``@njit`` loop.  The numba path is used when numba imports and the
environment variable ``INFSUBST_DISABLE_NUMBA`` is unset (or ``0``).
Both paths operate on int64 arrays of isolated letter indices and must
agree exactly; the test suite runs both.
"""

from __future__ import annotations

import os

import numpy as np

# tile status codes returned by the parsers
OK = 0
TOO_FEW_ZEROS = 1
INVALID = 2
INCOMPLETE = 3
ODD_LEFTOVER = 4

_disabled = os.environ.get("INFSUBST_DISABLE_NUMBA", "").strip().lower() not in ("", "0", "false", "no")

try:
    if _disabled:
        raise ImportError
    from numba import njit
except ImportError:  # pragma: no cover - depends on environment
    njit = None

NUMBA_AVAILABLE = njit is not None


# ---------------------------------------------------------------------------
# expansion: apply the substitution to every letter of a word


def expand_numpy(word: np.ndarray, a: np.ndarray) -> np.ndarray:
    """Image of an isolated-letter word; ``a`` must cover indices ``0..max(word)``."""
    word = np.asarray(word, dtype=np.int64)
    if word.size == 0:
        return np.empty(0, dtype=np.int64)
    zeros = a[word]
    lengths = zeros + 1 + (word >= 1)
    ends = np.cumsum(lengths)
    out = np.zeros(int(ends[-1]), dtype=np.int64)
    out[ends - 1] = word + 1
    has_left = word >= 1
    out[ends[has_left] - 2] = word[has_left] - 1
    return out


def _expand_loop(word, a):
    total = 0
    for c in word:
        total += a[c] + 1
        if c >= 1:
            total += 1
    out = np.zeros(total, dtype=np.int64)
    pos = 0
    for c in word:
        pos += a[c]
        if c >= 1:
            out[pos] = c - 1
            pos += 1
        out[pos] = c + 1
        pos += 1
    return out


# ---------------------------------------------------------------------------
# level-1 parsing of a word treated as complete on both ends
#
# Returns (start, end, preimage, status) arrays, one entry per tile, sorted
# by start.  A word is read as an optional zero-free prefix (paired from its
# right end, an odd leftover letter first) followed by segments that each
# begin with a maximal zero block.


def parse_numpy(word: np.ndarray, a: np.ndarray):
    w = np.asarray(word, dtype=np.int64)
    n = w.size
    if n == 0:
        e = np.empty(0, dtype=np.int64)
        return e, e.copy(), e.copy(), e.copy()
    is_zero = w == 0
    prev_nonzero = np.empty(n, dtype=bool)
    prev_nonzero[0] = True
    prev_nonzero[1:] = ~is_zero[:-1]
    seg_start = np.flatnonzero(is_zero & prev_nonzero)
    nz_pos = np.flatnonzero(~is_zero)

    starts, ends, pres, stats = [], [], [], []

    # zero-free prefix
    plen = int(seg_start[0]) if seg_start.size else n
    if plen:
        odd = plen % 2
        if odd:
            starts.append(np.array([0]))
            ends.append(np.array([1]))
            pres.append(np.array([-1]))
            stats.append(np.array([ODD_LEFTOVER]))
        ps = np.arange(odd, plen, 2)
        pre, st = _pair_status(w, a, ps)
        starts.append(ps)
        ends.append(ps + 2)
        pres.append(pre)
        stats.append(st)

    if seg_start.size:
        seg_end = np.append(seg_start[1:], n)
        if nz_pos.size:
            idx = np.searchsorted(nz_pos, seg_start)
            first_nz = np.where(idx < nz_pos.size, nz_pos[np.minimum(idx, nz_pos.size - 1)], n)
            # a segment without nonzero letters can only sit at the word end
            first_nz = np.minimum(first_nz, seg_end)
        else:
            first_nz = seg_end
        z = first_nz - seg_start
        m = seg_end - first_nz

        incomplete = m == 0
        starts.append(seg_start[incomplete])
        ends.append(seg_end[incomplete])
        pres.append(np.full(int(incomplete.sum()), -1, dtype=np.int64))
        stats.append(np.full(int(incomplete.sum()), INCOMPLETE, dtype=np.int64))

        live = ~incomplete
        s, f, zz, mm = seg_start[live], first_nz[live], z[live], m[live]
        p = 2 - (mm % 2)
        pre, st = _first_tile_status(w, a, f, p, zz)
        starts.append(s)
        ends.append(f + p)
        pres.append(pre)
        stats.append(st)

        q = (mm - p) // 2
        if q.sum():
            base = np.repeat(f + p, q)
            offs = np.arange(int(q.sum())) - np.repeat(np.cumsum(q) - q, q)
            ps = base + 2 * offs
            pre, st = _pair_status(w, a, ps)
            starts.append(ps)
            ends.append(ps + 2)
            pres.append(pre)
            stats.append(st)

    start = np.concatenate(starts).astype(np.int64)
    order = np.argsort(start, kind="stable")
    return (
        start[order],
        np.concatenate(ends).astype(np.int64)[order],
        np.concatenate(pres).astype(np.int64)[order],
        np.concatenate(stats).astype(np.int64)[order],
    )


def _pair_status(w, a, ps):
    x, y = w[ps], w[ps + 1]
    good = (y == x + 2) & (a[x + 1] == 0)
    pre = np.where(good, x + 1, -1)
    return pre, np.where(good, OK, INVALID)


def _first_tile_status(w, a, f, p, z):
    x = w[f]
    y = w[np.minimum(f + 1, w.size - 1)]
    single = p == 1
    pre = np.where(single, np.where(x == 1, 0, np.where(x == 2, 1, -1)), np.where(y == x + 2, x + 1, -1))
    expect = np.where(pre == 0, a[0], np.where(pre == 1, a[1] + 1, a[np.maximum(pre, 0)]))
    status = np.where(z == expect, OK, np.where(z < expect, TOO_FEW_ZEROS, INVALID))
    status = np.where(pre < 0, INVALID, status)
    return np.where(status == INVALID, -1, pre), status


def _parse_loop(w, a):
    n = w.size
    start = np.empty(n, dtype=np.int64)
    end = np.empty(n, dtype=np.int64)
    pre = np.empty(n, dtype=np.int64)
    stat = np.empty(n, dtype=np.int64)
    k = 0
    i = 0
    while i < n and w[i] != 0:
        i += 1
    plen = i
    j = 0
    if plen % 2 == 1:
        start[k], end[k], pre[k], stat[k] = 0, 1, -1, ODD_LEFTOVER
        k += 1
        j = 1
    while j < plen:
        x, y = w[j], w[j + 1]
        start[k], end[k] = j, j + 2
        if y == x + 2 and a[x + 1] == 0:
            pre[k], stat[k] = x + 1, OK
        else:
            pre[k], stat[k] = -1, INVALID
        k += 1
        j += 2
    i = plen
    while i < n:
        s = i
        while i < n and w[i] == 0:
            i += 1
        f = i
        while i < n and w[i] != 0:
            i += 1
        e = i
        z = f - s
        m = e - f
        if m == 0:
            start[k], end[k], pre[k], stat[k] = s, e, -1, INCOMPLETE
            k += 1
            continue
        p = 2 - m % 2
        x = w[f]
        pr = -1
        expect = 0
        if p == 1:
            if x == 1:
                pr = 0
                expect = a[0]
            elif x == 2:
                pr = 1
                expect = a[1] + 1
        else:
            y = w[f + 1]
            if y == x + 2:
                pr = x + 1
                expect = a[pr]
        start[k], end[k] = s, f + p
        if pr < 0 or z > expect:
            pre[k], stat[k] = -1, INVALID
        elif z < expect:
            pre[k], stat[k] = pr, TOO_FEW_ZEROS
        else:
            pre[k], stat[k] = pr, OK
        k += 1
        j = f + p
        while j < e:
            x, y = w[j], w[j + 1]
            start[k], end[k] = j, j + 2
            if y == x + 2 and a[x + 1] == 0:
                pre[k], stat[k] = x + 1, OK
            else:
                pre[k], stat[k] = -1, INVALID
            k += 1
            j += 2
    return start[:k], end[:k], pre[:k], stat[:k]


if NUMBA_AVAILABLE:
    _expand_jit = njit(cache=True)(_expand_loop)
    _parse_jit = njit(cache=True)(_parse_loop)

    def expand_numba(word, a):
        return _expand_jit(np.ascontiguousarray(word, dtype=np.int64), np.ascontiguousarray(a, dtype=np.int64))

    def parse_numba(word, a):
        return _parse_jit(np.ascontiguousarray(word, dtype=np.int64), np.ascontiguousarray(a, dtype=np.int64))

    expand = expand_numba
    parse = parse_numba
else:  # pragma: no cover - depends on environment
    expand_numba = parse_numba = None
    expand = expand_numpy
    parse = parse_numpy

BACKEND = "numba" if NUMBA_AVAILABLE else "numpy"
