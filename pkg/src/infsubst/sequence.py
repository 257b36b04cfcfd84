"""Coefficient sequences and the admissibility checks A1-A3.

A coefficient sequence ``a = (a_0, a_1, ...)`` of non-negative integers
drives the substitution.  It is admissible when

* A1: ``0 <= a_i <= N`` for a declared bound ``N``;
* A2: ``a_0 != 0``;
* A3: every run of consecutive zeros has length ``< C``.

For eventually periodic and Thue-Morse sequences a finite check is a
proof; for explicit and designed sequences the report only vouches for
the probed window (designed sequences are correct by construction).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import ViolatesA1, ViolatesA2, ViolatesA3


def thue_morse_coefficient(n: int) -> int:
    """``(3 + t_n) / 2`` with ``t_n = (-1)**s2(n)``: 2 for evil n, 1 for odious n."""
    if n < 0:
        raise ValueError("index must be non-negative")
    return 2 if bin(n).count("1") % 2 == 0 else 1


class CoefficientSequence:
    """Base class.  Subclasses provide ``__getitem__`` and ``prefix``."""

    kind: str = "abstract"
    #: a finite probe proves A1-A3 for all indices
    structural: bool = False
    N: int
    C: int

    def __getitem__(self, i: int) -> int:
        raise NotImplementedError

    def __call__(self, i: int) -> int:
        return self[i]

    def prefix(self, n: int) -> np.ndarray:
        """``a_0 .. a_{n-1}`` as an int64 array."""
        return np.fromiter((self[i] for i in range(n)), dtype=np.int64, count=n)

    @property
    def supports_limit_letters(self) -> bool:
        return False

    def to_json(self) -> dict:
        raise NotImplementedError

    def __repr__(self) -> str:
        return f"{type(self).__name__}({json.dumps(self.to_json())})"


class ExplicitSequence(CoefficientSequence):
    """A sequence given by a finite list followed by a constant ``fill``, or by a callable."""

    kind = "explicit"

    def __init__(self, values: Sequence[int] | Callable[[int], int], N: int, C: int, fill: int = 1):
        if N < 1 or C < 1:
            raise ValueError("N and C must be positive")
        self.N, self.C = int(N), int(C)
        self.fill = int(fill)
        if callable(values):
            self._func = values
            self.values = None
        else:
            self.values = tuple(int(v) for v in values)
            self._func = None

    def __getitem__(self, i: int) -> int:
        if i < 0:
            raise IndexError(i)
        if self._func is not None:
            return int(self._func(i))
        return self.values[i] if i < len(self.values) else self.fill

    def prefix(self, n: int) -> np.ndarray:
        if self._func is not None:
            return super().prefix(n)
        out = np.full(n, self.fill, dtype=np.int64)
        m = min(n, len(self.values))
        out[:m] = self.values[:m]
        return out

    def to_json(self) -> dict:
        if self.values is None:
            raise ValueError("callable-backed sequences cannot be serialized")
        return {"kind": "explicit", "values": list(self.values), "fill": self.fill, "N": self.N, "C": self.C}


def _minimal_period(block: tuple[int, ...]) -> tuple[int, ...]:
    k = len(block)
    for p in range(1, k + 1):
        if k % p == 0 and block == block[:p] * (k // p):
            return block[:p]
    return block


class EventuallyPeriodicSequence(CoefficientSequence):
    """``pre`` followed by ``period`` repeated forever, kept in canonical form.

    The presentation is normalised to the shortest period and then the
    shortest preperiod, so equal sequences compare equal.  ``N`` and ``C``
    default to the exact values read off the presentation.
    """

    kind = "eventually-periodic"
    structural = True

    def __init__(self, pre: Sequence[int], period: Sequence[int], N: int | None = None, C: int | None = None):
        pre = tuple(int(v) for v in pre)
        period = tuple(int(v) for v in period)
        if not period:
            raise ValueError("period must be non-empty")
        period = _minimal_period(period)
        while pre and pre[-1] == period[-1]:
            period = (period[-1],) + period[:-1]
            pre = pre[:-1]
        self.pre, self.period = pre, period
        window = pre + period * 2
        self.N = max(window) if N is None else int(N)
        self.C = _longest_zero_run(window) + 1 if C is None else int(C)
        if self.N < 1 or self.C < 1:
            raise ValueError("N and C must be positive")

    @property
    def preperiod(self) -> int:
        return len(self.pre)

    @property
    def supports_limit_letters(self) -> bool:
        return True

    def __getitem__(self, i: int) -> int:
        if i < 0:
            raise IndexError(i)
        j = len(self.pre)
        return self.pre[i] if i < j else self.period[(i - j) % len(self.period)]

    def prefix(self, n: int) -> np.ndarray:
        out = np.empty(n, dtype=np.int64)
        j = min(n, len(self.pre))
        out[:j] = self.pre[:j]
        if n > j:
            out[j:] = np.resize(np.array(self.period, dtype=np.int64), n - j)
        return out

    def __eq__(self, other):
        return (
            isinstance(other, EventuallyPeriodicSequence)
            and (self.pre, self.period, self.N, self.C) == (other.pre, other.period, other.N, other.C)
        )

    def __hash__(self):
        return hash((self.pre, self.period, self.N, self.C))

    def to_json(self) -> dict:
        kind = "periodic" if not self.pre else "eventually-periodic"
        return {"kind": kind, "pre": list(self.pre), "period": list(self.period), "N": self.N, "C": self.C}


class ThueMorseSequence(CoefficientSequence):
    """``a_n = (3 + t_n) / 2`` over the Thue-Morse signs ``t_n``; values in {1, 2}."""

    kind = "thue-morse"
    structural = True
    N = 2
    C = 1

    def __getitem__(self, i: int) -> int:
        return thue_morse_coefficient(i)

    def prefix(self, n: int) -> np.ndarray:
        parity = np.bitwise_count(np.arange(n, dtype=np.uint64)) & 1
        return (2 - parity).astype(np.int64)

    def __eq__(self, other):
        return isinstance(other, ThueMorseSequence)

    def __hash__(self):
        return hash("thue-morse")

    def to_json(self) -> dict:
        return {"kind": "thue-morse"}


class DesignedSequence(CoefficientSequence):
    """``a_i = [C divides i] + c_i`` with greedy digits ``c_0..c_T`` and ``c_i = 0`` beyond."""

    kind = "designed"
    #: set by the designer: truncation residual and the parameters used
    residual = None
    parameters = None

    def __init__(self, spike_period: int, digits: Sequence[int], digit_cap: int):
        if spike_period < 1 or digit_cap < 1:
            raise ValueError("spike period and digit cap must be positive")
        self.spike_period = int(spike_period)
        self.digits = tuple(int(d) for d in digits)
        self.digit_cap = int(digit_cap)
        if any(d < 0 or d > self.digit_cap for d in self.digits):
            raise ValueError("digit outside [0, digit_cap]")
        self.N = self.digit_cap + 1
        self.C = self.spike_period

    def __getitem__(self, i: int) -> int:
        if i < 0:
            raise IndexError(i)
        spike = 1 if i % self.spike_period == 0 else 0
        return spike + (self.digits[i] if i < len(self.digits) else 0)

    def prefix(self, n: int) -> np.ndarray:
        out = (np.arange(n) % self.spike_period == 0).astype(np.int64)
        m = min(n, len(self.digits))
        out[:m] += np.array(self.digits[:m], dtype=np.int64)
        return out

    def to_json(self) -> dict:
        return {
            "kind": "designed",
            "C": self.spike_period,
            "digit_cap": self.digit_cap,
            "digits": list(self.digits),
            "N": self.N,
        }


def _longest_zero_run(values) -> int:
    best = run = 0
    for v in values:
        run = run + 1 if v == 0 else 0
        best = max(best, run)
    return best


@dataclass(frozen=True)
class ValidationReport:
    probe_depth: int
    N: int
    C: int
    #: True when the finite probe proves A1-A3 for every index
    proven: bool

    @property
    def scope(self) -> str:
        return "proven" if self.proven else "window-verified only"


def validate(seq: CoefficientSequence, probe_depth: int | None = None) -> ValidationReport:
    """Check A1-A3 on ``a_0 .. a_probe_depth``; raise ``ViolatesA*`` with the witnessing index."""
    if probe_depth is None:
        probe_depth = 10 * (seq.C + 1)
    if probe_depth < seq.C + 1:
        raise ValueError("probe depth must be at least C + 1")
    depth = probe_depth
    if isinstance(seq, EventuallyPeriodicSequence):
        # two full periods past the preperiod cover every wrap-around zero run
        depth = max(depth, seq.preperiod + 2 * len(seq.period) + seq.C)
    values = seq.prefix(depth + 1)
    bad = np.flatnonzero((values < 0) | (values > seq.N))
    if bad.size:
        raise ViolatesA1(int(bad[0]), f"a_i = {int(values[bad[0]])} not in [0, {seq.N}]")
    if values[0] == 0:
        raise ViolatesA2(0, "a_0 = 0")
    run = 0
    for i, v in enumerate(values.tolist()):
        run = run + 1 if v == 0 else 0
        if run >= seq.C:
            raise ViolatesA3(i - run + 1, f"run of {run} zeros is not shorter than C = {seq.C}")
    return ValidationReport(probe_depth=depth, N=seq.N, C=seq.C, proven=seq.structural)


# ---------------------------------------------------------------------------
# JSON

_KINDS = {
    "explicit": "explicit",
    "periodic": "eventually-periodic",
    "eventuallyperiodic": "eventually-periodic",
    "thuemorse": "thue-morse",
    "designed": "designed",
}


def sequence_from_json(spec) -> CoefficientSequence:
    """Build a sequence from a dict, a JSON string, or the shorthand ``"thue-morse"``."""
    if isinstance(spec, str):
        text = spec.strip()
        if text.lower().replace("-", "").replace("_", "") == "thuemorse":
            return ThueMorseSequence()
        spec = json.loads(text)
    raw_kind = str(spec.get("kind", "")).lower().replace("-", "").replace("_", "")
    kind = _KINDS.get(raw_kind)
    if kind is None:
        raise ValueError(f"unknown sequence kind {spec.get('kind')!r}")
    if kind == "thue-morse":
        return ThueMorseSequence()
    if kind == "explicit":
        return ExplicitSequence(spec["values"], N=spec["N"], C=spec["C"], fill=spec.get("fill", 1))
    if kind == "designed":
        digit_cap = spec.get("digit_cap", spec["N"] - 1 if "N" in spec else None)
        return DesignedSequence(spec["C"], spec.get("digits", []), digit_cap)
    if "pre" in spec:
        pre = spec["pre"]
    elif "values" in spec:
        pre = spec["values"][: spec.get("preperiod", len(spec["values"]))]
    else:
        pre = []
    return EventuallyPeriodicSequence(pre, spec["period"], N=spec.get("N"), C=spec.get("C"))
