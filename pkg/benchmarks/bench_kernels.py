"""Compare the numba and numpy kernels for word expansion and parsing.

    python3 benchmarks/bench_kernels.py --level 14 --repeat 5
"""

import argparse
import timeit

import numpy as np

from infsubst import _kernels
from infsubst.sequence import EventuallyPeriodicSequence, ThueMorseSequence
from infsubst.substitution import supertile

SEQUENCES = {
    "ones": EventuallyPeriodicSequence([], [1]),
    "thue-morse": ThueMorseSequence(),
    "zeros": EventuallyPeriodicSequence([3], [0, 1]),
}


def best_of(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--level", type=int, default=13)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    if not _kernels.NUMBA_AVAILABLE:
        print("numba is not available (or disabled); only the numpy kernels run")
    print(f"{'sequence':<12} {'kernel':<7} {'letters':>9} {'numpy ms':>10} {'numba ms':>10} {'speedup':>8}")
    for name, seq in SEQUENCES.items():
        word = supertile(seq, 0, args.level)
        a = seq.prefix(int(word.max()) + 3)
        image = _kernels.expand_numpy(word, a)
        cases = [
            ("expand", word, _kernels.expand_numpy, getattr(_kernels, "expand_numba", None)),
            ("parse", image, _kernels.parse_numpy, getattr(_kernels, "parse_numba", None)),
        ]
        for kernel, w, slow, fast in cases:
            t_np = best_of(lambda: slow(w, a), args.repeat)
            if fast is not None and _kernels.NUMBA_AVAILABLE:
                fast(w[:10], a)  # compile outside the timing
                t_nb = best_of(lambda: fast(w, a), args.repeat)
                speed = f"{t_np / t_nb:7.1f}x"
                nb = f"{t_nb * 1e3:10.2f}"
            else:
                speed, nb = "      -", "         -"
            print(f"{name:<12} {kernel:<7} {w.size:>9} {t_np * 1e3:10.2f} {nb} {speed}")


if __name__ == "__main__":
    main()
