"""Command-line interface: ``infsubst <command> [options]``.

Commands: solve, design, generate, decompose, verify, render.  Output is
JSON (or CSV/SVG where noted) on stdout; every real number is printed as a
``[lo, hi]`` pair of decimal strings that encloses the exact value.

Exit codes: 0 ok, 2 invalid sequence or word, 3 precision exhausted,
4 bad argument, 5 failed check.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .algebra import (
    certificate_residual,
    periodic_certificate,
    thue_morse_consistency,
)
from .designer import design_sequence, parse_lambda
from .errors import (
    BudgetExceeded,
    DeloneViolation,
    InternalInconsistency,
    NoConvergence,
    NonConvergent,
    NotLegal,
    PrecisionExhausted,
    UnsupportedLimitLetter,
    ValidationError,
)
from .export import patch_to_csv, patch_to_svg, points_to_svg
from .geometry import (
    delone_bounds,
    delone_lower_bound,
    empirical_frequencies,
    first_column_residual,
    fixed_point_delone,
    frequency_vector,
    left_eigen_residuals,
    max_abs,
    realize,
    right_eigen_residuals,
    solve_mu,
    tile_lengths,
    verify_inflation,
)
from .numerics import CReal, DEFAULT_PRECISION, MAX_PRECISION, working_precision
from .recognize import decompose_levelk
from .sequence import EventuallyPeriodicSequence, ThueMorseSequence, sequence_from_json, validate
from .substitution import supertile, supertile_size

EXIT_OK, EXIT_VALIDATION, EXIT_PRECISION, EXIT_ARGUMENT, EXIT_CHECK = 0, 2, 3, 4, 5
PRECISION_ENV = "INFSUBST_PRECISION"
MIN_PRECISION = 64


class ArgumentError(Exception):
    pass


class CheckFailed(Exception):
    def __init__(self, report):
        super().__init__("one or more checks failed")
        self.report = report


def _default_precision() -> int:
    raw = os.environ.get(PRECISION_ENV)
    if raw is None:
        return DEFAULT_PRECISION
    try:
        return int(raw)
    except ValueError:
        raise ArgumentError(f"{PRECISION_ENV} must be an integer, got {raw!r}") from None


def _load_sequence(text: str):
    path = Path(text)
    if not text.lstrip().startswith(("{", "[")) and path.is_file():
        text = path.read_text()
    try:
        return sequence_from_json(text)
    except (ValueError, KeyError, TypeError) as exc:
        raise ArgumentError(f"cannot read sequence: {exc}") from exc


def _load_word(text: str) -> np.ndarray:
    path = Path(text)
    if path.is_file():
        text = path.read_text()
    text = text.strip()
    try:
        if text.startswith("["):
            values = json.loads(text)
        elif text.startswith("{"):
            values = json.loads(text)["word"]
        else:
            values = [int(t) for t in text.replace(",", " ").split()]
    except (ValueError, KeyError) as exc:
        raise ArgumentError(f"cannot read word: {exc}") from exc
    return np.array(values, dtype=np.int64)


def _pair(x: CReal, digits: int) -> list[str]:
    return list(x.decimal_bounds(digits))


def _header(args) -> dict:
    return {"command": args.command, "precision": args.precision, "seed": args.seed, "version": __version__}


def _emit(args, payload) -> None:
    text = payload if isinstance(payload, str) else json.dumps(payload, indent=2) + "\n"
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# commands


def cmd_solve(args) -> dict:
    seq = _load_sequence(args.seq)
    report = validate(seq)
    digits = args.digits
    data = solve_mu(seq, Fraction(1, 10 ** (digits + 2)))
    ell = tile_lengths(data, args.lengths, Fraction(1, 10 ** (digits + 2)))
    out = _header(args)
    out.update(
        sequence=seq.to_json(),
        validation={"scope": report.scope, "probe_depth": report.probe_depth, "N": report.N, "C": report.C},
        mu=_pair(data.mu, digits),
        **{"lambda": _pair(data.lam, digits)},
        lengths=[_pair(x, digits) for x in ell],
        frequencies=[_pair(x, digits) for x in frequency_vector(data, args.lengths)],
    )
    return out


def cmd_design(args) -> dict:
    try:
        target = parse_lambda(args.lam)
    except ValueError as exc:
        raise ArgumentError(str(exc)) from exc
    if not target.enclosure().lo > 2:
        raise ArgumentError("lambda must be greater than 2")
    seq = design_sequence(target, args.digits)
    params = seq.parameters
    validate(seq)
    data = solve_mu(seq)
    d = args.decimals
    out = _header(args)
    out.update(
        target=target.label,
        sequence=seq.to_json(),
        parameters={
            "lambda_target": _pair(params.lambda_target, d),
            "mu": _pair(params.mu, d),
            "C": params.spike_period_C,
            "digit_cap": params.digit_cap_N,
            "mu_prime": _pair(params.mu_prime, d),
        },
        residual=_pair(seq.residual, d),
        round_trip={"lambda": _pair(data.lam, d), "error": _pair(abs(data.lam - params.lambda_target), d)},
    )
    return out


def cmd_generate(args):
    seq = _load_sequence(args.seq)
    validate(seq)
    word = supertile(seq, args.letter, args.level, args.budget)
    if args.format == "csv":
        data = solve_mu(seq)
        return patch_to_csv(realize(data, word), args.decimals)
    out = _header(args)
    out.update(sequence=seq.to_json(), letter=args.letter, level=args.level, size=int(word.size), word=word.tolist())
    return out


def cmd_decompose(args) -> dict:
    seq = _load_sequence(args.seq)
    validate(seq)
    word = _load_word(args.word)
    dec = decompose_levelk(seq, word, args.level)
    out = _header(args)
    out.update(level=args.level, decomposition=dec.to_json())
    return out


def _check(name, ok, **fields) -> dict:
    return {"check": name, "pass": bool(ok), **fields}


def cmd_verify(args) -> dict:
    seq = _load_sequence(args.seq)
    report = validate(seq)
    d = args.decimals
    data = solve_mu(seq)
    checks = [_check("validate", True, scope=report.scope)]

    left = max_abs(left_eigen_residuals(data, args.M))
    checks.append(_check("left_eigenvector", left.contains_zero() and left.width <= Fraction(1, 10**15), residual=_pair(left, d)))
    first = first_column_residual(data)
    checks.append(_check("left_eigenvector_column0", first.contains_zero(), residual=_pair(first, d)))
    right = max_abs(right_eigen_residuals(data, args.M))
    checks.append(_check("right_eigenvector", right.contains_zero(), residual=_pair(right, d)))

    lo, hi = delone_bounds(data, args.kmax)
    bound = delone_lower_bound(data)
    checks.append(
        _check("delone_bounds", lo.lo >= bound.hi,
               min_length=_pair(lo, d), max_length=_pair(hi, d), lower_bound=_pair(bound, d))
    )

    rng = np.random.default_rng(args.seed)
    big = supertile(seq, 0, _level_with_size(seq, 4 * args.word_length))
    n = min(args.word_length, big.size)
    start = int(rng.integers(0, big.size - n + 1))
    infl = verify_inflation(data, big[start : start + n])
    checks.append(_check("inflation", infl.contains_zero(), residual=_pair(infl, d), word_start=start, word_length=n))

    dset = fixed_point_delone(data, Fraction(args.window))
    defect, tol = dset.containment_defect()
    checks.append(
        _check("fixed_point_delone", defect <= tol, points=len(dset.points), power=dset.power,
               defect=_pair(CReal(defect), d), tolerance=_pair(CReal(tol), d))
    )

    level = _level_with_size(seq, args.budget)
    freq = empirical_frequencies(data, level, args.budget)
    expected = 1 - data.mu
    gap = abs(CReal(freq.get(0, Fraction(0))) - expected)
    checks.append(_check("frequency_of_0", gap.hi <= Fraction(args.freq_tol), level=level,
                         empirical=str(freq.get(0, 0)), expected=_pair(expected, d), gap=_pair(gap, d)))

    if isinstance(seq, EventuallyPeriodicSequence):
        poly = periodic_certificate(seq)
        value = certificate_residual(poly, data)
        checks.append(_check("periodic_certificate", value.contains_zero(), polynomial=poly.to_json(),
                             value=_pair(value, d)))
    if isinstance(seq, ThueMorseSequence):
        r = thue_morse_consistency(data)
        checks.append(_check("thue_morse_identity", r.contains_zero(), residual=_pair(r, d)))

    out = _header(args)
    out.update(sequence=seq.to_json(), mu=_pair(data.mu, d), **{"lambda": _pair(data.lam, d)}, checks=checks,
               all_pass=all(c["pass"] for c in checks))
    if not out["all_pass"]:
        raise CheckFailed(out)
    return out


def _level_with_size(seq, budget: int) -> int:
    """Largest ``k`` with ``|rho^k([0])| <= budget``."""
    k = 0
    while supertile_size(seq, 0, k + 1) <= budget:
        k += 1
    return k


def cmd_render(args) -> str:
    seq = _load_sequence(args.seq)
    validate(seq)
    data = solve_mu(seq)
    if args.window is not None:
        return points_to_svg(fixed_point_delone(data, Fraction(args.window), args.anchor))
    word = supertile(seq, args.letter, args.level, args.budget)
    return patch_to_svg(realize(data, word))


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--precision", type=int, default=None, help=f"working precision in bits (default ${PRECISION_ENV} or {DEFAULT_PRECISION})")
    common.add_argument("--seed", type=int, default=0, help="seed for randomised checks (recorded in the output)")
    common.add_argument("--output", "-o", default=None, help="write to this file instead of stdout")

    seq_opt = argparse.ArgumentParser(add_help=False)
    seq_opt.add_argument("--seq", required=True, help="sequence as inline JSON, a JSON file, or 'thue-morse'")

    parser = argparse.ArgumentParser(prog="infsubst", description="Substitution tilings over an infinite alphabet.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", parents=[common, seq_opt], help="certified mu, lambda, tile lengths, frequencies")
    p.add_argument("--digits", "--decimals", dest="digits", type=int, default=30, help="decimal digits to print")
    p.add_argument("--lengths", type=int, default=10, help="report l([0]) .. l([K])")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("design", parents=[common], help="sequence with a prescribed inflation factor")
    p.add_argument("--lambda", dest="lam", required=True, help="pi, e, sqrt:n, p/q or a decimal")
    p.add_argument("--digits", type=int, default=300, help="number of greedy digits T")
    p.add_argument("--decimals", type=int, default=30)
    p.set_defaults(func=cmd_design)

    p = sub.add_parser("generate", parents=[common, seq_opt], help="level-k supertile word (json) or its patch (csv)")
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--letter", type=int, default=0)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--decimals", type=int, default=30)
    p.add_argument("--budget", type=int, default=10_000_000)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("decompose", parents=[common, seq_opt], help="level-k supertile decomposition of a word")
    p.add_argument("--word", required=True, help="JSON list, whitespace separated letters, or a file holding either")
    p.add_argument("--level", type=int, default=1)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("verify", parents=[common, seq_opt], help="run the invariant checks")
    p.add_argument("--M", type=int, default=200, help="matrix truncation for the eigenvector checks")
    p.add_argument("--kmax", type=int, default=100, help="letters checked against the Delone bound")
    p.add_argument("--window", type=str, default="200")
    p.add_argument("--word-length", type=int, default=1000)
    p.add_argument("--budget", type=int, default=100_000, help="largest supertile used for frequencies")
    p.add_argument("--freq-tol", type=str, default="0.02")
    p.add_argument("--decimals", type=int, default=30)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("render", parents=[common, seq_opt], help="SVG of a supertile patch or a Delone set")
    p.add_argument("--level", type=int, default=4)
    p.add_argument("--letter", type=int, default=0)
    p.add_argument("--window", type=str, default=None, help="render the fixed-point Delone set on [0, W]")
    p.add_argument("--anchor", choices=("interior", "origin"), default="interior")
    p.add_argument("--budget", type=int, default=100_000)
    p.set_defaults(func=cmd_render)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ARGUMENT if exc.code not in (0, None) else EXIT_OK
    try:
        if args.precision is None:
            args.precision = _default_precision()
        if not MIN_PRECISION <= args.precision <= MAX_PRECISION:
            raise ArgumentError(f"precision must lie in [{MIN_PRECISION}, {MAX_PRECISION}]")
        with working_precision(args.precision):
            payload = args.func(args)
        _emit(args, payload)
        return EXIT_OK
    except CheckFailed as exc:
        _emit(args, exc.report)
        return EXIT_CHECK
    except (ValidationError, NotLegal) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (PrecisionExhausted, NonConvergent, NoConvergence) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_PRECISION
    except (ArgumentError, ValueError, UnsupportedLimitLetter, BudgetExceeded) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ARGUMENT
    except (DeloneViolation, InternalInconsistency) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CHECK


if __name__ == "__main__":
    sys.exit(main())
