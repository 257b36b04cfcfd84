from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from infsubst.designer import (
    QuadraticNumber,
    choose_parameters,
    design_sequence,
    exact_mu,
    greedy_digits,
    mu_from_lambda,
    parse_lambda,
    residual_bound,
)
from infsubst.geometry import solve_mu
from infsubst.numerics import CReal, working_precision
from infsubst.sequence import validate


def sympy_greedy(lam: Fraction, count: int):
    """Greedy digits with exact sympy arithmetic in Q(sqrt(lam**2 - 4))."""
    lam = sympy.Rational(lam.numerator, lam.denominator)
    mu = (lam - sympy.sqrt(lam**2 - 4)) / 2
    C = 1
    while sympy.simplify(mu + mu**C - 1).is_positive:
        C += 1
    N = sympy.ceiling((1 - mu) / mu) + 1
    target = sympy.nsimplify(1 / mu - 1 / (1 - mu**C))
    digits, S = [], sympy.Integer(0)
    for i in range(count):
        p = sympy.expand(mu**i)
        c = 0
        while c < N and sympy.expand(target - S - (c + 1) * p).is_nonnegative:
            c += 1
        digits.append(c)
        S = sympy.expand(S + c * p)
    return C, int(N), digits


def test_mu_from_lambda():
    assert mu_from_lambda(Fraction(5, 2)).contains(Fraction(1, 2))
    mu = mu_from_lambda(3)
    assert (mu * mu - 3 * mu + 1).contains(0)
    with pytest.raises(ValueError):
        mu_from_lambda(2)


@pytest.mark.parametrize("lam,C,N", [(Fraction(5, 2), 1, 2), (3, 1, 3), (Fraction(41, 20), 8, 2)])
def test_choose_parameters(lam, C, N):
    # 41/20 has mu = 4/5, and 0.8**C <= 0.2 first holds at C = 8
    p = choose_parameters(lam)
    assert (p.spike_period_C, p.digit_cap_N) == (C, N)
    assert (p.mu + p.mu**C).hi <= 1
    assert p.mu_prime.hi >= 0
    # 1/mu <= N / (1 - mu)
    assert (1 / p.mu).hi <= (N / (1 - p.mu)).lo


def test_zero_gap_gives_zero_digits():
    p = choose_parameters(Fraction(5, 2))
    digits, residual = greedy_digits(p, 50)
    assert digits == [0] * 51 and residual == CReal(0)


@pytest.mark.parametrize("lam", [Fraction(3), Fraction(7, 2), Fraction(10, 3), Fraction(21, 10)])
def test_greedy_digits_match_exact_oracle(lam):
    C, N, expected = sympy_greedy(lam, 20)
    with working_precision(256):
        p = choose_parameters(lam)
        digits, _ = greedy_digits(p, 19)
    assert (p.spike_period_C, p.digit_cap_N) == (C, N)
    assert digits == expected


def test_lambda_three_tie_is_resolved_exactly():
    digits, residual = greedy_digits(choose_parameters(3), 30)
    assert digits == [1] + [0] * 30
    assert residual.contains(0)


def test_parse_lambda():
    assert parse_lambda("5/2").exact == Fraction(5, 2)
    assert parse_lambda(2.1).exact == Fraction(21, 10)
    assert parse_lambda("sqrt:9").exact == 3
    assert parse_lambda("sqrt:5").exact is None
    pi = parse_lambda("pi").enclosure()
    assert Fraction(314159, 100000) < pi.lo and pi.hi < Fraction(314160, 100000)
    with pytest.raises(ValueError):
        parse_lambda("banana")


def test_quadratic_number_sign():
    mu = exact_mu(Fraction(3))
    assert (mu * mu - 3 * mu + 1).sign() == 0
    assert (mu - Fraction(2, 5)).sign() == -1
    assert (1 / mu - mu - QuadraticNumber(Fraction(0), Fraction(1), mu.D)).sign() == 0


@pytest.mark.parametrize("lam,T", [(Fraction(5, 2), 50), (3, 200), ("pi", 300)])
def test_design_round_trip(lam, T):
    seq = design_sequence(lam, T)
    validate(seq)
    target = parse_lambda(lam).enclosure()
    d = solve_mu(seq, Fraction(1, 10**25))
    assert abs((d.lam - target).mid) <= Fraction(1, 10**20)


def test_lambda_two_and_a_half_gives_all_ones():
    seq = design_sequence(Fraction(5, 2), 40)
    assert seq.prefix(60).tolist() == [1] * 60


@pytest.mark.parametrize("lam", [3, Fraction(7, 2), "e", "sqrt:5"])
def test_round_trip_contraction(lam):
    errors = []
    for T in (50, 100, 200):
        seq = design_sequence(lam, T)
        p = seq.parameters
        mu, N = p.mu, p.digit_cap_N
        bound = 2 * (N + 1) * mu ** (T + 1) / (1 - mu) * (1 + 1 / mu**2)
        d = solve_mu(seq, bound.lo / 100)
        err = (d.lam - p.lambda_target).mag()
        assert err <= bound.hi
        errors.append(err)
    assert errors[0] > errors[1] > errors[2] or errors[0] == 0


def test_residual_is_monotone_in_T():
    with working_precision(512):
        p = choose_parameters("e")
        highs = [greedy_digits(p, T)[1].hi for T in range(0, 120, 7)]
    assert all(b <= a for a, b in zip(highs, highs[1:]))
    with working_precision(512):
        assert greedy_digits(p, 100)[1].hi <= residual_bound(p, 100).hi


@settings(max_examples=15)
@given(st.fractions(min_value=Fraction(201, 100), max_value=100, max_denominator=1000))
def test_designed_sequences_are_valid(lam):
    seq = design_sequence(lam, 40)
    report = validate(seq)
    assert report.N == seq.parameters.digit_cap_N + 1
    assert report.C == seq.parameters.spike_period_C
