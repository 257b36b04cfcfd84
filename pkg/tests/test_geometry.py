from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from infsubst.errors import UnsupportedLimitLetter
from infsubst.geometry import (
    InflationData,
    continuity_bound,
    delone_bounds,
    delone_lower_bound,
    empirical_frequencies,
    first_column_residual,
    fixed_point_delone,
    frequency_tail,
    frequency_vector,
    left_eigen_residuals,
    max_abs,
    realize,
    right_eigen_residuals,
    solve_mu,
    tile_length,
    tile_lengths,
    verify_inflation,
)
from infsubst.numerics import CReal, working_precision
from infsubst.sequence import EventuallyPeriodicSequence, ThueMorseSequence
from infsubst.substitution import apply, supertile, supertile_size
from conftest import standard_sequences

TM_MU = "0.37534440496235966210528475504750745023954773003931"
TM_LAMBDA = "3.03956421689823262109360632656259587060256851262876"


def tm_oracle(dps=70):
    """Root of x * sum a_n x**n = 1 by mpmath, with the series cut where x**n < 10**-dps."""
    from infsubst.sequence import thue_morse_coefficient

    with mpmath.workdps(dps):
        a = [thue_morse_coefficient(n) for n in range(int(dps * 2.5))]
        mu = mpmath.findroot(lambda x: x * mpmath.polyval(a[::-1], x) - 1, mpmath.mpf("0.375"))
        return mpmath.nstr(mu, 50, strip_zeros=False), mpmath.nstr(mu + 1 / mu, 51, strip_zeros=False)


def periodic_oracle(pre, period, dps=50):
    k = len(period)
    with mpmath.workdps(dps):

        def f(x):
            s = sum(c * x**i for i, c in enumerate(pre))
            s += sum(c * x ** (len(pre) + i) for i, c in enumerate(period)) / (1 - x**k)
            return x * s - 1

        return mpmath.findroot(f, (mpmath.mpf("1e-9"), mpmath.mpf(1) - mpmath.mpf("1e-9")), solver="anderson")


def encloses(x: CReal, value) -> bool:
    with mpmath.workdps(60):
        v = mpmath.mpf(value)
        lo = mpmath.mpf(x.lo.numerator) / x.lo.denominator
        hi = mpmath.mpf(x.hi.numerator) / x.hi.denominator
        slack = mpmath.mpf(10) ** -49
        return lo - slack <= v <= hi + slack


def test_solve_mu_closed_forms(ones, two_ones):
    d = solve_mu(ones)
    assert d.mu.contains(Fraction(1, 2)) and d.lam.contains(Fraction(5, 2))
    d = solve_mu(two_ones)
    assert d.lam.contains(3) and d.lam.width <= Fraction(1, 10**30)
    assert (d.mu * d.mu - 3 * d.mu + 1).contains(0)


def test_thue_morse_constants_match_oracle():
    mu, lam = tm_oracle()
    assert mu == TM_MU and lam.startswith(TM_LAMBDA)


def test_thue_morse_constants_reproduced():
    d = solve_mu(ThueMorseSequence(), Fraction(1, 10**55), precision=512)
    assert d.mu.decimal_bounds(50)[0].startswith(TM_MU[:50])
    assert encloses(d.mu, TM_MU) and encloses(d.lam, TM_LAMBDA)


pre_st = st.lists(st.integers(0, 4), max_size=4)
period_st = st.lists(st.integers(0, 4), min_size=1, max_size=4).filter(any)


@given(st.integers(1, 4), pre_st, period_st)
def test_mu_enclosure_contains_oracle(a0, pre, period):
    seq = EventuallyPeriodicSequence([a0] + pre, period)
    d = solve_mu(seq)
    assert d.mu.width <= Fraction(1, 10**30)
    assert encloses(d.mu, periodic_oracle([a0] + pre, period))


def test_inflation_data_checks(ones):
    with pytest.raises(ValueError):
        InflationData(CReal(Fraction(1, 3)), CReal(Fraction(10, 3)), ones)
    with pytest.raises(ValueError):
        InflationData(CReal(Fraction(1, 2)), CReal(3), ones)
    InflationData(CReal(Fraction(1, 2)), CReal(Fraction(5, 2)), ones)


def test_tile_length_examples(ones, two_ones):
    d = solve_mu(ones)
    assert tile_length(d, 0) == CReal(1)
    assert tile_length(d, 1).contains(Fraction(3, 2))
    d = solve_mu(two_ones)
    for k, x in enumerate(tile_lengths(d, 50)):
        assert x.contains(1) and x.width <= Fraction(1, 10**20), k


def test_lengths_of_ones_closed_form(ones):
    # the recursion gives l([k]) = 2 - 2**-k for a = (1, 1, ...)
    d = solve_mu(ones)
    for k, x in enumerate(tile_lengths(d, 60)):
        assert x.contains(2 - Fraction(1, 2**k))


def test_length_widths_at_large_k(thue_morse):
    d = solve_mu(thue_morse)
    ell = tile_lengths(d, 200)
    assert all(x.lo > 0 and x.width <= Fraction(1, 10**20) for x in ell)


def test_frequency_vector(ones, two_ones):
    d = solve_mu(ones)
    f = frequency_vector(d, 30)
    assert f[0].contains(Fraction(1, 2))
    total = sum(f[1:], f[0]) + frequency_tail(d, 30)
    assert total.contains(1)
    d = solve_mu(two_ones)
    mu = (3 - CReal(5).sqrt()) / 2
    assert frequency_vector(d, 1)[1].intersects((1 - mu) * mu)


def test_empirical_frequency_examples(ones):
    d = solve_mu(ones)
    assert empirical_frequencies(d, 3)[0] == Fraction(1, 2)
    assert empirical_frequencies(d, 0) == {0: 1}
    assert abs(empirical_frequencies(d, 10)[0] - Fraction(1, 2)) <= Fraction(5, 100)


@pytest.mark.parametrize("seq", standard_sequences())
def test_frequency_error_decreases(seq):
    # the per-letter error may oscillate with k; the l1 distance over letters decreases
    d = solve_mu(seq)
    errors = []
    k = 5
    while supertile_size(seq, 0, k) <= 500_000:
        emp = empirical_frequencies(d, k)
        exp = frequency_vector(d, k + 1)
        errors.append(sum(abs(float(emp.get(i, 0)) - float(exp[i].mid)) for i in range(k + 2)))
        k += 1
    assert len(errors) >= 4
    assert all(b < a for a, b in zip(errors[2:], errors[3:]))


@pytest.mark.parametrize("seq", standard_sequences())
def test_left_eigenvector(seq):
    d = solve_mu(seq)
    r = max_abs(left_eigen_residuals(d, 60))
    assert r.contains(0) and r.width <= Fraction(1, 10**15)
    assert first_column_residual(d).contains(0)


@pytest.mark.parametrize("seq", standard_sequences())
def test_right_eigenvector(seq):
    d = solve_mu(seq)
    assert all(r.contains(0) for r in right_eigen_residuals(d, 200))


def test_right_residual_detects_wrong_lambda(ones):
    d = solve_mu(ones)
    bad = InflationData(d.mu, d.lam, ones)
    object.__setattr__(bad, "lam", d.lam + Fraction(1, 10**10))
    assert not max_abs(right_eigen_residuals(bad, 5)).contains(0)


def _agreeing_radius(a, k, m, cap):
    n = 0
    while n < cap and k - n - 1 >= 0 and a[k - n - 1] == a[m - n - 1] and a[k + n + 1] == a[m + n + 1]:
        n += 1
    return n


@settings(max_examples=40)
@given(st.integers(0, 150), st.integers(1, 150))
def test_modulus_of_continuity(k, t):
    seq = ThueMorseSequence()
    d = solve_mu(seq)
    a = seq.prefix(500)
    if a[k] != a[k + t]:
        n = 0
    else:
        n = _agreeing_radius(a, k, k + t, 40)
    ell = tile_lengths(d, k + t)
    diff = (ell[k] - ell[k + t]).mig()
    assert diff <= continuity_bound(d, n).hi


def test_realize_examples(ones, two_ones):
    d = solve_mu(two_ones)
    patch = realize(d, apply(two_ones, 0))
    assert [p.contains(i) for i, p in enumerate(patch.positions())] == [True] * 3
    single = realize(d, [0])
    assert len(single.tiles) == 1 and single.tiles[0].position == CReal(0) and single.tiles[0].length == CReal(1)
    d = solve_mu(ones)
    patch = realize(d, [0, 1])
    assert patch.positions()[1].contains(1)
    assert patch.span.contains(Fraction(5, 2)) and patch.span.intersects(d.lam)
    with pytest.raises(UnsupportedLimitLetter):
        realize(d, [0, -1])


def test_patch_positions_are_contiguous(thue_morse):
    d = solve_mu(thue_morse)
    patch = realize(d, supertile(thue_morse, 0, 5), anchor=Fraction(1, 3))
    for s, t in zip(patch.tiles, patch.tiles[1:]):
        assert t.position.intersects(s.position + s.length)
        assert s.length.lo > 0


def test_verify_inflation_examples(ones, two_ones):
    for seq, word in ((two_ones, [0]), (two_ones, [0, 1, 2]), (ones, supertile(ones, 0, 2))):
        r = verify_inflation(solve_mu(seq), word)
        assert r.contains(0) and r.width <= Fraction(1, 10**15)


@settings(max_examples=25)
@given(st.sampled_from(standard_sequences()), st.integers(0, 10**6), st.integers(1, 1000))
def test_verify_inflation_on_random_legal_words(seq, start, length):
    d = solve_mu(seq)
    big = supertile(seq, 0, 9)
    start %= big.size
    word = big[start : start + length]
    assert verify_inflation(d, word).contains(0)


def test_delone_bounds_examples(ones, two_ones):
    lo, hi = delone_bounds(solve_mu(two_ones), 50)
    assert lo.contains(1) and hi.contains(1)
    d = solve_mu(ones)
    lo, _ = delone_bounds(d, 50)
    assert lo.lo >= Fraction(1, 4) and delone_lower_bound(d).contains(Fraction(1, 4))
    assert delone_bounds(d, 0) == (CReal(1), CReal(1))


@pytest.mark.parametrize("seq", standard_sequences())
def test_delone_lower_bound_holds(seq):
    d = solve_mu(seq)
    lo, _ = delone_bounds(d, 100)
    assert lo.lo >= delone_lower_bound(d).hi


def test_fixed_point_delone_integer_case(two_ones):
    pts = fixed_point_delone(solve_mu(two_ones), 10)
    assert len(pts.points) == 11
    assert all(p.contains(i) for i, p in enumerate(pts.points))
    assert pts.power == 1 and pts.is_inflation_invariant()


def test_fixed_point_delone_small_window(ones):
    assert len(fixed_point_delone(solve_mu(ones), Fraction(1, 2)).points) <= 2


@pytest.mark.parametrize("anchor", ["origin", "interior"])
def test_fixed_point_delone_invariance(ones, anchor):
    pts = fixed_point_delone(solve_mu(ones), 20, anchor=anchor)
    assert pts.power == 2
    worst, tol = pts.containment_defect()
    assert worst <= tol


def test_interior_anchor_is_two_sided(ones):
    d = solve_mu(ones)
    pts = fixed_point_delone(d, 20, anchor="interior")
    assert pts.points[0].lo >= 0
    with pytest.raises(ValueError):
        fixed_point_delone(d, 20, anchor="middle")
    with pytest.raises(ValueError):
        fixed_point_delone(d, 0)


def test_precision_refinement_nests(thue_morse):
    with working_precision(256):
        coarse = solve_mu(thue_morse, Fraction(1, 10**40))
    with working_precision(512):
        fine = solve_mu(thue_morse, Fraction(1, 10**80))
    assert coarse.mu.lo <= fine.mu.lo and fine.mu.hi <= coarse.mu.hi
