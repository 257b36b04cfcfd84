import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from infsubst import _kernels
from infsubst.errors import NotLegal
from infsubst.recognize import decompose_level1, decompose_levelk
from infsubst.substitution import apply, apply_word, supertile
from conftest import standard_sequences

SEQS = standard_sequences()


def test_image_of_two_letters(ones):
    d = decompose_level1(ones, [0, 1, 0, 0, 2])
    assert d.preimage.tolist() == [0, 1]
    assert [img.tolist() for _, img in d.supertiles] == [[0, 1], [0, 0, 2]]
    assert not d.has_fragments


@pytest.mark.parametrize("seq", SEQS)
def test_single_image(seq):
    d = decompose_level1(seq, apply(seq, 0))
    assert d.preimage.tolist() == [0] and not d.has_fragments


def test_leading_letter_dropped(ones):
    d = decompose_level1(ones, [1, 0, 0, 2])
    assert d.left_fragment.tolist() == [1]
    assert d.preimage.tolist() == [1] and d.right_fragment.size == 0


def test_to_json(ones):
    d = decompose_level1(ones, [1, 0, 0, 2])
    assert d.to_json() == {"left": [1], "supertiles": [{"preimage": 1, "image": [0, 0, 2]}], "right": []}


def test_levelk_examples(ones):
    d = decompose_levelk(ones, supertile(ones, 0, 2), 2)
    assert d.preimage.tolist() == [0] and not d.has_fragments
    w = apply_word(ones, apply_word(ones, [0, 1]))
    d = decompose_levelk(ones, w, 2)
    assert d.preimage.tolist() == [0, 1] and not d.has_fragments
    w = supertile(ones, 0, 4)
    a, b = decompose_levelk(ones, w, 1), decompose_level1(ones, w)
    assert a.to_json() == b.to_json()
    with pytest.raises(ValueError):
        decompose_levelk(ones, w, 0)


def test_empty_word(ones):
    d = decompose_level1(ones, [])
    assert d.supertiles == [] and not d.has_fragments


def test_not_legal(ones):
    # [3] never follows [3]; the segment cannot be paired into images
    with pytest.raises(NotLegal):
        decompose_level1(ones, [0, 3, 3, 3, 0, 1])
    with pytest.raises(NotLegal):
        decompose_level1(ones, [0, 0, 0, 0, 0, 0, 1])
    with pytest.raises(NotLegal):
        decompose_level1(ones, [0, -1])


@settings(max_examples=100)
@given(st.sampled_from(SEQS), st.integers(0, 10**9), st.integers(1, 200))
def test_round_trip(seq, start, length):
    big = supertile(seq, 0, 6)
    start %= big.size
    w = big[start : start + length]
    d = decompose_level1(seq, apply_word(seq, w))
    assert not d.has_fragments
    assert d.preimage.tolist() == w.tolist()


@settings(max_examples=100)
@given(st.sampled_from(SEQS), st.integers(0, 10**9), st.integers(1, 300), st.integers(1, 3))
def test_concatenation_and_images(seq, start, length, k):
    big = supertile(seq, 0, 8)
    start %= big.size
    w = big[start : start + length]
    d = decompose_levelk(seq, w, k)
    assert d.concatenation().tolist() == w.tolist()
    for (p, img), off in zip(d.supertiles, d.offsets):
        level = np.array([p])
        for _ in range(k):
            level = apply_word(seq, level)
        assert level.tolist() == img.tolist()
        assert w[off : off + img.size].tolist() == img.tolist()


@settings(max_examples=200)
@given(st.sampled_from(SEQS), st.integers(0, 10**9), st.integers(5, 200))
def test_boundaries_agree_under_shift(seq, start, length):
    big = supertile(seq, 0, 7)
    start %= big.size - 1
    w = big[start : start + length]
    d0 = decompose_level1(seq, w)
    d1 = decompose_level1(seq, w[1:])
    # past its first supertile, the shifted parse cuts where the original does
    assert {o + 1 for o in d1.offsets[1:]} <= set(d0.offsets)


@pytest.mark.parametrize("seq", SEQS)
def test_levelk_boundaries_are_supertile_boundaries(seq):
    for k in (2, 3):
        w = supertile(seq, 0, k + 4)
        d = decompose_levelk(seq, w, k)
        assert not d.has_fragments
        assert d.preimage.tolist() == supertile(seq, 0, 4).tolist()


@pytest.mark.parametrize("seq", SEQS)
def test_numpy_parser_gives_same_result(seq):
    w = supertile(seq, 0, 7)[3:500]
    a = decompose_levelk(seq, w, 2)
    b = decompose_levelk(seq, w, 2, parser=_kernels.parse_numpy)
    assert a.to_json() == b.to_json()
