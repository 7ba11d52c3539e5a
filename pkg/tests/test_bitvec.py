import itertools
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from lamp.bitvec import BitVector, orf, sls, vand, vnot, vor, vxor
from lamp.errors import LengthMismatch, ParseError, ZeroLength


def bv(s):
    return BitVector.parse(s)


bit_strings = st.text(alphabet="01", min_size=1, max_size=128)


# --- construction and text form ------------------------------------------


def test_parse_print_round_trip():
    assert bv("110011001100").to01() == "110011001100"
    assert bv("0").to01() == "0"


def test_parse_ignores_underscores():
    assert bv("1100_1100") == bv("11001100")


def test_parse_rejects_bad_chars():
    with pytest.raises(ParseError):
        bv("10x1")


def test_zero_length_rejected():
    with pytest.raises(ZeroLength):
        bv("")
    with pytest.raises(ZeroLength):
        BitVector(0)


def test_coordinates_are_one_based_left_to_right():
    v = bv("100010")
    assert v.bit(1) == 1
    assert v.bit(5) == 1
    assert v.bit(6) == 0
    assert v.bits() == [1, 0, 0, 0, 1, 0]


def test_from_bits():
    assert BitVector.from_bits([1, 0, 1]) == bv("101")


def test_immutable():
    v = bv("101")
    with pytest.raises(AttributeError):
        v.value = 0


# --- the five primitives ---------------------------------------------------


def test_vand_worked_pair():
    # conjunction of the running 12-bit example has ones at 5, 6, 10
    got = vand(bv("110011001100"), bv("000011110101"))
    assert got == bv("000011000100")
    assert got.ones_count() == 3


def test_vand_identity_and_truth_table():
    v = bv("101101")
    assert vand(v, BitVector.ones(6)) == v
    assert vand(bv("101"), bv("011")) == bv("001")


def test_vxor_worked_pair_has_six_ones():
    assert vxor(bv("110011001100"), bv("000011110101")).ones_count() == 6


def test_vxor_self_is_zero():
    v = bv("110101")
    assert vxor(v, v) == BitVector.zeros(6)


def test_vnot_involution():
    v = bv("100110")
    assert vnot(vnot(v)) == v


def test_vor():
    assert vor(bv("1010"), bv("0110")) == bv("1110")


def test_sls_worked_quality_vector():
    q = vxor(bv("110011001100"), bv("000011110101"))
    assert sls(q) == bv("111111000000")


def test_sls_trivial_cases():
    assert sls(bv("000000")) == bv("000000")
    assert sls(bv("010101")) == bv("111000")


def test_orf():
    assert orf(bv("000000")) == 0
    assert orf(bv("000100")) == 1
    v = bv("10110")
    assert orf(vxor(v, v)) == 0


def test_length_mismatch():
    for op in (vand, vor, vxor):
        with pytest.raises(LengthMismatch):
            op(bv("10"), bv("100"))


def test_padding_never_leaks():
    # complement of widths that straddle byte/word boundaries stays masked
    for n in (1, 7, 8, 9, 63, 64, 65):
        v = BitVector.zeros(n)
        assert vnot(v) == BitVector.ones(n)
        assert vnot(v).value < (1 << n)


# --- properties -------------------------------------------------------------


@given(bit_strings)
def test_sls_idempotent_and_prefix(s):
    v = bv(s)
    c = sls(v)
    assert sls(c) == c
    assert c.is_prefix()
    assert "01" not in c.to01()  # no 0 before a 1


@given(bit_strings)
def test_sls_conserves_ones(s):
    v = bv(s)
    assert sls(v).ones_count() == v.ones_count()


def test_de_morgan_exhaustive_small():
    for n in range(1, 5):
        for a_bits in itertools.product("01", repeat=n):
            for b_bits in itertools.product("01", repeat=n):
                a, b = bv("".join(a_bits)), bv("".join(b_bits))
                assert vnot(vand(a, b)) == vor(vnot(a), vnot(b))


def test_de_morgan_randomized_large():
    rng = random.Random(7)
    for n in (257, 1024, 4096):
        a = BitVector(n, rng.getrandbits(n))
        b = BitVector(n, rng.getrandbits(n))
        assert vnot(vand(a, b)) == vor(vnot(a), vnot(b))


@given(bit_strings)
def test_orf_zero_iff_all_zeros(s):
    v = bv(s)
    assert (orf(v) == 0) == (v == BitVector.zeros(v.n))
