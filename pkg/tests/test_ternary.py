"""Ternary domain: levels, inverters, reference cells, words, reduction plan."""

import itertools

import pytest
from hypothesis import given, strategies as st

from tritcell import ternary
from tritcell.ternary import (
    IndeterminateLevel,
    VoltageLevelMap,
    balanced_to_int,
    int_to_balanced,
    int_to_word,
    max_unsigned,
    multiply_words_behavioral,
    noise_margin,
    nti,
    plan_reduction,
    pti,
    stb,
    sti,
    str_to_word,
    tfa_ref,
    tha_ref,
    tmul_ref,
    trit_to_voltage,
    voltage_to_trit,
    word_to_int,
    word_to_str,
)

# ---------------------------------------------------------------------------
# Frozen range table: unsigned capacity per digit count, binary vs ternary.
# ---------------------------------------------------------------------------

_RANGE_TABLE = [
    (1, 1, 2),
    (2, 3, 8),
    (4, 15, 80),
    (8, 255, 6560),
    (16, 65535, 43046720),
    (32, 4294967295, 1853020188851840),
    (64, 18446744073709551615, 3433683820292512484657849089280),
]


@pytest.mark.parametrize("digits, binary, base3", _RANGE_TABLE)
def test_max_unsigned_table(digits, binary, base3):
    assert max_unsigned(2, digits) == binary
    assert max_unsigned(3, digits) == base3


# Frozen noise-margin table: binary margin vdd/2, ternary margin vdd/4.
_MARGIN_TABLE = [
    (3.0, 1.5, 0.75),
    (1.8, 0.9, 0.45),
    (1.2, 0.6, 0.3),
    (0.9, 0.45, 0.225),
    (0.75, 0.375, 0.1875),
]


@pytest.mark.parametrize("vdd, m2, m3", _MARGIN_TABLE)
def test_noise_margin_table(vdd, m2, m3):
    assert noise_margin(2, vdd) == pytest.approx(m2, rel=1e-12)
    assert noise_margin(3, vdd) == pytest.approx(m3, rel=1e-12)


@given(st.floats(min_value=0.1, max_value=5.0), st.integers(min_value=2, max_value=10))
def test_noise_margin_decreases_with_radix(vdd, radix):
    assert noise_margin(radix + 1, vdd) < noise_margin(radix, vdd)
    assert noise_margin(3, vdd) == pytest.approx(noise_margin(2, vdd) / 2, rel=1e-12)


# ---------------------------------------------------------------------------
# Voltage level map
# ---------------------------------------------------------------------------


def test_level_map_levels():
    lm = VoltageLevelMap.for_vdd(0.9)
    assert lm.levels() == (0.0, 0.45, 0.9)
    assert trit_to_voltage(1, lm) == 0.45


def test_level_map_band_roundtrip():
    lm = VoltageLevelMap.for_vdd(0.9)
    assert voltage_to_trit(0.02, lm) == 0
    assert voltage_to_trit(0.47, lm) == 1
    assert voltage_to_trit(0.88, lm) == 2


def test_level_map_indeterminate():
    lm = VoltageLevelMap.for_vdd(0.9)
    with pytest.raises(IndeterminateLevel) as err:
        voltage_to_trit(0.2, lm)
    assert err.value.voltage == pytest.approx(0.2)


def test_level_map_band_invariant():
    with pytest.raises(ValueError):
        VoltageLevelMap(vdd=0.9, tolerance_band=0.9 / 4)
    with pytest.raises(ValueError):
        VoltageLevelMap(vdd=0.9, tolerance_band=0.0)


@given(st.sampled_from((0, 1, 2)), st.floats(min_value=0.3, max_value=3.0))
def test_level_roundtrip(t, vdd):
    lm = VoltageLevelMap.for_vdd(vdd)
    assert voltage_to_trit(trit_to_voltage(t, lm), lm) == t


# ---------------------------------------------------------------------------
# Inverters and reference cells
# ---------------------------------------------------------------------------


def test_inverter_truth_tables():
    assert tuple(nti(t) for t in (0, 1, 2)) == (2, 0, 0)
    assert tuple(pti(t) for t in (0, 1, 2)) == (2, 2, 0)
    assert tuple(sti(t) for t in (0, 1, 2)) == (2, 1, 0)
    assert tuple(stb(t) for t in (0, 1, 2)) == (0, 1, 2)


def test_half_adder_reference():
    # carry-first pairs for all nine combinations
    expect = {
        (0, 0): (0, 0), (0, 1): (0, 1), (0, 2): (0, 2),
        (1, 0): (0, 1), (1, 1): (0, 2), (1, 2): (1, 0),
        (2, 0): (0, 2), (2, 1): (1, 0), (2, 2): (1, 1),
    }
    for (a, b), cs in expect.items():
        assert tha_ref(a, b) == cs


def test_multiplier_reference():
    expect = {
        (0, 0): (0, 0), (0, 1): (0, 0), (0, 2): (0, 0),
        (1, 0): (0, 0), (1, 1): (0, 1), (1, 2): (0, 2),
        (2, 0): (0, 0), (2, 1): (0, 2), (2, 2): (1, 1),
    }
    for (a, b), cp in expect.items():
        assert tmul_ref(a, b) == cp


def test_full_adder_reference():
    for a, b, c in itertools.product((0, 1, 2), repeat=3):
        carry, s = tfa_ref(a, b, c)
        assert 3 * carry + s == a + b + c
        assert carry in (0, 1, 2)  # 2+2+2 genuinely carries 2
    assert tfa_ref(2, 2, 2) == (2, 0)


def test_precharge_rationale_counts():
    # The half-adder carry rests at '0' for most inputs; the multiplier
    # carry is nonzero only for 2*2.
    tha_zero = sum(tha_ref(a, b)[0] == 0 for a, b in itertools.product((0, 1, 2), repeat=2))
    tmul_nonzero = sum(
        tmul_ref(a, b)[0] != 0 for a, b in itertools.product((0, 1, 2), repeat=2)
    )
    assert tha_zero == 6
    assert tmul_nonzero == 1


@given(st.integers(0, 2), st.integers(0, 2))
def test_references_are_divmod(a, b):
    assert tha_ref(a, b) == divmod(a + b, 3)
    assert tmul_ref(a, b) == divmod(a * b, 3)


# ---------------------------------------------------------------------------
# Words
# ---------------------------------------------------------------------------


def test_word_msb_first():
    assert int_to_word(5, 3) == (0, 1, 2)
    assert word_to_int((0, 1, 2)) == 5
    assert word_to_str((2, 2, 2, 1)) == "2221"
    assert str_to_word("2221") == (2, 2, 2, 1)


def test_word_range_errors():
    with pytest.raises(ValueError):
        int_to_word(81, 4)  # needs 5 digits
    with pytest.raises(ValueError):
        int_to_word(-1, 4)
    with pytest.raises(ValueError):
        str_to_word("21x")


@given(st.integers(min_value=0, max_value=3**12 - 1))
def test_word_roundtrip(n):
    assert word_to_int(int_to_word(n, 12)) == n


@given(st.integers(min_value=-(3**8), max_value=3**8))
def test_balanced_roundtrip(n):
    assert balanced_to_int(int_to_balanced(n)) == n


def test_balanced_spot():
    assert balanced_to_int((1, -1, -1)) == 5
    assert int_to_balanced(5) == (1, -1, -1)
    assert int_to_balanced(0) == (0,)
    assert all(d in (-1, 0, 1) for d in int_to_balanced(-100))


# ---------------------------------------------------------------------------
# Multiplier array composition
# ---------------------------------------------------------------------------


def test_reduction_plan_census():
    census = plan_reduction(4).census()
    assert (census.tmul, census.tha, census.tfa) == (16, 15, 18)


def test_reduction_plan_column_conservation():
    # Entering each column: initial partial products plus carries from the
    # previous column; every op removes net one item; each column must end
    # with exactly one digit.
    plan = plan_reduction(4)
    width = 4
    sizes = [0] * (2 * width + 1)
    for i in range(width):
        for j in range(width):
            sizes[i + j] += 1  # product trit
            sizes[i + j + 1] += 1  # carry trit
    carries_in = 0
    for w in range(2 * width):
        tfa_ops, tha_ops = plan.schedule.get(w, (0, 0))
        m = sizes[w] + carries_in
        assert m - 2 * tfa_ops - tha_ops == 1, f"column {w} does not reduce to one digit"
        carries_in = tfa_ops + tha_ops
    assert carries_in >= 0


def test_multiply_exhaustive_two_digit():
    for x in range(9):
        for y in range(9):
            p = multiply_words_behavioral(int_to_word(x, 2), int_to_word(y, 2))
            assert word_to_int(p) == x * y


def test_multiply_spot_values():
    assert word_to_str(multiply_words_behavioral(str_to_word("2222"), str_to_word("2222"))) == "22210001"
    assert word_to_int(multiply_words_behavioral(int_to_word(0, 4), int_to_word(80, 4))) == 0
    assert word_to_int(multiply_words_behavioral((2,), (2,))) == 4


def test_multiply_product_width():
    p = multiply_words_behavioral(int_to_word(1, 4), int_to_word(1, 4))
    assert len(p) == 8


@given(st.integers(0, 80), st.integers(0, 80))
def test_multiply_matches_integers(x, y):
    p = multiply_words_behavioral(int_to_word(x, 4), int_to_word(y, 4))
    assert word_to_int(p) == x * y
