from __future__ import annotations

import math
import struct

import pytest
from hypothesis import given
from hypothesis import strategies as st

from vecu.errors import DimensionMismatch, NonAscendingBreakpoints
from vecu.scalars import (INT_BOUNDS, MapData1, MapData2, cast_value, fmt_num,
                          interp1, interp2, quant32, saturate)


def f32_roundtrip(x: float) -> float:
    # independent oracle: what the hardware would store in a 4-byte float
    return struct.unpack("<f", struct.pack("<f", x))[0]


finite = st.floats(allow_nan=False, allow_infinity=False, width=64)


@given(finite)
def test_quant32_matches_struct_roundtrip(x):
    try:
        expect = f32_roundtrip(x)
    except OverflowError:
        expect = math.inf if x > 0 else -math.inf
    assert quant32(x) == expect or (math.isnan(expect) and math.isnan(quant32(x)))


@given(finite)
def test_quant32_idempotent(x):
    q = quant32(x)
    assert quant32(q) == q or (math.isnan(q) and math.isnan(quant32(q)))


def test_quant32_overflow_saturates_to_inf():
    assert quant32(1e39) == math.inf
    assert quant32(-1e39) == -math.inf
    assert math.isnan(quant32(math.nan))


@pytest.mark.parametrize("t", sorted(INT_BOUNDS))
@given(v=st.integers(min_value=-2**70, max_value=2**70))
def test_saturate_stays_in_bounds(t, v):
    lo, hi = INT_BOUNDS[t]
    s = saturate(t, v)
    assert lo <= s <= hi
    if lo <= v <= hi:
        assert s == v


def test_cast_float_to_int_truncates_toward_zero():
    assert cast_value("i16", 2.9) == 2
    assert cast_value("i16", -2.9) == -2
    assert cast_value("i8", -0.5) == 0


def test_cast_nan_and_inf_to_int():
    assert cast_value("i32", math.nan) == 0
    assert cast_value("u8", math.inf) == 255
    assert cast_value("i8", -math.inf) == -128


def test_cast_to_bool_is_zero_test():
    assert cast_value("bool", 0.0) is False
    assert cast_value("bool", -3) is True
    assert cast_value("bool", math.nan) is True  # NaN != 0


@given(finite)
def test_cast_to_f32_quantizes(x):
    got = cast_value("f32", x)
    assert got == quant32(x) or (math.isnan(x) and math.isnan(got))


def test_fmt_num_never_uses_exponent():
    for v in (1e-9, 1.5e20, 123456789.0, -2.5e-7, 0.1):
        s = fmt_num(v)
        assert "e" not in s and "E" not in s
        assert float(s) == v


def test_fmt_num_ints_and_bools():
    assert fmt_num(True) == "1"
    assert fmt_num(False) == "0"
    assert fmt_num(42) == "42"
    assert float(fmt_num(-0.0)) == 0.0


# interpolation: brute-force linear formula as oracle, evaluated in
# double, checked against interp1 on dense probes


def lerp_oracle(bp, vals, x):
    if x <= bp[0]:
        return vals[0]
    if x >= bp[-1]:
        return vals[-1]
    for i in range(len(bp) - 1):
        if bp[i] <= x <= bp[i + 1]:
            w = (x - bp[i]) / (bp[i + 1] - bp[i])
            return vals[i] + w * (vals[i + 1] - vals[i])
    raise AssertionError


def test_interp1_matches_oracle_on_dense_grid():
    m = MapData1([0.0, 10.0, 15.0, 40.0], [1.0, 3.0, -2.0, 8.0])
    for k in range(-50, 500):
        x = k * 0.1
        assert interp1(m, x) == pytest.approx(lerp_oracle(m.breakpoints, m.values, x), abs=1e-12)


def test_interp1_clamps_outside_range():
    m = MapData1([0.0, 1.0], [5.0, 7.0])
    assert interp1(m, -100.0) == 5.0
    assert interp1(m, 100.0) == 7.0


def test_interp1_hits_breakpoints_exactly():
    m = MapData1([1.0, 2.0, 4.0], [10.0, 20.0, 40.0])
    for b, v in zip(m.breakpoints, m.values):
        assert interp1(m, b) == v


@given(st.floats(min_value=-5.0, max_value=5.0), st.floats(min_value=-5.0, max_value=5.0))
def test_interp2_matches_separable_oracle(x, y):
    # grid z = 2x + 3y is exactly reproduced by bilinear interpolation
    xs = [-5.0, -1.0, 2.0, 5.0]
    ys = [-5.0, 0.0, 5.0]
    grid = [[2 * xv + 3 * yv for yv in ys] for xv in xs]
    m = MapData2(xs, ys, grid)
    assert interp2(m, x, y) == pytest.approx(2 * x + 3 * y, abs=1e-9)


def test_interp2_corner_clamping():
    xs = [0.0, 1.0]
    ys = [0.0, 1.0]
    m = MapData2(xs, ys, [[1.0, 2.0], [3.0, 4.0]])
    assert interp2(m, -9.0, -9.0) == 1.0
    assert interp2(m, 9.0, 9.0) == 4.0


def test_map_validation_rejects_bad_shapes():
    with pytest.raises(NonAscendingBreakpoints):
        MapData1([0.0, 0.0, 1.0], [1.0, 2.0, 3.0]).validate()
    with pytest.raises(DimensionMismatch):
        MapData1([0.0, 1.0], [1.0]).validate()
    with pytest.raises(DimensionMismatch):
        MapData2([0.0, 1.0], [0.0, 1.0], [[1.0, 2.0]]).validate()
    with pytest.raises(NonAscendingBreakpoints):
        MapData2([1.0, 0.0], [0.0, 1.0], [[1.0, 2.0], [3.0, 4.0]]).validate()
