import time

import pytest
from hypothesis import given, settings, strategies as st

from oracles import binary_entropy, bound_rows_mp
from upolar.bounds import (bound_table, bsc_convolution, check_g_monotone, design_delta, f_step, g_step, h,
                           h_inv)

PRINTED_AT_HALF = {0: (0.5, 0.5), 1: (0.713, 0.750), 2: (0.771, 0.812), 3: (0.805, 0.847), 4: (0.829, 0.870),
                   5: (0.846, 0.887), 10: (0.895, 0.931), 20: (0.932, 0.960), 30: (0.949, 0.972), 40: (0.958, 0.978)}


def test_entropy_examples():
    assert h(0.5) == 1.0
    assert h(0.0) == 0.0 and h(1.0) == 0.0
    assert h(0.11) == pytest.approx(binary_entropy(0.11), abs=1e-15)
    assert h(0.11) == pytest.approx(0.49992, abs=2e-5)
    with pytest.raises(ValueError):
        h(1.5)


def test_entropy_inverse_examples():
    assert h_inv(1.0) == 0.5
    assert h_inv(0.0) == 0.0
    assert h_inv(0.5) == pytest.approx(0.110028, abs=1e-6)
    assert h_inv(0.5) == pytest.approx(0.11002786443836499, abs=1e-12)
    with pytest.raises(ValueError):
        h_inv(-0.1)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.0, 1.0))
def test_entropy_inverse_round_trip(y):
    x = h_inv(y)
    assert 0.0 <= x <= 0.5
    assert abs(h(x) - y) < 1e-11


def test_convolution_symmetric():
    assert bsc_convolution(0.1, 0.2) == pytest.approx(0.26)
    assert bsc_convolution(0.0, 0.3) == 0.3


def test_step_examples():
    assert f_step(0.5, 0.5) == 0.25
    assert g_step(0.5, 0.5) == pytest.approx(0.2864, abs=1e-4)
    assert g_step(0.5, 0.5) == pytest.approx(0.2864632714, abs=1e-9)
    for x in (0.1, 0.4, 0.9):
        assert f_step(x, x) == pytest.approx(x * x)


def test_step_domain():
    with pytest.raises(ValueError):
        f_step(0.6, 0.5)
    with pytest.raises(ValueError):
        g_step(0.1, 0.8)  # below 2x - 1
    with pytest.raises(ValueError):
        f_step(0.1, 1.5)
    # tiny floating overshoot is clamped rather than rejected
    assert f_step(0.5 + 1e-13, 0.5) == 0.25


@settings(max_examples=60, deadline=None)
@given(st.floats(0.0, 1.0), st.floats(0.0, 1.0), st.floats(0.0, 1.0))
def test_steps_nondecreasing_in_t(x, a, b):
    lo, hi = max(0.0, 2 * x - 1), x
    t1, t2 = sorted((lo + a * (hi - lo), lo + b * (hi - lo)))
    assert f_step(t1, x) <= f_step(t2, x) + 1e-12
    assert g_step(t1, x) <= g_step(t2, x) + 1e-10


def test_half_capacity_bounds_against_high_precision_oracle():
    rows = bound_table(0.5, 40)
    ref = bound_rows_mp("0.5", 40)
    for row, (lo, up) in zip(rows, ref):
        assert row.lowerI == pytest.approx(float(lo), abs=1e-11)
        assert row.upperI == pytest.approx(float(up), abs=1e-15)


def test_half_capacity_bounds_within_a_unit_of_the_printed_digit():
    # the printed entries are truncated rather than rounded in several rows
    rows = bound_table(0.5, 40)
    for n, (lo, up) in PRINTED_AT_HALF.items():
        assert abs(rows[n].lowerI - lo) < 1e-3
        assert abs(rows[n].upperI - up) < 1e-3


def test_table_examples():
    r10 = bound_table(0.5, 10)[10]
    assert (round(r10.lowerI, 3), round(r10.upperI, 3)) == (0.895, 0.931)
    r20 = bound_table(0.8, 20)[20]
    assert abs(r20.lowerI - 0.9996) <= 1e-4
    assert abs(r20.upperI - 0.9999999991) <= 1e-10
    for row in bound_table(1.0, 5):
        assert (row.lowerI, row.upperI) == (1.0, 1.0)
    with pytest.raises(ValueError):
        bound_table(1.2, 3)
    with pytest.raises(ValueError):
        bound_table(0.5, -1)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.0, 1.0))
def test_bound_rows_ordered(cap):
    rows = bound_table(cap, 12)
    for row in rows:
        assert 0.0 <= row.lowerI <= row.upperI + 1e-12 <= 1.0 + 1e-12
        assert row.h_input == pytest.approx(1 - cap)
    if cap >= 0.5:
        lows = [r.lowerI for r in rows]
        ups = [r.upperI for r in rows]
        assert all(b >= a - 1e-12 for a, b in zip(lows, lows[1:]))
        assert all(b >= a - 1e-12 for a, b in zip(ups, ups[1:]))


def test_table_speed():
    start = time.perf_counter()
    bound_table(0.5, 40)
    bound_table(0.8, 20)
    assert time.perf_counter() - start < 1.0


@pytest.mark.parametrize("x", [0.0, 0.05, 0.5, 0.9, 0.95, 1.0])
def test_g_monotone(x):
    assert check_g_monotone(x, 1000)


def test_g_monotone_rejects_bad_x():
    with pytest.raises(ValueError):
        check_g_monotone(1.2)


def test_g_monotone_detects_decrease():
    # a negative tolerance demands every grid step rise by at least 1, which g never does
    assert not check_g_monotone(0.5, 50, tol=-1.0)


def test_design_delta():
    assert design_delta(0.8, 5) == pytest.approx(1 - 0.986, abs=1e-3)
    assert design_delta(0.5, 4) == pytest.approx(0.17064, abs=1e-5)
    ref = bound_rows_mp("0.5", 4)[4][0]
    assert design_delta(0.5, 4) == pytest.approx(1 - float(ref), abs=1e-11)
