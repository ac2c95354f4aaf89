import math
from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, strategies as st

from metricfuzz.extreal import (
    INF, ONE, ZERO, ExtReal, add, div_ceil, ext_max, format_ext, from_json,
    leq, mul, parse_ext, reciprocal_gap, to_json,
)

GRID = [ExtReal(0), ExtReal(0.5), ExtReal(1), ExtReal(2), INF]
TRIPLES = list(product(GRID, repeat=3))

ext_reals = st.one_of(
    st.just(INF),
    st.floats(min_value=0, max_value=1e6, allow_nan=False).map(ExtReal),
    st.sampled_from([ZERO, ONE]),
)


def test_construction_rejects_nan_and_negatives():
    with pytest.raises(ValueError):
        ExtReal(math.nan)
    with pytest.raises(ValueError):
        ExtReal(-1e-300)
    assert ExtReal(-0.0) == ZERO and format_ext(ExtReal(-0.0)) == "0"


def test_single_infinity():
    assert ExtReal(math.inf) == INF and hash(ExtReal(math.inf)) == hash(INF)
    assert ExtReal(INF) is not INF and ExtReal(INF) == INF


def test_add_examples():
    assert add(INF, 3) == INF
    assert add(3, INF) == INF
    assert add(0, 1.25) == 1.25
    assert add(1.5, 2.25) == 3.75


def test_mul_examples():
    assert mul(0, INF) == INF
    assert mul(INF, 0) == ZERO
    assert mul(2, 3) == 6
    assert mul(INF, 0.5) == INF
    assert mul(0.5, INF) == INF


def test_mul_not_commutative():
    assert mul(ZERO, INF) != mul(INF, ZERO)


def test_operators_keep_argument_order():
    assert ZERO * INF == INF
    assert INF * ZERO == ZERO
    assert 0 * INF == INF
    assert INF * 0 == ZERO
    assert 1 + INF == INF


def test_leq_examples():
    assert leq(5, INF)
    assert not leq(INF, 5)
    assert leq(INF, INF)
    assert leq(2, 2)


@pytest.mark.parametrize("a,b,c", TRIPLES)
def test_grid_add_assoc_comm(a, b, c):
    assert add(add(a, b), c) == add(a, add(b, c))
    assert add(a, b) == add(b, a)


@pytest.mark.parametrize("a,b,c", TRIPLES)
def test_grid_mul_assoc(a, b, c):
    assert mul(mul(a, b), c) == mul(a, mul(b, c))


@pytest.mark.parametrize("r,a,b", TRIPLES)
def test_grid_distributivity(r, a, b):
    assert mul(r, add(a, b)) == add(mul(r, a), mul(r, b))


def test_grid_monotonicity():
    for a, a2, b, b2 in product(GRID, repeat=4):
        if leq(a, a2) and leq(b, b2):
            assert leq(mul(a, b), mul(a2, b2)), (a, a2, b, b2)
            assert leq(add(a, b), add(a2, b2))


@given(ext_reals, ext_reals, ext_reals)
def test_add_assoc_comm(a, b, c):
    assert add(a, b) == add(b, a)
    # finite sums may round differently; compare with a relative slack
    lhs, rhs = float(add(add(a, b), c)), float(add(a, add(b, c)))
    assert lhs == rhs or abs(lhs - rhs) <= 1e-12 * max(lhs, rhs)


@given(ext_reals, ext_reals)
def test_mul_infinity_laws(r, x):
    assert mul(r, INF) == INF
    assert mul(INF, x) == (ZERO if x == 0 else INF)
    assert add(r, INF) == INF


# ---- div_ceil ----------------------------------------------------------

RATIONALS = sorted({Fraction(k, q) for q in range(1, 13) for k in range(0, 13 * q + 1)})


def brute_div_ceil(t, s):
    """Least rational on a fine grid, or inf, with mul(r, s) >= t; None if nothing works."""
    for r in RATIONALS:
        if leq(t, mul(float(r), s)):
            return ExtReal(float(r))
    if leq(t, mul(INF, s)):
        return INF
    return None


SMALL = [ExtReal(x) for x in (0, 0.5, 1, 2, 3, 4, 6)] + [INF]


@pytest.mark.parametrize("t,s", list(product(SMALL, repeat=2)))
def test_div_ceil_matches_grid_search(t, s):
    got, want = div_ceil(t, s), brute_div_ceil(t, s)
    if want is None:
        assert got is None
        return
    assert got is not None
    assert leq(t, mul(got, s))
    # the grid only holds approximations of irrational-free quotients t/s
    assert math.isclose(float(got), float(want), rel_tol=1e-12) or got == want


def test_div_ceil_examples():
    assert math.isclose(float(div_ceil(2, 3)), 2 / 3, rel_tol=1e-15)
    assert div_ceil(0, 7) == 0 and div_ceil(0, 0) == 0 and div_ceil(0, INF) == 0
    assert div_ceil(5, INF) == 0
    assert div_ceil(5, 0) is None
    assert div_ceil(INF, 2) == INF
    assert div_ceil(INF, INF) == 0


@given(ext_reals, ext_reals)
def test_div_ceil_is_a_witness(t, s):
    r = div_ceil(t, s)
    if r is None:
        assert t > 0 and s == 0
        return
    assert leq(t, mul(r, s))
    # nothing visibly smaller works
    if not r.is_inf and r > 0:
        smaller = ExtReal(math.nextafter(float(r), 0.0))
        assert not leq(t, mul(smaller, s))


def test_reciprocal_gap():
    assert reciprocal_gap(0) == 1
    assert reciprocal_gap(0.5) == 2
    assert math.isclose(float(reciprocal_gap(0.9)), 10.0)
    assert reciprocal_gap(1) == INF
    assert reciprocal_gap(INF) == INF


def test_text_and_json_forms():
    assert parse_ext("inf") == INF and parse_ext("0.5") == 0.5
    with pytest.raises(ValueError):
        parse_ext("Infinity")
    assert format_ext(INF) == "inf" and format_ext(2) == "2" and format_ext(0.5) == "0.5"
    assert to_json(INF) == "inf" and from_json("inf") == INF
    for x in GRID:
        assert from_json(to_json(x)) == x
    assert ext_max() == ZERO and ext_max(1, INF, 0) == INF
