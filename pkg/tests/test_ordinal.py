import time

import pytest
from hypothesis import given, settings, strategies as st

from deskforcing.errors import OrdinalOverflow, OrdinalSyntaxError
from deskforcing.ordinal import (OMEGA, ONE, ZERO, Ordinal, cofinality, compare, format_ordinal, from_int, ord_add,
                                 ord_mul, ord_pow, parse_ordinal, to_pair)

W = OMEGA


def P(text):
    return parse_ordinal(text)


def mk(a, b):
    """w*a + b built directly from terms, bypassing the arithmetic under test."""
    terms = []
    if a:
        terms.append((ONE, a))
    if b:
        terms.append((ZERO, b))
    return Ordinal(terms)


# closed forms below w^2, derived straight from the recursive definitions
def pair_add(x, y):
    (a1, b1), (a2, b2) = x, y
    return (a1 + a2, b2) if a2 else (a1, b1 + b2)


def pair_mul(x, y):
    """None when the product reaches w^2."""
    (a1, b1), (a2, b2) = x, y
    if a1 and a2:
        return None
    if not a1:           # finite left factor b1
        if b1 == 0:
            return (0, 0)
        return (a2, b1 * b2)
    n = b2               # right factor is the finite n
    return (a1 * n, b1) if n else (0, 0)


def pair_cmp(x, y):
    return (x > y) - (x < y)


def test_basic_identities():
    assert ONE + W == W
    assert W + ONE != W
    assert from_int(2) * W == W
    assert W * from_int(2) == W + W
    assert W < W + 1


def test_examples():
    assert ord_add(P("w+3"), P("w*2+1")) == P("w*3+1")
    assert ord_mul(W, W) == ord_pow(W, from_int(2))
    assert compare(P("w^2"), P("w*3")) == 1
    assert compare(from_int(2022), W) == -1
    assert ord_pow(P("w+5"), ZERO) == ONE
    for n in range(11):
        assert ord_pow(W, W) > ord_pow(W, from_int(n))


def test_cofinality():
    assert cofinality(from_int(2022)) == ONE
    assert cofinality(W) == W
    assert cofinality(P("w^2*5")) == W
    assert cofinality(ZERO) == ZERO


def test_pow_examples():
    assert ord_pow(from_int(2), W) == W
    assert ord_pow(from_int(2), P("w+1")) == P("w*2")
    assert ord_pow(W, P("w+1")) == ord_mul(ord_pow(W, W), W)
    assert format_ordinal(ord_pow(P("w+1"), from_int(2))) == "w^2 + w + 1"


def test_pow_depth_cap():
    x = W
    with pytest.raises(OrdinalOverflow):
        for _ in range(20):
            x = ord_pow(W, x)


def test_text_forms():
    assert format_ordinal(P("w^2*3 + w + 5")) == "w^2*3 + w + 5"
    assert format_ordinal(P("w^w")) == "w^w"
    assert format_ordinal(P("w^(w+1)")) == "w^(w + 1)"
    assert P("ω*2") == P("w*2")
    for bad in ["", "w +", "(w", "w w", "-1", "x"]:
        with pytest.raises(OrdinalSyntaxError):
            P(bad)


def test_oracle_exhaustive_below_w_times_20_plus_20():
    vals = [(a, b) for a in range(21) for b in range(21)]
    ords = {v: mk(*v) for v in vals}
    t0 = time.perf_counter()
    for x in vals:
        ox = ords[x]
        for y in vals:
            oy = ords[y]
            assert to_pair(ord_add(ox, oy)) == pair_add(x, y)
            assert compare(ox, oy) == pair_cmp(x, y)
            expect = pair_mul(x, y)
            if expect is not None:
                assert to_pair(ord_mul(ox, oy)) == expect
    assert time.perf_counter() - t0 < 5.0


# ------------------------------------------------------------- properties

def ordinals(depth=3):
    leaf = st.integers(0, 6).map(from_int)
    frag = st.recursive(
        leaf,
        lambda ch: st.one_of(
            st.builds(lambda e, c: Ordinal(((e, c),)) if e.depth() < depth else from_int(c), ch, st.integers(1, 4)),
            st.builds(ord_add, ch, ch),
        ),
        max_leaves=6,
    )
    return frag


@given(ordinals(), ordinals(), ordinals())
@settings(max_examples=1000, deadline=None)
def test_add_associative(a, b, c):
    assert ord_add(ord_add(a, b), c) == ord_add(a, ord_add(b, c))


@given(ordinals(2), ordinals(2), ordinals(2))
@settings(max_examples=1000, deadline=None)
def test_mul_associative(a, b, c):
    assert ord_mul(ord_mul(a, b), c) == ord_mul(a, ord_mul(b, c))


@given(ordinals(2), ordinals(2), ordinals(2))
@settings(max_examples=500, deadline=None)
def test_left_distributive(a, b, c):
    assert ord_mul(a, ord_add(b, c)) == ord_add(ord_mul(a, b), ord_mul(a, c))


def test_right_distributivity_fails():
    assert ord_mul(ord_add(ONE, ONE), W) != ord_add(ord_mul(ONE, W), ord_mul(ONE, W))


@given(ordinals(), ordinals(), ordinals())
@settings(max_examples=500, deadline=None)
def test_add_monotone_right(a, b, c):
    if b < c:
        assert ord_add(a, b) < ord_add(a, c)


@given(ordinals())
@settings(max_examples=300, deadline=None)
def test_parse_format_round_trip(a):
    assert parse_ordinal(format_ordinal(a)) == a


@given(ordinals())
@settings(max_examples=300, deadline=None)
def test_normal_form_invariants(a):
    es = [e for e, _ in a.terms]
    assert all(x > y for x, y in zip(es, es[1:]))
    assert all(c >= 1 for _, c in a.terms)
