import itertools

import pytest
from hypothesis import given, settings, strategies as st

from deskforcing.errors import HFSyntaxError, NotAPair, StageTooLarge
from deskforcing.hf import (EMPTY, HFSet, decode_pair, encode_pair, encode_value, format_hf, is_transitive, parse_hf,
                            powerset, rank, transitive_closure, v_stage, von_neumann)

V3 = sorted(v_stage(3), key=HFSet.key)
V4 = sorted(v_stage(4), key=HFSet.key)


def _py_stage(n):
    # independent oracle with plain frozensets
    s = frozenset()
    for _ in range(n):
        items = list(s)
        s = frozenset(frozenset(c) for k in range(len(items) + 1) for c in itertools.combinations(items, k))
    return s


def _to_py(x):
    return frozenset(_to_py(m) for m in x.members)


def test_canonicalize_duplicates():
    assert HFSet([EMPTY, EMPTY]) == HFSet([EMPTY])
    assert len(HFSet([EMPTY, EMPTY])) == 1


def test_canonicalize_order():
    one = HFSet([EMPTY])
    assert HFSet([one, EMPTY]) == HFSet([EMPTY, one])
    assert format_hf(HFSet([one, EMPTY])) == format_hf(HFSet([EMPTY, one]))


def test_numeral_literal():
    assert parse_hf("{0,1,2}") == von_neumann(3)


def test_rank_examples():
    assert rank(EMPTY) == 0
    assert rank(von_neumann(3)) == 3
    assert rank(parse_hf("{{{}}}")) == 2


def test_stages():
    assert v_stage(0) == frozenset()
    assert v_stage(2) == {EMPTY, HFSet([EMPTY])}
    assert len(v_stage(4)) == 16
    assert len(v_stage(5)) == 65536


def test_stage_cap():
    with pytest.raises(StageTooLarge):
        v_stage(6)


@pytest.mark.parametrize("n", range(5))
def test_stage_matches_oracle(n):
    assert {_to_py(x) for x in v_stage(n)} == _py_stage(n)


def test_stages_cumulative():
    for n in range(4):
        assert v_stage(n) <= v_stage(n + 1)


def test_von_neumann():
    assert von_neumann(0) == EMPTY
    assert von_neumann(1) == HFSet([EMPTY])
    assert von_neumann(3) == HFSet([EMPTY, HFSet([EMPTY]), HFSet([EMPTY, HFSet([EMPTY])])])
    for n in range(5):
        assert von_neumann(n) in v_stage(n + 1)
    for n in range(12):
        assert is_transitive(von_neumann(n)) and rank(von_neumann(n)) == n


def test_transitivity():
    for k in range(7):
        assert is_transitive(von_neumann(k))
    assert not is_transitive(HFSet([von_neumann(1)]))
    assert transitive_closure(parse_hf("{{{}}}")) == {HFSet([EMPTY]), EMPTY}


def test_ranks_below_stage():
    for n in range(5):
        assert all(rank(x) < n for x in v_stage(n))


def test_extensionality_v4():
    for x, y in itertools.product(V4, repeat=2):
        assert (x == y) == (x.members == y.members)


def test_pairs():
    assert encode_pair(EMPTY, EMPTY) == parse_hf("{{{}}}")
    assert encode_pair(von_neumann(0), von_neumann(1)) != encode_pair(von_neumann(1), von_neumann(0))
    for x, y in itertools.product(V4, repeat=2):
        assert decode_pair(encode_pair(x, y)) == (x, y)


def test_pair_injective_v3():
    seen = {}
    for x, y in itertools.product(V3, repeat=2):
        p = encode_pair(x, y)
        assert seen.setdefault(p, (x, y)) == (x, y)


def test_not_a_pair():
    with pytest.raises(NotAPair):
        decode_pair(von_neumann(3))


def test_encode_value_triples():
    assert encode_value((0, 1, 1)) == encode_pair(von_neumann(0), encode_pair(von_neumann(1), von_neumann(1)))


def test_powerset():
    assert powerset(von_neumann(2)) == HFSet(v_stage(2) | {HFSet([von_neumann(1)]), von_neumann(2)})


@pytest.mark.parametrize("bad", ["", "{", "{}}", "{,}", "x", "{65}"])
def test_parse_errors(bad):
    with pytest.raises(HFSyntaxError):
        parse_hf(bad)


@given(st.sampled_from(V4), st.sampled_from(V4))
@settings(max_examples=200, deadline=None)
def test_text_round_trip(x, y):
    z = HFSet([x, y])
    assert parse_hf(format_hf(z)) == z
    assert parse_hf(format_hf(z, numerals=True)) == z
