import itertools
import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from deskforcing import _kernels
from deskforcing.forcing import FiniteGrid

IMPLS = [_kernels.numpy_impl] + ([_kernels.numba_impl] if _kernels.numba_impl is not None else [])


@st.composite
def orders(draw, max_n=9):
    """Random partial orders as reflexive, transitive up-matrices."""
    n = draw(st.integers(1, max_n))
    bits = draw(st.lists(st.booleans(), min_size=n * n, max_size=n * n))
    up = np.eye(n, dtype=bool)
    for i, j in itertools.product(range(n), repeat=2):
        if i < j and bits[i * n + j]:
            up[i, j] = True
    for k in range(n):                   # Warshall closure
        up |= up[:, k:k + 1] & up[k:k + 1, :]
    return up


def vectors(n):
    return st.lists(st.booleans(), min_size=n, max_size=n).map(lambda v: np.array(v, dtype=bool))


def naive(up, s, guard=None):
    n = len(up)
    ex = np.array([any(up[p, q] and s[q] for q in range(n)) for p in range(n)])
    fa = np.array([all(s[q] for q in range(n) if up[p, q]) for p in range(n)])
    closed = all(s[q] for p in range(n) if s[p] for q in range(n) if up[p, q])
    fe = None
    if guard is not None:
        fe = np.array([all(ex[q] for q in range(n) if up[p, q] and guard[q]) for p in range(n)])
    return ex, fa, closed, fe


@given(st.data())
@settings(max_examples=300, deadline=None)
def test_kernels_agree_with_naive(data):
    up = data.draw(orders())
    n = len(up)
    s = data.draw(vectors(n))
    g = data.draw(vectors(n))
    ex, fa, closed, fe = naive(up, s, g)
    for impl in IMPLS:
        assert np.array_equal(impl.exists_above(up, s), ex)
        assert np.array_equal(impl.forall_above(up, s), fa)
        assert impl.upward_closed(up, s) == closed
        assert np.array_equal(impl.forall_exists_above(up, g, s), fe)


def test_kernels_on_grid_poset():
    P = FiniteGrid(1, 2)
    up = np.ascontiguousarray(P.up)
    rng = np.random.default_rng(0)
    for _ in range(50):
        s = rng.random(len(up)) < 0.4
        g = rng.random(len(up)) < 0.5
        outs = [(i.exists_above(up, s), i.forall_above(up, s), i.forall_exists_above(up, g, s)) for i in IMPLS]
        for o in outs[1:]:
            assert all(np.array_equal(a, b) for a, b in zip(outs[0], o))


@given(st.lists(st.integers(0, 63), min_size=0, max_size=10), st.integers(1, 4), st.integers(-1, 7))
@settings(max_examples=300, deadline=None)
def test_delta_search_agrees(masks, m, root):
    arr = np.array(masks, dtype=np.int64)
    results = [tuple(impl.delta_search(arr, m, root)) for impl in IMPLS]
    assert len(set(results)) == 1
    got = results[0]
    brute = None
    for combo in itertools.combinations(range(len(masks)), m):
        if m == 1:
            if root < 0 or masks[combo[0]] == root:
                brute = combo
                break
            continue
        r = masks[combo[0]] & masks[combo[1]]
        if root >= 0 and r != root:
            continue
        if all(masks[a] & masks[b] == r for a, b in itertools.combinations(combo, 2)):
            brute = combo
            break
    assert bool(got) == (brute is not None)
    if got:
        assert len(got) == m and len(set(got)) == m


def test_backend_reported():
    assert _kernels.BACKEND in ("numpy", "numba")


@pytest.mark.parametrize("flag,expect", [("1", "numpy"), ("0", None)])
def test_env_flag_selects_backend(flag, expect):
    env = dict(os.environ, DESKFORCING_NO_NUMBA=flag)
    r = subprocess.run([sys.executable, "-c", "from deskforcing import _kernels; print(_kernels.BACKEND)"],
                       capture_output=True, text=True, env=env, timeout=120)
    assert r.returncode == 0
    if expect is None:
        expect = "numba" if _kernels.numba_impl is not None else "numpy"
    assert r.stdout.strip() == expect
