"""Hot loops with a numba implementation and a plain numpy fallback.

The backend is chosen once at import time.  Set ``DESKFORCING_NO_NUMBA=1``
to force the numpy path (or when numba is not installed).  Both
implementations are always importable as ``numpy_impl`` and, when numba is
available, ``numba_impl`` so they can be compared directly.

Conventions: ``up`` is a square boolean matrix with ``up[p, q]`` true when
q extends p (p <= q).  Forcing sets are boolean vectors over the same
index.
"""
from __future__ import annotations

import os
from types import SimpleNamespace

import numpy as np

_OFF = os.environ.get("DESKFORCING_NO_NUMBA", "").strip().lower() not in ("", "0", "false", "no")

try:
    import numba as _nb
except ImportError:  # pragma: no cover - numba is a declared dependency
    _nb = None


# ------------------------------------------------------------ numpy path

def _np_exists_above(up, s):
    return (up & s[None, :]).any(axis=1)


def _np_forall_above(up, s):
    return (~up | s[None, :]).all(axis=1)


def _np_forall_exists_above(up, guard, s):
    # for every q >= p with guard[q] there is r >= q in s
    reach = _np_exists_above(up, s)
    return _np_forall_above(up, ~guard | reach)


def _np_upward_closed(up, s):
    return not (up & s[:, None] & ~s[None, :]).any()


def _np_delta_search(masks, m, root):
    n = len(masks)
    masks = [int(x) for x in masks]
    if m <= 0:
        return np.empty(0, dtype=np.int64)
    if m == 1:
        for i in range(n):
            if root < 0 or masks[i] == root:
                return np.array([i], dtype=np.int64)
        return np.empty(0, dtype=np.int64)
    for i in range(n):
        for j in range(i + 1, n):
            r = masks[i] & masks[j]
            if root >= 0 and r != root:
                continue
            cand = [k for k in range(j + 1, n) if masks[k] & masks[i] == r and masks[k] & masks[j] == r]
            picked = _np_clique(masks, cand, r, m - 2, [])
            if picked is not None:
                return np.array([i, j] + picked, dtype=np.int64)
    return np.empty(0, dtype=np.int64)


def _np_clique(masks, cand, r, need, chosen):
    if need == 0:
        return list(chosen)
    for pos, k in enumerate(cand):
        if len(cand) - pos < need:
            break
        if all(masks[k] & masks[c] == r for c in chosen):
            chosen.append(k)
            got = _np_clique(masks, cand[pos + 1:], r, need - 1, chosen)
            if got is not None:
                return got
            chosen.pop()
    return None


numpy_impl = SimpleNamespace(
    name="numpy",
    exists_above=_np_exists_above,
    forall_above=_np_forall_above,
    forall_exists_above=_np_forall_exists_above,
    upward_closed=_np_upward_closed,
    delta_search=_np_delta_search,
)


# ------------------------------------------------------------ numba path

def _build_numba():
    njit = _nb.njit(cache=True, nogil=True)

    @njit
    def exists_above(up, s):
        n = up.shape[0]
        out = np.zeros(n, dtype=np.bool_)
        for p in range(n):
            for q in range(n):
                if up[p, q] and s[q]:
                    out[p] = True
                    break
        return out

    @njit
    def forall_above(up, s):
        n = up.shape[0]
        out = np.ones(n, dtype=np.bool_)
        for p in range(n):
            for q in range(n):
                if up[p, q] and not s[q]:
                    out[p] = False
                    break
        return out

    @njit
    def forall_exists_above(up, guard, s):
        n = up.shape[0]
        reach = np.zeros(n, dtype=np.bool_)
        for q in range(n):
            for r in range(n):
                if up[q, r] and s[r]:
                    reach[q] = True
                    break
        out = np.ones(n, dtype=np.bool_)
        for p in range(n):
            for q in range(n):
                if up[p, q] and guard[q] and not reach[q]:
                    out[p] = False
                    break
        return out

    @njit
    def upward_closed(up, s):
        n = up.shape[0]
        for p in range(n):
            if s[p]:
                for q in range(n):
                    if up[p, q] and not s[q]:
                        return False
        return True

    @njit
    def delta_search(masks, m, root):
        n = masks.shape[0]
        empty = np.empty(0, dtype=np.int64)
        if m <= 0:
            return empty
        if m == 1:
            for i in range(n):
                if root < 0 or masks[i] == root:
                    out = np.empty(1, dtype=np.int64)
                    out[0] = i
                    return out
            return empty
        need = m - 2
        cand = np.empty(n, dtype=np.int64)
        chosen = np.empty(max(need, 1), dtype=np.int64)
        ptr = np.zeros(max(need, 1) + 1, dtype=np.int64)
        for i in range(n):
            for j in range(i + 1, n):
                r = masks[i] & masks[j]
                if root >= 0 and r != root:
                    continue
                c = 0
                for k in range(j + 1, n):
                    if (masks[k] & masks[i]) == r and (masks[k] & masks[j]) == r:
                        cand[c] = k
                        c += 1
                if c < need:
                    continue
                depth = 0
                ptr[0] = 0
                while depth >= 0:
                    if depth == need:
                        out = np.empty(m, dtype=np.int64)
                        out[0] = i
                        out[1] = j
                        for t in range(need):
                            out[2 + t] = chosen[t]
                        return out
                    advanced = False
                    while ptr[depth] < c:
                        k = cand[ptr[depth]]
                        ptr[depth] += 1
                        ok = True
                        for t in range(depth):
                            if (masks[k] & masks[chosen[t]]) != r:
                                ok = False
                                break
                        if ok:
                            chosen[depth] = k
                            depth += 1
                            ptr[depth] = ptr[depth - 1]
                            advanced = True
                            break
                    if not advanced:
                        depth -= 1
        return empty

    return SimpleNamespace(
        name="numba",
        exists_above=exists_above,
        forall_above=forall_above,
        forall_exists_above=forall_exists_above,
        upward_closed=upward_closed,
        delta_search=delta_search,
    )


numba_impl = _build_numba() if _nb is not None else None

active = numpy_impl if (_OFF or numba_impl is None) else numba_impl
BACKEND = active.name

# Above this many conditions the dense numpy form of the cone kernels beats
# the compiled loops (see benchmarks/bench_kernels.py); below it numba's
# lower call overhead wins.
DENSE_CUTOFF = 128


def _by_size(name):
    small, large = getattr(active, name), getattr(numpy_impl, name)
    if small is large:
        return small

    def kernel(up, *vecs):
        return (small if up.shape[0] <= DENSE_CUTOFF else large)(up, *vecs)

    kernel.__name__ = name
    return kernel


_LARGE = SimpleNamespace(
    name=f"{active.name}+numpy",
    exists_above=numpy_impl.exists_above,
    forall_above=numpy_impl.forall_above,
    forall_exists_above=numpy_impl.forall_exists_above,
    upward_closed=active.upward_closed,
    delta_search=active.delta_search,
)


def for_size(n: int):
    """The kernel set to use for posets with n conditions, chosen once per caller."""
    return active if n <= DENSE_CUTOFF else _LARGE


exists_above = _by_size("exists_above")
forall_above = _by_size("forall_above")
forall_exists_above = _by_size("forall_exists_above")
upward_closed = active.upward_closed


def delta_search(masks, m: int, root: int = -1) -> np.ndarray:
    return active.delta_search(np.asarray(masks, dtype=np.int64), int(m), int(root))
