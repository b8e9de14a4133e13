"""Forcing posets of finite partial functions, ideals, dense sets, genericity.

Conditions are finite partial maps; q extends p (written p <= q) when p is a
subset of q.  Grid posets map cells (row, col) to bits, collapse posets are
finite partial injections from A to B, and explicit posets carry any finite
order given as pairs.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterable, Sequence

import numpy as np

from . import _kernels
from .errors import AntichainError, FinderFailure, InfinitePosetError, NoDeltaSystem, PosetError

ENUMERATION_CAP = 20_000


def _sort_key(x):
    return (type(x).__name__, x) if not isinstance(x, tuple) else ("tuple", tuple(_sort_key(y) for y in x))


class Condition:
    """A finite partial function, stored as sorted (key, value) items."""

    __slots__ = ("items", "_map", "_hash")

    def __init__(self, items=()):
        if isinstance(items, dict):
            pairs = list(items.items())
        else:
            pairs = [tuple(kv) for kv in items]
        m = {}
        for k, v in pairs:
            if k in m and m[k] != v:
                raise PosetError(f"condition assigns two values to {k!r}")
            m[k] = v
        self._map = m
        self.items = tuple(sorted(m.items(), key=lambda kv: _sort_key(kv[0])))
        self._hash = hash(self.items)

    @classmethod
    def grid(cls, cells: Iterable) -> "Condition":
        """Build from (row, col, bit) triples."""
        out = []
        for cell in cells:
            r, c, b = cell
            if b not in (0, 1):
                raise PosetError(f"grid values are bits, got {b!r}")
            out.append(((int(r), int(c)), int(b)))
        return cls(out)

    def __eq__(self, other):
        return isinstance(other, Condition) and self.items == other.items

    def __hash__(self):
        return self._hash

    def __len__(self):
        return len(self.items)

    def __iter__(self):
        return iter(self.items)

    def __repr__(self):
        inner = ", ".join(f"{k!r}->{v!r}" for k, v in self.items)
        return f"Condition({{{inner}}})"

    def get(self, key, default=None):
        return self._map.get(key, default)

    def __contains__(self, key):
        return key in self._map

    @property
    def domain(self) -> frozenset:
        return frozenset(self._map)

    def as_dict(self) -> dict:
        return dict(self._map)

    def le(self, other: "Condition") -> bool:
        """self <= other: other extends self."""
        om = other._map
        return len(self.items) <= len(other.items) and all(k in om and om[k] == v for k, v in self.items)

    def agrees_with(self, other: "Condition") -> bool:
        om = other._map
        return all(om.get(k, v) == v for k, v in self.items)

    def union(self, other: "Condition") -> "Condition":
        d = dict(self._map)
        d.update(other._map)
        return Condition(d)

    def extend(self, more) -> "Condition":
        d = dict(self._map)
        for k, v in (more.items() if isinstance(more, dict) else more):
            if k in d and d[k] != v:
                raise PosetError(f"extension clashes at {k!r}")
            d[k] = v
        return Condition(d)

    def restrict(self, keys) -> "Condition":
        keys = set(keys)
        return Condition({k: v for k, v in self.items if k in keys})

    def cells(self) -> list:
        return [(k[0], k[1], v) for k, v in self.items]

    def to_json(self) -> dict:
        if all(isinstance(k, tuple) and len(k) == 2 for k, _ in self.items):
            return {"cells": [[k[0], k[1], v] for k, v in self.items]}
        return {"map": [[k, v] for k, v in self.items]}

    @classmethod
    def from_json(cls, d) -> "Condition":
        if isinstance(d, list):
            return cls.grid(d)
        if "cells" in d:
            return cls.grid(d["cells"])
        if "map" in d:
            return cls((k, v) for k, v in d["map"])
        raise PosetError(f"unrecognised condition JSON {d!r}")


EMPTY_CONDITION = Condition()


# --------------------------------------------------------------- posets

class Poset:
    """Base class.  Subclasses define membership, order and enumeration."""

    finite = True
    kind = "abstract"

    def contains(self, p) -> bool:
        raise NotImplementedError

    def le(self, p, q) -> bool:
        raise NotImplementedError

    def _check(self, *ps):
        for p in ps:
            if not self.contains(p):
                raise PosetError(f"{p!r} is not a condition of {self.describe()}")

    def compatible(self, p, q):
        """Least common extension of p and q, or None when p and q clash."""
        raise NotImplementedError

    def is_compatible(self, p, q) -> bool:
        return self.compatible(p, q) is not None

    def describe(self) -> str:
        return self.kind

    @property
    def bottom(self):
        raise NotImplementedError

    def elements(self) -> tuple:
        raise InfinitePosetError(f"{self.describe()} is infinite")

    @cached_property
    def index(self) -> dict:
        return {p: i for i, p in enumerate(self.elements())}

    @cached_property
    def up(self) -> np.ndarray:
        """up[i, j] is True when elements()[i] <= elements()[j]."""
        els = self.elements()
        n = len(els)
        out = np.zeros((n, n), dtype=bool)
        for i, p in enumerate(els):
            for j, q in enumerate(els):
                out[i, j] = self.le(p, q)
        return out

    def above(self, p) -> list:
        els = self.elements()
        row = self.up[self.index[p]]
        return [els[j] for j in np.flatnonzero(row)]

    def below(self, p) -> list:
        els = self.elements()
        col = self.up[:, self.index[p]]
        return [els[j] for j in np.flatnonzero(col)]

    def __len__(self):
        return len(self.elements())


class PartialFunctionPoset(Poset):
    """Finite partial maps from ``keys`` to values, ordered by inclusion."""

    injective = False

    def key_ok(self, k) -> bool:
        raise NotImplementedError

    def value_ok(self, k, v) -> bool:
        raise NotImplementedError

    def contains(self, p) -> bool:
        if not isinstance(p, Condition):
            return False
        if not all(self.key_ok(k) and self.value_ok(k, v) for k, v in p.items):
            return False
        if self.injective:
            vals = [v for _, v in p.items]
            return len(vals) == len(set(vals))
        return True

    def le(self, p, q) -> bool:
        self._check(p, q)
        return p.le(q)

    def compatible(self, p, q):
        self._check(p, q)
        if not p.agrees_with(q):
            return None
        w = p.union(q)
        if self.injective and not self.contains(w):
            return None
        return w

    @property
    def bottom(self):
        return EMPTY_CONDITION

    def sub_conditions(self, p) -> list:
        """All conditions below p."""
        items = p.items
        out = []
        for k in range(len(items) + 1):
            out.extend(Condition(c) for c in itertools.combinations(items, k))
        return out

    @cached_property
    def up(self) -> np.ndarray:
        els = self.elements()
        keys = sorted({k for p in els for k, _ in p.items}, key=_sort_key)
        col = {k: i for i, k in enumerate(keys)}
        vals = {}
        mat = np.full((len(els), len(keys)), -1, dtype=np.int64)
        for i, p in enumerate(els):
            for k, v in p.items:
                mat[i, col[k]] = vals.setdefault(v, len(vals))
        undefined = mat[:, None, :] == -1
        same = mat[:, None, :] == mat[None, :, :]
        return np.all(undefined | same, axis=2)


class FiniteGrid(PartialFunctionPoset):
    kind = "grid"

    def __init__(self, rows: int, cols: int):
        if rows < 0 or cols < 0:
            raise PosetError("grid dimensions must be non-negative")
        if 3 ** (rows * cols) > ENUMERATION_CAP:
            raise PosetError(f"FiniteGrid({rows},{cols}) has too many conditions to enumerate")
        self.rows, self.cols = rows, cols

    def __eq__(self, other):
        return isinstance(other, FiniteGrid) and (self.rows, self.cols) == (other.rows, other.cols)

    def __hash__(self):
        return hash(("grid", self.rows, self.cols))

    def __repr__(self):
        return f"FiniteGrid({self.rows}, {self.cols})"

    def describe(self):
        return repr(self)

    @property
    def cells(self):
        return [(r, c) for r in range(self.rows) for c in range(self.cols)]

    def key_ok(self, k):
        return isinstance(k, tuple) and len(k) == 2 and 0 <= k[0] < self.rows and 0 <= k[1] < self.cols

    def value_ok(self, k, v):
        return v in (0, 1)

    def elements(self) -> tuple:
        if not hasattr(self, "_els"):
            cells = self.cells
            out = []
            for choice in itertools.product((None, 0, 1), repeat=len(cells)):
                out.append(Condition((c, b) for c, b in zip(cells, choice) if b is not None))
            out.sort(key=lambda p: (len(p), p.items))
            self._els = tuple(out)
        return self._els

    def to_json(self):
        return {"kind": "grid", "rows": self.rows, "cols": self.cols}


class InfiniteGrid(PartialFunctionPoset):
    """Rows 0..R-1 and columns ranging over all naturals."""

    kind = "grid"
    finite = False

    def __init__(self, rows: int):
        if rows < 0:
            raise PosetError("row count must be non-negative")
        self.rows = rows

    def __eq__(self, other):
        return isinstance(other, InfiniteGrid) and self.rows == other.rows

    def __hash__(self):
        return hash(("grid-omega", self.rows))

    def __repr__(self):
        return f"InfiniteGrid({self.rows})"

    def describe(self):
        return repr(self)

    def key_ok(self, k):
        return isinstance(k, tuple) and len(k) == 2 and 0 <= k[0] < self.rows and isinstance(k[1], int) and k[1] >= 0

    def value_ok(self, k, v):
        return v in (0, 1)

    def random_condition(self, rng, width: int = 6, density: float = 0.4) -> Condition:
        cells = []
        for r in range(self.rows):
            for c in range(width):
                if rng.random() < density:
                    cells.append(((r, c), int(rng.integers(0, 2))))
        return Condition(cells)

    def to_json(self):
        return {"kind": "grid", "rows": self.rows, "cols": "omega"}


class Collapse(PartialFunctionPoset):
    """Finite partial injections from A to B."""

    kind = "collapse"
    injective = True

    def __init__(self, domain: Sequence, codomain: Sequence):
        self.A = tuple(domain)
        self.B = tuple(codomain)
        self._A = set(self.A)
        self._B = set(self.B)

    def __eq__(self, other):
        return isinstance(other, Collapse) and (self.A, self.B) == (other.A, other.B)

    def __hash__(self):
        return hash(("collapse", self.A, self.B))

    def __repr__(self):
        return f"Collapse({list(self.A)!r}, {list(self.B)!r})"

    def describe(self):
        return repr(self)

    def key_ok(self, k):
        return k in self._A

    def value_ok(self, k, v):
        return v in self._B

    def elements(self) -> tuple:
        if not hasattr(self, "_els"):
            out = []
            for k in range(min(len(self.A), len(self.B)) + 1):
                for dom in itertools.combinations(self.A, k):
                    for img in itertools.permutations(self.B, k):
                        out.append(Condition(zip(dom, img)))
                        if len(out) > ENUMERATION_CAP:
                            raise PosetError("collapse poset too large to enumerate")
            out.sort(key=lambda p: (len(p), tuple(_sort_key(kv) for kv in p.items)))
            self._els = tuple(out)
        return self._els

    def to_json(self):
        return {"kind": "collapse", "domain": list(self.A), "range": list(self.B)}


class Explicit(Poset):
    """A finite poset given by its elements and generating order pairs (p, q) meaning p <= q."""

    kind = "explicit"

    def __init__(self, elements: Sequence, order: Iterable = ()):
        self._els = tuple(dict.fromkeys(elements))
        idx = {p: i for i, p in enumerate(self._els)}
        n = len(self._els)
        m = np.eye(n, dtype=bool)
        self.pairs = []
        for p, q in order:
            if p not in idx or q not in idx:
                raise PosetError(f"order pair ({p!r}, {q!r}) mentions an unknown element")
            m[idx[p], idx[q]] = True
            self.pairs.append((p, q))
        for k in range(n):
            m |= m[:, [k]] & m[[k], :]
        if (m & m.T & ~np.eye(n, dtype=bool)).any():
            raise PosetError("order is not antisymmetric")
        self.__dict__["up"] = m
        self.__dict__["index"] = idx

    def __repr__(self):
        return f"Explicit({list(self._els)!r})"

    def contains(self, p):
        try:
            return p in self.index
        except TypeError:
            return False

    def elements(self):
        return self._els

    def le(self, p, q):
        self._check(p, q)
        return bool(self.up[self.index[p], self.index[q]])

    def compatible(self, p, q):
        self._check(p, q)
        both = self.up[self.index[p]] & self.up[self.index[q]]
        cands = np.flatnonzero(both)
        if not len(cands):
            return None
        # least upper bound when there is one, else the first minimal bound
        for c in cands:
            if all(self.up[c, d] for d in cands):
                return self._els[c]
        for c in cands:
            if not any(self.up[d, c] and d != c for d in cands):
                return self._els[c]
        return self._els[cands[0]]

    @property
    def bottom(self):
        for i, p in enumerate(self._els):
            if self.up[i].all():
                return p
        raise PosetError("poset has no least element")

    def to_json(self):
        return {"kind": "explicit", "elements": list(self._els), "order": [list(pq) for pq in self.pairs]}


def poset_from_json(d) -> Poset:
    kind = d.get("kind")
    if kind == "grid":
        cols = d.get("cols")
        if cols in ("omega", "w", "ω", None):
            return InfiniteGrid(int(d["rows"]))
        return FiniteGrid(int(d["rows"]), int(cols))
    if kind == "collapse":
        return Collapse(d["domain"], d["range"])
    if kind == "explicit":
        return Explicit(d["elements"], [tuple(x) for x in d.get("order", [])])
    raise PosetError(f"unknown poset kind {kind!r}")


def compatible(p, q, P: Poset | None = None):
    """Least common extension of p and q, or None."""
    if P is not None:
        return P.compatible(p, q)
    if not p.agrees_with(q):
        return None
    return p.union(q)


def maximal_elements(P: Poset) -> list:
    if not P.finite:
        raise InfinitePosetError(f"{P.describe()} has no finite list of maximal elements")
    els = P.elements()
    up = P.up
    strict = up & ~np.eye(len(els), dtype=bool)
    return [els[i] for i in range(len(els)) if not strict[i].any()]


# --------------------------------------------------------------- ideals

class Ideal:
    """A downward closed, directed set of conditions.

    Either an explicit finite member set or the ideal generated by an
    increasing chain, in which case membership means lying below the last
    link.
    """

    def __init__(self, poset: Poset, members: Iterable | None = None, chain: Sequence | None = None):
        self.poset = poset
        self.chain = tuple(chain) if chain is not None else None
        self._members = frozenset(members) if members is not None else None
        if self._members is None and self.chain is None:
            raise PosetError("an ideal needs members or a generating chain")

    def __contains__(self, p) -> bool:
        if self._members is not None:
            return p in self._members
        if not self.chain:
            return False
        return self.poset.contains(p) and self.poset.le(p, self.chain[-1])

    def members(self) -> frozenset:
        if self._members is None:
            if not self.chain:
                self._members = frozenset()
            elif isinstance(self.poset, PartialFunctionPoset):
                self._members = frozenset(self.poset.sub_conditions(self.chain[-1]))
            else:
                self._members = frozenset(self.poset.below(self.chain[-1]))
        return self._members

    def __iter__(self):
        return iter(sorted(self.members(), key=lambda p: (len(p), repr(p)) if isinstance(p, Condition) else (0, repr(p))))

    def __len__(self):
        return len(self.members())

    @property
    def top(self):
        if self.chain:
            return self.chain[-1]
        return None

    def union_map(self) -> dict:
        """The function given by the union of a partial-function ideal."""
        out = {}
        src = [self.chain[-1]] if self.chain else self.members()
        for p in src:
            out.update(p.as_dict())
        return out


def downward_closure(P: Poset, gens: Iterable) -> Ideal:
    out = set()
    for g in gens:
        P._check(g)
        if isinstance(P, PartialFunctionPoset):
            out.update(P.sub_conditions(g))
        else:
            out.update(P.below(g))
    return Ideal(P, members=out)


def principal_ideal(P: Poset, m) -> Ideal:
    return downward_closure(P, [m])


@dataclass(frozen=True)
class Verdict:
    ok: bool
    reason: str = ""
    witness: tuple | None = None

    def __bool__(self):
        return self.ok


def _members_of(G):
    return list(G.members()) if isinstance(G, Ideal) else list(G)


def is_ideal(G, P: Poset) -> Verdict:
    """Both clauses: directed with the witness inside G, and downward closed."""
    ms = _members_of(G)
    mset = set(ms)
    for p in ms:
        if not P.contains(p):
            return Verdict(False, "not a condition", (p,))
    for p, q in itertools.combinations(ms, 2):
        if not any(P.le(p, r) and P.le(q, r) for r in ms):
            return Verdict(False, "no common extension inside the set", (p, q))
    for q in ms:
        below = P.sub_conditions(q) if isinstance(P, PartialFunctionPoset) else P.below(q)
        for p in below:
            if p not in mset:
                return Verdict(False, "not downward closed", (p, q))
    return Verdict(True, "ideal")


def is_maximal_ideal(G, P: Poset) -> Verdict:
    v = is_ideal(G, P)
    if not v:
        return v
    ms = _members_of(G)
    mset = set(ms)
    for p in P.elements():
        if p in mset:
            continue
        if not any(not P.is_compatible(p, q) for q in ms):
            return Verdict(False, "can be enlarged", (p,))
    return Verdict(True, "maximal ideal")


# ----------------------------------------------------------- dense sets

@dataclass(frozen=True)
class DenseSpec:
    """A dense set given by a membership test and an extension finder.

    ``finder(q)`` returns some r >= q with ``test(r)``, or None.
    """
    name: str
    test: Callable = field(compare=False)
    finder: Callable = field(compare=False)


def _fresh_col(p: Condition, rows) -> int:
    used = [k[1] for k, _ in p.items if k[0] in rows]
    return 1 + max(used, default=-1)


def _fits(P, r):
    return r if r is not None and P.contains(r) else None


def cell_defined(row: int, col: int, P: Poset | None = None, default: int = 0) -> DenseSpec:
    cell = (row, col)

    def test(p):
        return cell in p

    def finder(q):
        if cell in q:
            return q
        r = q.extend({cell: default})
        return r if P is None else _fits(P, r)

    return DenseSpec(f"cell ({row},{col}) defined", test, finder)


def _row(p, a):
    return {k[1]: v for k, v in p.items if k[0] == a}


def rows_differ(a: int, b: int, P: Poset | None = None) -> DenseSpec:
    def test(p):
        ra, rb = _row(p, a), _row(p, b)
        return any(c in rb and rb[c] != v for c, v in ra.items())

    def finder(q):
        if test(q):
            return q
        if isinstance(P, FiniteGrid):
            for c in range(P.cols):
                va, vb = q.get((a, c)), q.get((b, c))
                if va is None and vb is None:
                    return q.extend({(a, c): 0, (b, c): 1})
                if va is None:
                    return q.extend({(a, c): 1 - vb})
                if vb is None:
                    return q.extend({(b, c): 1 - va})
            return None
        c = _fresh_col(q, (a, b))
        return q.extend({(a, c): 0, (b, c): 1})

    return DenseSpec(f"rows {a},{b} differ", test, finder)


def _as_indicator(s):
    if callable(s):
        return s
    members = frozenset(s)
    return lambda n: 1 if n in members else 0


def row_differs_from(row: int, subset, label: str = "", P: Poset | None = None) -> DenseSpec:
    """Row ``row`` differs, somewhere on its domain, from the indicator of ``subset``."""
    chi = _as_indicator(subset)

    def test(p):
        return any(v != chi(c) for c, v in _row(p, row).items())

    def finder(q):
        if test(q):
            return q
        if isinstance(P, FiniteGrid):
            for c in range(P.cols):
                if (row, c) not in q:
                    return q.extend({(row, c): 1 - chi(c)})
            return None
        c = _fresh_col(q, (row,))
        return q.extend({(row, c): 1 - chi(c)})

    return DenseSpec(f"row {row} differs from {label or 'a ground subset'}", test, finder)


def incompatible_with_some(H: Iterable, P: Poset) -> DenseSpec:
    """D_H: conditions incompatible with some member of H."""
    H = list(H)

    def test(p):
        return any(not P.is_compatible(p, h) for h in H)

    def finder(q):
        if test(q):
            return q
        if isinstance(P, PartialFunctionPoset):
            for h in H:
                for k, v in h.items:
                    if k not in q:
                        if P.kind == "grid":
                            r = q.extend({k: 1 - v})
                            if P.contains(r):
                                return r
                        else:
                            for other in getattr(P, "B", ()):
                                if other != v:
                                    r = q.extend({k: other})
                                    if P.contains(r):
                                        return r
            return None
        for r in P.above(q):
            if test(r):
                return r
        return None

    return DenseSpec("incompatible with some member of H", test, finder)


def maximal_set(P: Poset) -> DenseSpec:
    maxi = set(maximal_elements(P))

    def finder(q):
        for r in P.above(q):
            if r in maxi:
                return r
        return None

    return DenseSpec("maximal elements", lambda p: p in maxi, finder)


def in_domain(a, P: Collapse) -> DenseSpec:
    def test(p):
        return a in p

    def finder(q):
        if a in q:
            return q
        used = {v for _, v in q.items}
        for b in P.B:
            if b not in used:
                return q.extend({a: b})
        return None

    return DenseSpec(f"{a!r} in domain", test, finder)


def in_range(b, P: Collapse) -> DenseSpec:
    def test(p):
        return any(v == b for _, v in p.items)

    def finder(q):
        if test(q):
            return q
        for a in P.A:
            if a not in q:
                return q.extend({a: b})
        return None

    return DenseSpec(f"{b!r} in range", test, finder)


@dataclass(frozen=True)
class DensityVerdict:
    dense: bool
    exhaustive: bool
    checked: int
    counterexample: object = None

    def __bool__(self):
        return self.dense


def is_dense(D: DenseSpec, P: Poset, budget: int = 200, seed: int = 0) -> DensityVerdict:
    """Exhaustive on finite posets; finder-based spot check on infinite ones."""
    if P.finite:
        els = P.elements()
        inD = np.array([bool(D.test(p)) for p in els])
        reach = _kernels.exists_above(P.up, inD)
        bad = np.flatnonzero(~reach)
        return DensityVerdict(not len(bad), True, len(els), els[bad[0]] if len(bad) else None)
    rng = np.random.default_rng(seed)
    samples = [EMPTY_CONDITION] + [P.random_condition(rng) for _ in range(max(budget - 1, 0))]
    for q in samples:
        r = D.finder(q)
        if r is None or not P.contains(r) or not P.le(q, r) or not D.test(r):
            return DensityVerdict(False, False, len(samples), q)
    return DensityVerdict(True, False, len(samples))


def construct_generic(P: Poset, family: Sequence, seed=None) -> Ideal:
    """Meet each listed dense set in turn along an increasing chain."""
    p = P.bottom if seed is None else seed
    P._check(p)
    chain = [p]
    for D in family:
        r = D.finder(chain[-1])
        if r is None or not P.contains(r) or not P.le(chain[-1], r) or not D.test(r):
            raise FinderFailure(f"finder for {D.name!r} failed above {chain[-1]!r}")
        chain.append(r)
    ideal = Ideal(P, chain=chain)
    return ideal


def meets(G: Ideal, D: DenseSpec) -> bool:
    if G.chain:
        return any(D.test(p) for p in G.chain)
    return any(D.test(p) for p in G.members())


@dataclass(frozen=True)
class AtomReport:
    atoms: tuple
    atomless: bool
    separative: bool
    exhaustive: bool


def separative_and_atoms(P: Poset, samples: int = 100, seed: int = 0) -> AtomReport:
    """Atoms are conditions all of whose extensions are pairwise compatible."""
    if P.finite:
        els = P.elements()
        up = P.up
        atoms = []
        for i, p in enumerate(els):
            ext = [els[j] for j in np.flatnonzero(up[i])]
            if all(P.is_compatible(a, b) for a, b in itertools.combinations(ext, 2)):
                atoms.append(p)
        sep = not (up & up.T & ~np.eye(len(els), dtype=bool)).any()
        return AtomReport(tuple(atoms), not atoms, sep, True)
    # InfiniteGrid: any p splits on a fresh column
    rng = np.random.default_rng(seed)
    for _ in range(samples):
        p = P.random_condition(rng)
        q, r = split(p, P)
        if P.is_compatible(q, r) or not (P.le(p, q) and P.le(p, r)):
            return AtomReport((p,), False, True, False)
    return AtomReport((), True, True, False)


def split(p: Condition, P: InfiniteGrid) -> tuple:
    """Two incompatible extensions of p on a fresh column."""
    c = _fresh_col(p, range(P.rows))
    return p.extend({(0, c): 0}), p.extend({(0, c): 1})


@dataclass(frozen=True)
class GroundVerdict:
    ok: bool
    dense: bool
    witness: tuple | None = None

    def __bool__(self):
        return self.ok


def not_in_ground_check(G: Ideal, H: Iterable, P: Poset | None = None, budget: int = 200) -> GroundVerdict:
    """Whether G contains a condition incompatible with some member of H."""
    P = P or G.poset
    H = list(H)
    if not H:
        return GroundVerdict(True, True)
    D = incompatible_with_some(H, P)
    dense = bool(is_dense(D, P, budget=budget))
    pool = list(G.chain) if G.chain else list(G.members())
    for p in pool:
        for h in H:
            if not P.is_compatible(p, h):
                return GroundVerdict(True, dense, (p, h))
    return GroundVerdict(False, dense)


# ---------------------------------------------------------- Delta systems

def find_delta_system(X: Iterable, m: int, root=None) -> tuple:
    """Brute-force search for m members of X pairwise meeting in one root.

    Returns (root, members) with members in input order.
    """
    fam = list(dict.fromkeys(frozenset(x) for x in X))
    if m > len(fam):
        raise NoDeltaSystem(f"family has only {len(fam)} members, need {m}")
    universe = sorted({e for x in fam for e in x}, key=_sort_key)
    bit = {e: i for i, e in enumerate(universe)}
    root_mask = -1
    if root is not None:
        root = frozenset(root)
        if not root <= set(universe):
            raise NoDeltaSystem("root mentions elements outside the family")
        root_mask = sum(1 << bit[e] for e in root)
    masks = [sum(1 << bit[e] for e in x) for x in fam]
    if len(universe) <= 62:
        idx = _kernels.delta_search(masks, m, root_mask)
    else:
        idx = _kernels.numpy_impl.delta_search(masks, m, root_mask)
    if len(idx) == 0:
        raise NoDeltaSystem(f"no Delta-system of size {m}")
    members = tuple(fam[i] for i in sorted(int(i) for i in idx))
    r = members[0] & members[1] if len(members) > 1 else members[0]
    assert all(a & b == r for a, b in itertools.combinations(members, 2))
    return r, members


def is_delta_system(Y, r) -> bool:
    Y = [frozenset(y) for y in Y]
    return all(a & b == frozenset(r) for a, b in itertools.combinations(Y, 2))


@dataclass(frozen=True)
class CompatiblePair:
    i: int
    j: int
    p: Condition
    q: Condition
    method: str


def find_compatible_pair(S: Sequence, value_count: int = 2) -> CompatiblePair:
    """Two entries of S with a common extension.

    Follows the counting argument: group by domain, find a Delta-system of
    domains whose size beats the number of maps root -> values, and take two
    members that agree on the root.  Falls back to scanning all pairs.
    """
    S = list(S)
    groups = {}
    for i, p in enumerate(S):
        groups.setdefault(p.domain, []).append(i)
    for dom, ids in groups.items():
        seen = {}
        for i in ids:
            if S[i] in seen:
                return CompatiblePair(seen[S[i]], i, S[seen[S[i]]], S[i], "pigeonhole on one domain")
            seen[S[i]] = i
    domains = list(groups)
    roots = sorted({a & b for a, b in itertools.combinations(domains, 2)}, key=lambda r: (len(r), sorted(map(_sort_key, r))))
    for r in roots:
        bound = value_count ** len(r) + 1
        cands = [d for d in domains if r <= d]
        if len(cands) < bound:
            continue
        try:
            _, Y = find_delta_system(cands, bound, root=r)
        except NoDeltaSystem:
            continue
        by_restriction = {}
        for d in Y:
            i = groups[d][0]
            key = S[i].restrict(r)
            if key in by_restriction:
                j = by_restriction[key]
                return CompatiblePair(j, i, S[j], S[i], "Delta-system and pigeonhole on the root")
            by_restriction[key] = i
    for i, j in itertools.combinations(range(len(S)), 2):
        if S[i].agrees_with(S[j]):
            return CompatiblePair(i, j, S[i], S[j], "exhaustive scan")
    raise AntichainError(f"the {len(S)} conditions form an antichain")


def chain_union_in(P: Poset, chain: Sequence) -> bool:
    """An explicitly given increasing chain has its union in P."""
    if not chain:
        return True
    for a, b in zip(chain, chain[1:]):
        if not P.le(a, b):
            return False
    u = chain[0]
    for c in chain[1:]:
        u = u.union(c)
    return P.contains(u)
