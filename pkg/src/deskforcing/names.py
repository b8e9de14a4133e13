"""P-names: hereditarily finite sets of (name, condition) pairs.

Name equality is structural.  Two different names may evaluate to the same
set under an ideal, and that identification only happens in
:func:`eval_name`.
"""
from __future__ import annotations

import json
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import _kernels
from .errors import BudgetExceeded, DomainError, InfinitePosetError, PosetError
from .forcing import Collapse, Condition, Ideal, Poset, poset_from_json
from .hf import HFSet, encode_value, von_neumann
from .logic import Structure


def _cond_key(p):
    if isinstance(p, Condition):
        return (1, repr(p.items))
    return (0, repr(p))


class PName:
    __slots__ = ("pairs", "_hash", "_rank", "_key")

    def __init__(self, pairs: Iterable = ()):
        ps = frozenset((s, p) for s, p in pairs)
        for s, _ in ps:
            if not isinstance(s, PName):
                raise TypeError(f"name members must be PName, got {type(s).__name__}")
        self.pairs = ps
        self._hash = hash(ps)
        self._rank = None
        self._key = None

    def __eq__(self, other):
        if self is other:
            return True
        return isinstance(other, PName) and self._hash == other._hash and self.pairs == other.pairs

    def __hash__(self):
        return self._hash

    def __len__(self):
        return len(self.pairs)

    def __iter__(self):
        return iter(sorted(self.pairs, key=lambda sp: (sp[0].key(), _cond_key(sp[1]))))

    def __repr__(self):
        if not self.pairs:
            return "PName()"
        return f"PName(<{len(self.pairs)} pairs, rank {self.rank()}>)"

    def rank(self) -> int:
        if self._rank is None:
            self._rank = 1 + max((s.rank() for s, _ in self.pairs), default=-1) if self.pairs else 0
        return self._rank

    def key(self) -> tuple:
        """Deterministic sort key: rank first, then the sorted member keys."""
        if self._key is None:
            inner = tuple(sorted((s.key(), _cond_key(p)) for s, p in self.pairs))
            self._key = (self.rank(), inner)
        return self._key

    def domain(self) -> list:
        return sorted({s for s, _ in self.pairs}, key=PName.key)

    def tags(self, sigma: "PName") -> frozenset:
        return frozenset(p for s, p in self.pairs if s == sigma)

    def conditions(self) -> set:
        out = set()
        for s, p in self.pairs:
            out.add(p)
            out |= s.conditions()
        return out

    def subnames(self) -> list:
        """This name and every name hereditarily inside it, members first."""
        seen = {}

        def walk(t):
            if t in seen:
                return
            for s in t.domain():
                walk(s)
            seen[t] = None

        walk(self)
        return list(seen)


EMPTY_NAME = PName()


def name_rank(t: PName) -> int:
    return t.rank()


def _check_finite(P: Poset, what: str):
    if not P.finite:
        raise InfinitePosetError(f"{what} needs a finite poset, got {P.describe()}")


def saturate(t: PName, P: Poset, _memo=None) -> PName:
    """Add (s, q) for every q above p whenever (s, p) is present, recursively."""
    _check_finite(P, "saturate")
    memo = {} if _memo is None else _memo
    if t in memo:
        return memo[t]
    out = set()
    for s, p in t.pairs:
        s2 = saturate(s, P, memo)
        for q in P.above(p):
            out.add((s2, q))
    r = PName(out)
    memo[t] = r
    return r


def is_saturated(t: PName, P: Poset) -> bool:
    return saturate(t, P) == t


def eval_name(t: PName, G, memo: dict | None = None) -> HFSet:
    """{s^G : (s, p) in t for some p in G}.

    ``G`` is anything supporting ``in`` (an Ideal, a set of conditions).
    """
    memo = {} if memo is None else memo
    return _eval(t, G, memo)


def _eval(t, G, memo):
    v = memo.get(t)
    if v is None:
        pick = {}
        inside = {}
        for s, p in t.pairs:
            if s in pick:
                continue
            ok = inside.get(p)
            if ok is None:
                ok = inside[p] = p in G
            if ok:
                pick[s] = True
        v = HFSet(_eval(s, G, memo) for s in pick)
        memo[t] = v
    return v


_CANON = {}


def canonical_name(x: HFSet, P: Poset) -> PName:
    """The name tagging every member by every condition.

    On an infinite poset the members are tagged by the least condition only,
    which evaluates the same way under every nonempty ideal.
    """
    tags = tuple(P.elements()) if P.finite else (P.bottom,)
    return _canon(x, tags)


def _canon(x: HFSet, tags: tuple) -> PName:
    key = (x, tags)
    t = _CANON.get(key)
    if t is None:
        t = PName((_canon(y, tags), p) for y in x.members for p in tags)
        if len(_CANON) > 50_000:
            _CANON.clear()
        _CANON[key] = t
    return t


def _atom(v, pos):
    if isinstance(v, (int, HFSet)) and not isinstance(v, bool):
        return v
    if pos is not None and v in pos:
        return pos[v]
    raise DomainError(f"cannot encode {v!r} as an HF set")


def encode_condition(p, P: Poset | None = None) -> HFSet:
    """HF encoding of a condition.

    Grid conditions become sets of (row, col, bit) triples, collapse
    conditions sets of (a, b) pairs (by position when not integers), and
    elements of an explicit poset their index as a numeral.
    """
    if isinstance(p, Condition):
        apos = bpos = None
        if isinstance(P, Collapse):
            apos = {a: i for i, a in enumerate(P.A)}
            bpos = {b: i for i, b in enumerate(P.B)}
        out = []
        for k, v in p.items:
            ks = k if isinstance(k, tuple) else (k,)
            if apos is not None:
                ks = (_atom(ks[0], apos),)
            else:
                ks = tuple(_atom(a, None) for a in ks)
            out.append(encode_value(ks + (_atom(v, bpos),)))
        return HFSet(out)
    if P is None:
        raise DomainError("encoding an abstract condition needs its poset")
    return von_neumann(P.index[p])


def encode_ideal(G, P: Poset | None = None) -> HFSet:
    members = G.members() if isinstance(G, Ideal) else G
    return HFSet(encode_condition(p, P) for p in members)


def gamma_name(P: Poset) -> PName:
    """{(check p, p) : p in P}, whose value under G is G itself."""
    _check_finite(P, "the generic-ideal name")
    return PName((canonical_name(encode_condition(p, P), P), p) for p in P.elements())


def up_sets(P: Poset, within=None, limit: int | None = None):
    """Yield every up-closed subset of P (as a boolean vector), optionally inside ``within``.

    Up-sets are generated from their antichains of minimal elements.
    """
    _check_finite(P, "up-set enumeration")
    up = P.up
    n = len(up)
    allowed = np.ones(n, dtype=bool) if within is None else np.asarray(within, dtype=bool).copy()
    # a minimal element must have its whole cone inside the allowed region
    ok = _kernels.forall_above(up, allowed)
    comparable = up | up.T
    count = 0

    def rec(start, current, blocked):
        nonlocal count
        count += 1
        if limit is not None and count > limit:
            raise BudgetExceeded(f"more than {limit} up-sets")
        yield current
        for i in range(start, n):
            if ok[i] and not blocked[i]:
                yield from rec(i + 1, current | up[i], blocked | comparable[i])

    yield from rec(0, np.zeros(n, dtype=bool), np.zeros(n, dtype=bool))


def name_universe(P: Poset, seeds: Sequence = (), extras: Sequence = (), k: int = 2,
                  budget: int = 200, include_gamma: bool = True) -> list:
    """A finite, sub-name closed list of names for quantifiers to range over.

    Always present: the empty name, canonical names of the seeds, every
    extra, and Gamma when its rank is at most k, each with all its
    sub-names.  The rest of the budget is filled, in this order, with
    {(empty, U)} for each nonempty up-set U, then {(s, cone of p)} for
    s already listed of rank below k.
    """
    _check_finite(P, "a name universe")
    els = P.elements()
    out = {}

    def add(t, required):
        if t in out:
            return True
        if len(out) >= budget:
            if required:
                raise BudgetExceeded(f"required names exceed the budget of {budget}")
            return False
        out[t] = None
        return True

    def add_closed(t):
        for s in t.subnames():
            add(s, True)

    add(EMPTY_NAME, True)
    for x in seeds:
        add_closed(canonical_name(x, P))
    for t in extras:
        add_closed(t)
    if include_gamma:
        g = gamma_name(P)
        if g.rank() <= k:
            add_closed(g)
    if k >= 1:
        try:
            for mask in up_sets(P, limit=4 * budget + 16):
                if not mask.any():
                    continue
                t = PName((EMPTY_NAME, els[i]) for i in np.flatnonzero(mask))
                if not add(t, False):
                    break
        except BudgetExceeded:
            pass
    for level in range(2, k + 1):
        base = [t for t in out if t.rank() == level - 1]
        for s in base:
            for p in els:
                t = PName((s, q) for q in P.above(p))
                if not add(t, False):
                    break
            if len(out) >= budget:
                break
    return sorted(out, key=PName.key)


def mg_structure(U: Iterable, G) -> tuple:
    """The structure of distinct values of U under G, with each name's node."""
    memo = {}
    vals = {t: eval_name(t, G, memo) for t in U}
    s = Structure.from_hfsets(vals.values())
    node = {t: s.node_for(v) for t, v in vals.items()}
    return s, node


def mg_universe(U: Iterable, G) -> Structure:
    """Nodes are the distinct values of the names in U, edges true membership."""
    return mg_structure(U, G)[0]


# ---------------------------------------------------------------- JSON

def _cond_to_json(p):
    return p.to_json() if isinstance(p, Condition) else p


def names_to_json(table: Mapping, P: Poset | None = None) -> dict:
    """Serialise named PNames with a shared table of sub-names.

    Anonymous sub-names get generated labels.
    """
    label = {t: n for n, t in table.items()}
    label.setdefault(EMPTY_NAME, "empty")
    order = []
    for t in table.values():
        for s in t.subnames():
            if s not in order:
                order.append(s)
    fresh = 0
    for s in order:
        if s not in label:
            while f"n{fresh}" in table:
                fresh += 1
            label[s] = f"n{fresh}"
            fresh += 1
    names = {}
    for s in order:
        if s == EMPTY_NAME and label[s] == "empty":
            continue
        names[label[s]] = {"pairs": [[label[a], _cond_to_json(p)] for a, p in s]}
    d = {"names": names}
    if P is not None and hasattr(P, "to_json"):
        d["poset"] = P.to_json()
    return d


def _cond_from_json(v, conds, P):
    if isinstance(v, str) and v in conds:
        return conds[v]
    if isinstance(v, (dict, list)):
        return Condition.from_json(v)
    if P is not None and P.contains(v):
        return v
    if isinstance(v, str) and P is None:
        return v
    raise PosetError(f"unknown condition reference {v!r}")


def names_from_json(d: Mapping) -> tuple:
    """Returns (names table, poset or None, conditions table)."""
    P = poset_from_json(d["poset"]) if "poset" in d else None
    conds = {k: _cond_from_json(v, {}, P) for k, v in (d.get("conditions") or {}).items()}
    raw = d.get("names") or {}
    table = {"empty": EMPTY_NAME}
    busy = set()

    def build(ref):
        if ref in table:
            return table[ref]
        if ref not in raw:
            raise DomainError(f"unknown name reference {ref!r}")
        if ref in busy:
            raise DomainError(f"name {ref!r} refers to itself")
        busy.add(ref)
        entry = raw[ref]
        pairs = entry["pairs"] if isinstance(entry, dict) else entry
        t = PName((build(a), _cond_from_json(p, conds, P)) for a, p in pairs)
        busy.discard(ref)
        table[ref] = t
        return t

    for ref in raw:
        build(ref)
    return table, P, conds


def load_names(path) -> tuple:
    with open(path) as fh:
        return names_from_json(json.load(fh))


def tau_example() -> tuple:
    """The worked example: a poset with 0 below p, q, r and p below r, and five names.

    Returns (poset, {"o", "pi", "rho", "sigma", "tau"}).
    """
    from .forcing import Explicit

    P = Explicit(["0", "p", "q", "r"], [("0", "p"), ("0", "q"), ("0", "r"), ("p", "r")])
    o = PName([(EMPTY_NAME, "p")])
    pi = PName([(o, "q"), (o, "p")])
    rho = PName([(o, "q")])
    sigma = PName([(pi, "r"), (rho, "q")])
    tau = PName([(sigma, "p"), (rho, "q"), (pi, "r"), (pi, "q")])
    return P, {"o": o, "pi": pi, "rho": rho, "sigma": sigma, "tau": tau}

