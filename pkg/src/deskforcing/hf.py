"""Hereditarily finite sets.

An ``HFSet`` is an immutable, extensional set whose members are again
``HFSet`` values.  Sets are compared by members and ordered canonically:
first by rank, then lexicographically on their members listed in canonical
order.
"""
from __future__ import annotations

from itertools import combinations
from typing import Iterable

from .errors import HFSyntaxError, NotAPair, StageTooLarge

MAX_STAGE = 5


class HFSet:
    __slots__ = ("_members", "_hash", "_rank", "_key", "_sorted")

    def __init__(self, members: Iterable["HFSet"] = ()):
        ms = frozenset(members)
        for m in ms:
            if not isinstance(m, HFSet):
                raise TypeError(f"HFSet members must be HFSet, got {type(m).__name__}")
        self._members = ms
        self._hash = hash(ms)
        self._rank = None
        self._key = None
        self._sorted = None

    @property
    def members(self) -> frozenset:
        return self._members

    def __iter__(self):
        return iter(self.sorted_members())

    def __len__(self):
        return len(self._members)

    def __contains__(self, item):
        return item in self._members

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, HFSet):
            return NotImplemented
        return self._hash == other._hash and self._members == other._members

    def __hash__(self):
        return self._hash

    def __lt__(self, other):
        return self.key() < other.key()

    def __le__(self, other):
        return self.key() <= other.key()

    def __gt__(self, other):
        return self.key() > other.key()

    def __ge__(self, other):
        return self.key() >= other.key()

    def __repr__(self):
        return f"HFSet({format_hf(self, numerals=True)!r})"

    def __str__(self):
        return format_hf(self)

    def rank(self) -> int:
        if self._rank is None:
            self._rank = 1 + max((m.rank() for m in self._members), default=-1)
        return self._rank

    def key(self) -> tuple:
        """Sort key realising the canonical order."""
        if self._key is None:
            self._key = (self.rank(), tuple(m.key() for m in self.sorted_members()))
        return self._key

    def sorted_members(self) -> tuple:
        if self._sorted is None:
            self._sorted = tuple(sorted(self._members, key=HFSet.key))
        return self._sorted

    def is_subset(self, other: "HFSet") -> bool:
        return self._members <= other._members

    def union(self, other: "HFSet") -> "HFSet":
        return HFSet(self._members | other._members)

    def with_member(self, x: "HFSet") -> "HFSet":
        return HFSet(self._members | {x})

    def big_union(self) -> "HFSet":
        out = set()
        for m in self._members:
            out |= m._members
        return HFSet(out)

    def as_natural(self):
        """Return n if this set is the von Neumann numeral n, else None."""
        n = len(self._members)
        if self._members == _numeral_members(n):
            return n
        return None


EMPTY = HFSet()

_NUMERALS = [EMPTY]


def von_neumann(n: int) -> HFSet:
    if n < 0:
        raise ValueError("von Neumann numerals are defined for n >= 0")
    while len(_NUMERALS) <= n:
        last = _NUMERALS[-1]
        _NUMERALS.append(last.with_member(last))
    return _NUMERALS[n]


def _numeral_members(n):
    if n == 0:
        return frozenset()
    return frozenset(von_neumann(i) for i in range(n))


def rank(x: HFSet) -> int:
    return x.rank()


def canonical_key(x: HFSet) -> tuple:
    return x.key()


def canonical_sorted(xs: Iterable[HFSet]) -> list:
    return sorted(xs, key=HFSet.key)


def format_hf(x: HFSet, numerals: bool = False) -> str:
    if numerals:
        n = x.as_natural()
        if n is not None:
            return str(n)
    return "{" + ",".join(format_hf(m, numerals) for m in x.sorted_members()) + "}"


def parse_hf(text: str) -> HFSet:
    """Parse brace notation; bare digits denote von Neumann numerals."""
    s = "".join(text.split())
    if not s:
        raise HFSyntaxError("empty input")
    value, pos = _parse_at(s, 0)
    if pos != len(s):
        raise HFSyntaxError(f"trailing input at position {pos}")
    return value


def _parse_at(s, pos):
    if pos >= len(s):
        raise HFSyntaxError(f"unexpected end of input at position {pos}")
    ch = s[pos]
    if ch.isdigit():
        end = pos
        while end < len(s) and s[end].isdigit():
            end += 1
        n = int(s[pos:end])
        if n > 64:
            raise HFSyntaxError(f"numeral {n} too large")
        return von_neumann(n), end
    if ch != "{":
        raise HFSyntaxError(f"unexpected {ch!r} at position {pos}")
    pos += 1
    members = []
    if pos < len(s) and s[pos] == "}":
        return EMPTY, pos + 1
    while True:
        m, pos = _parse_at(s, pos)
        members.append(m)
        if pos >= len(s):
            raise HFSyntaxError("unbalanced braces")
        if s[pos] == ",":
            pos += 1
            continue
        if s[pos] == "}":
            return HFSet(members), pos + 1
        raise HFSyntaxError(f"unexpected {s[pos]!r} at position {pos}")


_STAGES: dict = {}


def v_stage(n: int) -> frozenset:
    """V_n, the sets of rank below n.  Only n <= 5 is materialised."""
    if n < 0:
        raise ValueError("stage index must be >= 0")
    if n > MAX_STAGE:
        raise StageTooLarge(f"V_{n} is too large to materialise (limit V_{MAX_STAGE})")
    if n not in _STAGES:
        if n == 0:
            _STAGES[0] = frozenset()
        else:
            prev = canonical_sorted(v_stage(n - 1))
            out = []
            for mask in range(1 << len(prev)):
                out.append(HFSet(prev[i] for i in range(len(prev)) if mask >> i & 1))
            _STAGES[n] = frozenset(out)
    return _STAGES[n]


def transitive_closure(x: HFSet) -> frozenset:
    seen = set()
    stack = list(x.members)
    while stack:
        y = stack.pop()
        if y not in seen:
            seen.add(y)
            stack.extend(y.members)
    return frozenset(seen)


def is_transitive(s) -> bool:
    """True when every member of a member of ``s`` is a member of ``s``.

    ``s`` may be an HFSet or any iterable of HFSets.
    """
    pool = s.members if isinstance(s, HFSet) else frozenset(s)
    return all(y in pool for x in pool for y in x.members)


def powerset(x: HFSet) -> HFSet:
    ms = x.sorted_members()
    out = []
    for k in range(len(ms) + 1):
        out.extend(HFSet(c) for c in combinations(ms, k))
    return HFSet(out)


def singleton(x: HFSet) -> HFSet:
    return HFSet((x,))


def unordered_pair(x: HFSet, y: HFSet) -> HFSet:
    return HFSet((x, y))


def encode_pair(x: HFSet, y: HFSet) -> HFSet:
    """Kuratowski pair {{x},{x,y}}."""
    return HFSet((singleton(x), unordered_pair(x, y)))


def decode_pair(z: HFSet) -> tuple:
    ms = z.members
    if not 1 <= len(ms) <= 2:
        raise NotAPair(f"{format_hf(z)} is not an ordered pair")
    singles = [m for m in ms if len(m) == 1]
    if len(ms) == 1:
        (m,) = ms
        if len(m) != 1:
            raise NotAPair(f"{format_hf(z)} is not an ordered pair")
        (x,) = m.members
        return x, x
    if len(singles) != 1:
        raise NotAPair(f"{format_hf(z)} is not an ordered pair")
    (x,) = singles[0].members
    other = next(m for m in ms if len(m) != 1)
    if len(other) != 2 or x not in other:
        raise NotAPair(f"{format_hf(z)} is not an ordered pair")
    (y,) = other.members - {x}
    return x, y


def encode_value(v) -> HFSet:
    """Encode an int, an HFSet or a nested tuple of those as an HF set.

    Tuples become right-nested Kuratowski pairs, so (a, b, c) is (a, (b, c)).
    """
    if isinstance(v, HFSet):
        return v
    if isinstance(v, bool):
        return von_neumann(int(v))
    if isinstance(v, int):
        return von_neumann(v)
    if isinstance(v, tuple):
        if len(v) == 1:
            return encode_value(v[0])
        if len(v) == 2:
            return encode_pair(encode_value(v[0]), encode_value(v[1]))
        return encode_pair(encode_value(v[0]), encode_value(v[1:]))
    raise TypeError(f"cannot encode {v!r} as an HF set")
