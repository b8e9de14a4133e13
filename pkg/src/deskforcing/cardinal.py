"""Symbolic cardinal arithmetic over alephs indexed by ordinals.

Expressions are normalised with the standard absorption laws.  When two
infinite cardinals cannot be compared in ZFC alone the expression is left
symbolic rather than guessed.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import product as _cartesian

from .errors import CardinalSyntaxError, DomainError
from .ordinal import ONE, ZERO, Ordinal, format_ordinal, ord_add, parse_ordinal, to_ordinal


@dataclass(frozen=True)
class Finite:
    n: int


@dataclass(frozen=True)
class Aleph:
    index: Ordinal


@dataclass(frozen=True)
class Sum:
    left: "CardExpr"
    right: "CardExpr"


@dataclass(frozen=True)
class Prod:
    left: "CardExpr"
    right: "CardExpr"


@dataclass(frozen=True)
class Pow:
    base: "CardExpr"
    exp: "CardExpr"


@dataclass(frozen=True)
class TwoPow:
    exp: "CardExpr"


CardExpr = Finite | Aleph | Sum | Prod | Pow | TwoPow

FINITE_CAP = 10 ** 6


def aleph(index) -> Aleph:
    return Aleph(to_ordinal(index))


def is_infinite(c: CardExpr) -> bool:
    """For normalised expressions: anything that is not a finite literal."""
    return not isinstance(c, Finite)


# ordering facts provable in ZFC.  Returns "lt", "eq", "gt", "le", "ge" or None.
def compare(a: CardExpr, b: CardExpr):
    if a == b:
        return "eq"
    fa, fb = isinstance(a, Finite), isinstance(b, Finite)
    if fa and fb:
        return "lt" if a.n < b.n else "gt"
    if fa:
        return "lt"
    if fb:
        return "gt"
    if isinstance(a, Aleph) and isinstance(b, Aleph):
        return "lt" if a.index < b.index else "gt"
    if isinstance(a, TwoPow) and isinstance(b, Aleph):
        return _flip(_aleph_vs_twopow(b, a))
    if isinstance(a, Aleph) and isinstance(b, TwoPow):
        return _aleph_vs_twopow(a, b)
    if isinstance(a, TwoPow) and isinstance(b, TwoPow):
        inner = compare(a.exp, b.exp)
        if inner in ("lt", "le"):
            return "le"
        if inner in ("gt", "ge"):
            return "ge"
        return None
    return None


def _flip(r):
    return {"lt": "gt", "gt": "lt", "le": "ge", "ge": "le", "eq": "eq", None: None}[r]


def _aleph_vs_twopow(a: Aleph, t: TwoPow):
    # aleph_b against 2^e: Cantor gives e < 2^e, so aleph_b <= e forces lt
    e = t.exp
    if isinstance(e, Finite):
        return "gt"
    r = compare(a, e)
    if r in ("lt", "le", "eq"):
        return "lt"
    if isinstance(e, Aleph) and a.index == ord_add(e.index, ONE):
        return "le"
    return None


def _at_least(r):
    return r in ("gt", "ge", "eq")


def _at_most(r):
    return r in ("lt", "le", "eq")


def _sort_key(c: CardExpr):
    return format_cardinal(c)


def normalize(c: CardExpr, gch: bool = False) -> CardExpr:
    t = type(c)
    if t is Finite:
        if c.n < 0:
            raise DomainError("cardinals are non-negative")
        return c
    if t is Aleph:
        return c
    if t is TwoPow:
        e = normalize(c.exp, gch)
        return _twopow(e, gch)
    if t is Sum or t is Prod:
        a, b = normalize(c.left, gch), normalize(c.right, gch)
        return _sum(a, b) if t is Sum else _prod(a, b)
    if t is Pow:
        return _pow(normalize(c.base, gch), normalize(c.exp, gch), gch)
    raise TypeError(f"not a cardinal expression: {c!r}")


def _finite(n):
    if n > FINITE_CAP:
        raise DomainError(f"finite cardinal {n} exceeds the folding cap")
    return Finite(n)


def _twopow(e, gch):
    if isinstance(e, Finite):
        if e.n > 64:
            raise DomainError("finite power too large to fold")
        return _finite(2 ** e.n)
    if gch and isinstance(e, Aleph):
        return Aleph(ord_add(e.index, ONE))
    return TwoPow(e)


def _terms(c, combine):
    if isinstance(c, combine):
        return _terms(c.left, combine) + _terms(c.right, combine)
    return [c]


def _absorb(a, b, combine):
    # infinite sums and products equal their largest term: flatten the chain,
    # drop provably dominated terms, rebuild in a canonical order
    keep = []
    for t in _terms(a, combine) + _terms(b, combine):
        if any(_at_most(compare(t, u)) for u in keep):
            continue
        keep = [u for u in keep if not _at_most(compare(u, t))] + [t]
    keep.sort(key=_sort_key)
    out = keep[-1]
    for t in reversed(keep[:-1]):
        out = combine(t, out)
    return out


def _sum(a, b):
    if isinstance(a, Finite) and isinstance(b, Finite):
        return _finite(a.n + b.n)
    if a == Finite(0):
        return b
    if b == Finite(0):
        return a
    return _absorb(a, b, Sum)


def _prod(a, b):
    if a == Finite(0) or b == Finite(0):
        return Finite(0)
    if isinstance(a, Finite) and isinstance(b, Finite):
        return _finite(a.n * b.n)
    if a == Finite(1):
        return b
    if b == Finite(1):
        return a
    return _absorb(a, b, Prod)


def _pow(b, e, gch):
    if e == Finite(0):
        return Finite(1)
    if isinstance(e, Finite):
        if isinstance(b, Finite):
            if b.n > 1 and e.n * b.n.bit_length() > 64:
                raise DomainError("finite power too large to fold")
            return _finite(b.n ** e.n)
        return b
    # infinite exponent
    if b == Finite(0) or b == Finite(1):
        return b
    if isinstance(b, Finite):
        return _twopow(e, gch)
    if isinstance(b, TwoPow):
        merged = _absorb(b.exp, e, Prod)
        if not isinstance(merged, Prod):
            return _twopow(merged, gch)
        return Pow(b, e)
    if _at_most(compare(b, e)):
        return _twopow(e, gch)
    if gch and isinstance(b, Aleph) and isinstance(e, Aleph):
        # under GCH, kappa^lambda = kappa for lambda below cf(kappa)
        # and kappa^+ at or above it
        cf = card_cofinality(b.index)
        if compare(e, cf) == "lt":
            return b
        return Aleph(ord_add(b.index, ONE))
    return Pow(b, e)


# -------------------------------------------------------------- cofinality

def card_cofinality(index) -> CardExpr:
    """cf(aleph_index): aleph_0 for index 0 or a limit, else aleph_index."""
    a = to_ordinal(index)
    if a.is_zero() or a.is_limit():
        return Aleph(ZERO)
    return Aleph(a)


def continuum_admissible(index) -> tuple:
    """Whether 2^aleph_0 = aleph_index is consistent with cofinality constraints.

    Only cf(2^aleph_0) > aleph_0 is checked, so a True answer means no
    obstruction from this test.
    """
    a = to_ordinal(index)
    if card_cofinality(a) == Aleph(ZERO):
        return False, "cofinality ω"
    return True, f"cofinality aleph({format_ordinal(a)}) is uncountable"


def koenig_check_finite(ks, ls) -> bool:
    """Check sum(k_i) < prod(l_i) for finite sequences with k_i < l_i."""
    ks, ls = list(ks), list(ls)
    if len(ks) != len(ls):
        raise DomainError(f"length mismatch: {len(ks)} vs {len(ls)}")
    for i, (k, l) in enumerate(zip(ks, ls)):
        if not (0 <= k < l):
            raise DomainError(f"hypothesis k_i < l_i fails at index {i}: {k} vs {l}")
    prod = 1
    for l in ls:
        prod *= l
    return sum(ks) < prod


def koenig_exhaustive(max_len: int = 4, max_entry: int = 5) -> int:
    """Run the finite check over all admissible sequences; returns the count checked."""
    count = 0
    for n in range(1, max_len + 1):
        for ls in _cartesian(range(1, max_entry + 1), repeat=n):
            for ks in _cartesian(*[range(l) for l in ls]):
                if not koenig_check_finite(ks, ls):
                    raise AssertionError(f"finite inequality fails for {ks}, {ls}")
                count += 1
    return count


# ------------------------------------------------------------- text form

def format_cardinal(c: CardExpr) -> str:
    t = type(c)
    if t is Finite:
        return str(c.n)
    if t is Aleph:
        return f"aleph({format_ordinal(c.index)})"
    if t is TwoPow:
        return f"2^{_wrap(c.exp)}"
    if t is Sum:
        return f"{format_cardinal(c.left)} + {format_cardinal(c.right)}"
    if t is Prod:
        return f"{_wrap_sum(c.left)} * {_wrap_sum(c.right)}"
    return f"{_wrap(c.base)}^{_wrap(c.exp)}"


def _wrap(c):
    if isinstance(c, (Finite, Aleph)):
        return format_cardinal(c)
    return f"({format_cardinal(c)})"


def _wrap_sum(c):
    if isinstance(c, Sum):
        return f"({format_cardinal(c)})"
    return format_cardinal(c)


def parse_cardinal(text: str) -> CardExpr:
    """Parse e.g. ``2^aleph(0)``, ``aleph(w)^aleph(1)``, ``aleph(3) + 5``.

    The index inside ``aleph(...)`` is an ordinal expression.
    """
    s = text.strip()
    i = 0

    def skip():
        nonlocal i
        while i < len(s) and s[i].isspace():
            i += 1

    def peek():
        skip()
        return s[i] if i < len(s) else None

    def expr():
        nonlocal i
        v = prod()
        while peek() == "+":
            i += 1
            v = Sum(v, prod())
        return v

    def prod():
        nonlocal i
        v = power()
        while peek() == "*":
            i += 1
            v = Prod(v, power())
        return v

    def power():
        nonlocal i
        b = atom()
        if peek() == "^":
            i += 1
            e = power()
            return TwoPow(e) if b == Finite(2) else Pow(b, e)
        return b

    def atom():
        nonlocal i
        ch = peek()
        if ch is None:
            raise CardinalSyntaxError("unexpected end of cardinal expression")
        if ch.isdigit():
            j = i
            while j < len(s) and s[j].isdigit():
                j += 1
            v = Finite(int(s[i:j]))
            i = j
            return v
        if ch == "(":
            i += 1
            v = expr()
            if peek() != ")":
                raise CardinalSyntaxError("missing closing parenthesis")
            i += 1
            return v
        m = re.match(r"(aleph|ℵ)\s*\(", s[i:])
        if m:
            i += m.end()
            depth, j = 1, i
            while j < len(s) and depth:
                depth += {"(": 1, ")": -1}.get(s[j], 0)
                j += 1
            if depth:
                raise CardinalSyntaxError("unbalanced parentheses in aleph index")
            inner = s[i:j - 1]
            i = j
            try:
                return Aleph(parse_ordinal(inner))
            except DomainError as exc:
                raise CardinalSyntaxError(f"bad aleph index {inner!r}: {exc}") from None
        raise CardinalSyntaxError(f"unexpected {ch!r} at position {i}")

    if not s:
        raise CardinalSyntaxError("empty cardinal expression")
    v = expr()
    if peek() is not None:
        raise CardinalSyntaxError(f"unexpected {peek()!r} at position {i}")
    return v
