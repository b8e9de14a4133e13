"""Ordinals below epsilon_0 in Cantor normal form.

An ordinal is a strictly decreasing sequence of terms w^e * c with c a
positive integer and e again such an ordinal.  Text form uses ``w`` (or
``ω``) for omega, e.g. ``w^2*3 + w + 5``.
"""
from __future__ import annotations

import re

from .errors import OrdinalOverflow, OrdinalSyntaxError

DEPTH_CAP = 12


class Ordinal:
    __slots__ = ("terms", "_key", "_hash")

    def __init__(self, terms=()):
        self.terms = tuple(terms)
        self._key = None
        self._hash = None

    # comparison goes through a nested tuple key: lexicographic comparison of
    # (exponent, coefficient) pairs is exactly the order on normal forms
    def key(self):
        k = self._key
        if k is None:
            k = self._key = tuple((e.key(), c) for e, c in self.terms)
        return k

    def __eq__(self, other):
        if not isinstance(other, Ordinal):
            if isinstance(other, int):
                return self.is_finite() and self.finite_part() == other
            return NotImplemented
        return self.key() == other.key()

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.key())
        return self._hash

    def __lt__(self, other):
        return self.key() < to_ordinal(other).key()

    def __le__(self, other):
        return self.key() <= to_ordinal(other).key()

    def __gt__(self, other):
        return self.key() > to_ordinal(other).key()

    def __ge__(self, other):
        return self.key() >= to_ordinal(other).key()

    def __add__(self, other):
        return ord_add(self, to_ordinal(other))

    def __radd__(self, other):
        return ord_add(to_ordinal(other), self)

    def __mul__(self, other):
        return ord_mul(self, to_ordinal(other))

    def __rmul__(self, other):
        return ord_mul(to_ordinal(other), self)

    def __pow__(self, other):
        return ord_pow(self, to_ordinal(other))

    def __rpow__(self, other):
        return ord_pow(to_ordinal(other), self)

    def __repr__(self):
        return f"Ordinal({format_ordinal(self)!r})"

    def __str__(self):
        return format_ordinal(self)

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    def is_finite(self):
        return not self.terms or (len(self.terms) == 1 and not self.terms[0][0].terms)

    def finite_part(self) -> int:
        if self.terms and not self.terms[-1][0].terms:
            return self.terms[-1][1]
        return 0

    def is_successor(self):
        return bool(self.terms) and not self.terms[-1][0].terms

    def is_limit(self):
        return bool(self.terms) and bool(self.terms[-1][0].terms)

    def leading_exponent(self) -> "Ordinal":
        return self.terms[0][0] if self.terms else ZERO

    def predecessor(self) -> "Ordinal":
        if not self.is_successor():
            raise ValueError(f"{self} has no predecessor")
        *head, (e, c) = self.terms
        if c > 1:
            head.append((e, c - 1))
        return Ordinal(head)

    def depth(self) -> int:
        if not self.terms:
            return 0
        return 1 + max(e.depth() for e, _ in self.terms) if not self.is_finite() else 0


_FINITE = {}


def from_int(n: int) -> Ordinal:
    if n < 0:
        raise ValueError("ordinals are non-negative")
    o = _FINITE.get(n)
    if o is None:
        o = Ordinal(((ZERO, n),)) if n else ZERO
        if n < 4096:
            _FINITE[n] = o
    return o


def to_ordinal(x) -> Ordinal:
    if isinstance(x, Ordinal):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not ordinals")
    if isinstance(x, int):
        return from_int(x)
    if isinstance(x, str):
        return parse_ordinal(x)
    raise TypeError(f"cannot convert {x!r} to an ordinal")


ZERO = Ordinal()
ONE = Ordinal(((ZERO, 1),))
_FINITE[0] = ZERO
_FINITE[1] = ONE
OMEGA = Ordinal(((ONE, 1),))


def omega_power(e, c: int = 1) -> Ordinal:
    return Ordinal(((to_ordinal(e), c),)) if c else ZERO


def _check_depth(x, cap):
    if cap is not None and x.depth() > cap:
        raise OrdinalOverflow(f"result exceeds the exponent depth cap of {cap}")
    return x


def ord_add(a: Ordinal, b: Ordinal) -> Ordinal:
    if not b.terms:
        return a
    if not a.terms:
        return b
    at, bt = a.terms, b.terms
    if len(at) == 1 and len(bt) == 1 and not at[0][0].terms and not bt[0][0].terms:
        return from_int(at[0][1] + bt[0][1])
    lead = bt[0][0]
    lk = lead.key()
    out = []
    for e, c in at:
        ek = e.key()
        if ek > lk:
            out.append((e, c))
        elif ek == lk:
            out.append((e, c + bt[0][1]))
            out.extend(bt[1:])
            return Ordinal(out)
        else:
            break
    out.extend(bt)
    return Ordinal(out)


def ord_mul(a: Ordinal, b: Ordinal) -> Ordinal:
    if not a.terms or not b.terms:
        return ZERO
    at, bt = a.terms, b.terms
    if len(at) == 1 and len(bt) == 1 and not at[0][0].terms and not bt[0][0].terms:
        return from_int(at[0][1] * bt[0][1])
    a1, c1 = at[0]
    # a * w^e * c = w^(a1 + e) * c for e > 0; those exponents strictly decrease
    # and all exceed a1, so the pieces concatenate into normal form directly
    out = []
    for e, c in bt:
        if e.terms:
            out.append((ord_add(a1, e), c))
        else:
            out.append((a1, c1 * c))
            out.extend(at[1:])
    return Ordinal(out)


def _div_omega(b: Ordinal) -> Ordinal:
    """gamma with b = w * gamma, for b with no finite part."""
    out = []
    for e, c in b.terms:
        if e.is_finite():
            out.append((from_int(e.finite_part() - 1), c))
        else:
            out.append((e, c))
    return Ordinal(out)


def ord_pow(a: Ordinal, b: Ordinal, cap: int | None = DEPTH_CAP) -> Ordinal:
    if not b.terms:
        return ONE
    if not a.terms:
        return ZERO
    if a == ONE:
        return ONE
    if b.is_finite():
        n = b.finite_part()
        if a.is_finite():
            return _check_depth(from_int(a.finite_part() ** n), cap)
        result, base = ONE, a
        while n:
            if n & 1:
                result = ord_mul(result, base)
            n >>= 1
            if n:
                base = ord_mul(base, base)
        return _check_depth(result, cap)
    k = b.finite_part()
    limit_part = Ordinal(b.terms[:-1]) if k else b
    if a.is_finite():
        gamma = _div_omega(limit_part)
        head = omega_power(gamma)
        return _check_depth(ord_mul(head, from_int(a.finite_part() ** k)), cap)
    head = omega_power(ord_mul(a.leading_exponent(), limit_part))
    return _check_depth(ord_mul(head, ord_pow(a, from_int(k), cap)), cap)


def cofinality(a: Ordinal) -> Ordinal:
    if not a.terms:
        return ZERO
    if a.is_successor():
        return ONE
    return OMEGA


def compare(a, b) -> int:
    ka, kb = to_ordinal(a).key(), to_ordinal(b).key()
    return (ka > kb) - (ka < kb)


def from_pair(m: int, n: int) -> Ordinal:
    """The ordinal w*m + n."""
    terms = []
    if m:
        terms.append((ONE, m))
    if n:
        terms.append((ZERO, n))
    return Ordinal(terms)


def to_pair(a: Ordinal):
    """(m, n) with a = w*m + n, or None when a >= w^2."""
    m = n = 0
    for e, c in a.terms:
        et = e.terms
        if not et:
            n = c
        elif len(et) == 1 and not et[0][0].terms and et[0][1] == 1:
            m = c
        else:
            return None
    return m, n


# ------------------------------------------------------------- text form

def format_ordinal(a: Ordinal) -> str:
    if not a.terms:
        return "0"
    parts = []
    for e, c in a.terms:
        if not e.terms:
            parts.append(str(c))
            continue
        if e == ONE:
            base = "w"
        elif e.is_finite() or e == OMEGA:
            base = f"w^{format_ordinal(e)}"
        else:
            base = f"w^({format_ordinal(e)})"
        parts.append(base if c == 1 else f"{base}*{c}")
    return " + ".join(parts)


_TOK = re.compile(r"\s*(\d+|[wω]|[-+*^()])")


def parse_ordinal(text: str) -> Ordinal:
    """Parse an ordinal expression built from naturals, w, +, *, ^ and parentheses.

    The expression is evaluated with ordinal arithmetic, so ``2*w`` is ``w``.
    """
    toks = []
    pos = 0
    s = text.rstrip()
    while pos < len(s):
        m = _TOK.match(s, pos)
        if not m:
            raise OrdinalSyntaxError(f"unexpected character {s[pos]!r} at position {pos}")
        toks.append(m.group(1))
        pos = m.end()
    if not toks:
        raise OrdinalSyntaxError("empty ordinal expression")
    toks.append(None)
    i = 0

    def peek():
        return toks[i]

    def take():
        nonlocal i
        t = toks[i]
        i += 1
        return t

    def expr():
        v = product()
        while peek() == "+":
            take()
            v = ord_add(v, product())
        return v

    def product():
        v = power()
        while peek() == "*":
            take()
            v = ord_mul(v, power())
        return v

    def power():
        base = atom()
        if peek() == "^":
            take()
            return ord_pow(base, power())
        return base

    def atom():
        t = take()
        if t is None:
            raise OrdinalSyntaxError("unexpected end of ordinal expression")
        if t == "-":
            raise OrdinalSyntaxError("negative ordinals are not allowed")
        if t.isdigit():
            return from_int(int(t))
        if t in ("w", "ω"):
            return OMEGA
        if t == "(":
            v = expr()
            if take() != ")":
                raise OrdinalSyntaxError("missing closing parenthesis")
            return v
        raise OrdinalSyntaxError(f"unexpected token {t!r}")

    v = expr()
    if peek() is not None:
        raise OrdinalSyntaxError(f"unexpected token {peek()!r}")
    return v
