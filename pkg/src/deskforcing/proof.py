"""Hilbert-style proof checking for the membership language.

The primitive connectives are not, implies and forall; everything else is
an abbreviation and is expanded before any comparison.  Logical axioms:

    A1  p -> (q -> p)
    A2  (p -> (q -> r)) -> ((p -> q) -> (p -> r))
    A3  (~p -> ~q) -> (q -> p)
    A4  (all x . (p -> q)) -> (p -> all x . q)      x not free in p
    A5  (all x . p) -> p[x := t]                    t not a variable of p (or t = x)

plus two equality axioms and the rules modus ponens, generalisation and
injective renaming.
"""
from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from .errors import CaptureError, FormulaSyntaxError, ProofError, RenamingError
from .logic import (And, Equal, Exists, ForAll, Formula, Iff, Implies, Member, Not, Or, all_vars, as_formula,
                    free_vars, parse, relativize, rename, render, substitute, truth_table)


# ------------------------------------------------------------ core form

def hcore(f: Formula) -> Formula:
    """Expand every abbreviation into not, implies and unbounded forall."""
    return _hcore(as_formula(f))


@lru_cache(maxsize=65536)
def _hcore(f):
    t = type(f)
    if t is Member or t is Equal or t is _Meta:
        return f
    if t is Not:
        return Not(_hcore(f.body))
    if t is Implies:
        return Implies(_hcore(f.left), _hcore(f.right))
    if t is And:
        return _and(_hcore(f.left), _hcore(f.right))
    if t is Or:
        return Implies(Not(_hcore(f.left)), _hcore(f.right))
    if t is Iff:
        a, b = _hcore(f.left), _hcore(f.right)
        return _and(Implies(a, b), Implies(b, a))
    body = _hcore(f.body)
    if t is ForAll:
        if f.bound is None:
            return ForAll(f.var, body)
        return ForAll(f.var, Implies(Member(f.var, f.bound), body))
    if t is Exists:
        if f.bound is not None:
            body = _and(Member(f.var, f.bound), body)
        return Not(ForAll(f.var, Not(body)))
    raise TypeError(f"not a formula: {f!r}")


def _and(a, b):
    return Not(Implies(a, Not(b)))


def is_hcore(f) -> bool:
    return hcore(f) == f


def alpha_equal(f, g) -> bool:
    """Equality of core forms up to renaming of bound variables."""
    return _alpha(hcore(f), hcore(g), {}, {}, 0)


def _alpha(f, g, bf, bg, depth):
    if type(f) is not type(g):
        return False
    t = type(f)
    if t is Member or t is Equal:
        return _same_var(f.left, g.left, bf, bg) and _same_var(f.right, g.right, bf, bg)
    if t is Not:
        return _alpha(f.body, g.body, bf, bg, depth)
    if t is Implies:
        return _alpha(f.left, g.left, bf, bg, depth) and _alpha(f.right, g.right, bf, bg, depth)
    if t is ForAll:
        bf2 = dict(bf)
        bg2 = dict(bg)
        bf2[f.var] = depth
        bg2[g.var] = depth
        return _alpha(f.body, g.body, bf2, bg2, depth + 1)
    return False


def _same_var(a, b, bf, bg):
    da, db = bf.get(a), bg.get(b)
    if da is None and db is None:
        return a == b
    return da == db


# ------------------------------------------------------- logical axioms

def _is_imp(f):
    return type(f) is Implies


def check_a1(f) -> bool:
    return _is_imp(f) and _is_imp(f.right) and f.right.right == f.left


def check_a2(f) -> bool:
    if not (_is_imp(f) and _is_imp(f.left) and _is_imp(f.left.right) and _is_imp(f.right)
            and _is_imp(f.right.left) and _is_imp(f.right.right)):
        return False
    p, q, r = f.left.left, f.left.right.left, f.left.right.right
    return f.right.left == Implies(p, q) and f.right.right == Implies(p, r)


def check_a3(f) -> bool:
    if not (_is_imp(f) and _is_imp(f.left) and _is_imp(f.right)):
        return False
    a, b = f.left.left, f.left.right
    if type(a) is not Not or type(b) is not Not:
        return False
    return f.right == Implies(b.body, a.body)


def check_a4(f) -> bool:
    if not (_is_imp(f) and type(f.left) is ForAll and _is_imp(f.left.body) and _is_imp(f.right)):
        return False
    x = f.left.var
    p, q = f.left.body.left, f.left.body.right
    if x in free_vars(p):
        return False
    return f.right == Implies(p, ForAll(x, q))


def check_a5(f) -> bool:
    if not (_is_imp(f) and type(f.left) is ForAll):
        return False
    x, body, target = f.left.var, f.left.body, f.right
    if target == body:
        return True
    used = all_vars(body)
    for t in all_vars(target):
        if t in used:
            continue
        try:
            if substitute(body, x, t) == target:
                return True
        except CaptureError:
            continue
    return False


def check_eq1(f) -> bool:
    # x = y -> (x in z -> y in z)
    if not (_is_imp(f) and type(f.left) is Equal and _is_imp(f.right)):
        return False
    a, b = f.right.left, f.right.right
    x, y = f.left.left, f.left.right
    return type(a) is Member and type(b) is Member and a.left == x and b.left == y and a.right == b.right


def check_eq2(f) -> bool:
    # x = y -> (z in x -> z in y)
    if not (_is_imp(f) and type(f.left) is Equal and _is_imp(f.right)):
        return False
    a, b = f.right.left, f.right.right
    x, y = f.left.left, f.left.right
    return type(a) is Member and type(b) is Member and a.right == x and b.right == y and a.left == b.left


LOGICAL = {"A1": check_a1, "A2": check_a2, "A3": check_a3, "A4": check_a4, "A5": check_a5}
EQUALITY = {"EQ1": check_eq1, "EQ2": check_eq2}


# ---------------------------------------------------------- ZFC axioms

def _pair(p, a, b):
    # p is the Kuratowski pair (a, b)
    return (f"(all c . (c in {p} <-> ((all r . (r in c <-> r = {a})) | "
            f"(all r . (r in c <-> (r = {a} | r = {b}))))))")


ZFC_TEXT = {
    "Extensionality": "all x . all y . ((all z . (z in x <-> z in y)) <-> x = y)",
    "Pairing": "all x . all y . ex z . (x in z & y in z)",
    "Union": "all x . ex u . all y . (y in u <-> (ex z . (y in z & z in x)))",
    "Power": "all x . ex y . all z . ((all w . (w in z -> w in x)) <-> z in y)",
    "Infinity": ("ex x . ((ex e . ((all y . ~(y in e)) & e in x)) & "
                 "(all z in x . ex s . (s in x & (all w . (w in s <-> (w in z | w = z))))))"),
    "Foundation": "all x . ((ex a . a in x) -> (ex y . (y in x & ~(ex w . (w in y & w in x)))))",
    "Choice": ("all x . (~(ex e . (e in x & (all w . ~(w in e)))) -> (ex f . ("
               f"(all y in x . ex v . (v in y & (ex p . (p in f & {_pair('p', 'y', 'v')})))) & "
               f"(all p in f . ex a . ex b . (a in x & {_pair('p', 'a', 'b')} & "
               f"(all q in f . all d . ({_pair('q', 'a', 'd')} -> d = b)))))))"),
}

ZFC_NAMES = tuple(ZFC_TEXT)


@lru_cache(maxsize=None)
def zfc_axiom(name: str) -> Formula:
    try:
        return parse(ZFC_TEXT[name])
    except KeyError:
        raise ProofError(f"unknown ZFC axiom {name!r}; known: {', '.join(ZFC_NAMES)}") from None


@dataclass(frozen=True)
class AxiomMatch:
    kind: str          # "axiom" or "schema"
    name: str
    phi: Formula | None = None


# --------------------------------------------------------------- schemas

@dataclass(frozen=True)
class _Meta:
    """Placeholder for the schema formula, optionally with one substitution applied."""
    src: str | None = None
    dst: str | None = None


_PHI = "PHI_"


def _with_meta(f):
    t = type(f)
    if t is Member and f.left == _PHI:
        return _Meta() if f.right == _PHI else _Meta("y", f.right)
    if t in (Member, Equal):
        return f
    if t is Not:
        return Not(_with_meta(f.body))
    if t in (And, Or, Implies, Iff):
        return t(_with_meta(f.left), _with_meta(f.right))
    return t(f.var, _with_meta(f.body), f.bound)


_COMP_BODY = "ex z . all x . (x in z <-> (x in y & PHI_ in PHI_))"
_REPL_BODY = ("(all x in A . ex y . (PHI_ in PHI_ & (all y2 . (PHI_ in y2 -> y2 = y)))) -> "
              "(ex B . all x in A . ex y in B . PHI_ in PHI_)")


@lru_cache(maxsize=None)
def _template(which):
    text = _COMP_BODY if which == "Comprehension" else _REPL_BODY
    return hcore(_with_meta(parse(text)))


def _match(tpl, f, vm, state):
    """Match a core template against a core formula.

    ``vm`` maps template variables to actual ones (kept injective);
    ``state['phi']`` receives the formula bound to the placeholder.
    """
    t = type(tpl)
    if t is _Meta:
        if tpl.src is None:
            if state.get("phi") is None:
                state["phi"] = f
                return True
            return state["phi"] == f
        state.setdefault("subst", []).append((tpl, f))
        return True
    if type(f) is not t:
        return False
    if t is Member or t is Equal:
        return _bind(tpl.left, f.left, vm) and _bind(tpl.right, f.right, vm)
    if t is Not:
        return _match(tpl.body, f.body, vm, state)
    if t is Implies:
        return _match(tpl.left, f.left, vm, state) and _match(tpl.right, f.right, vm, state)
    if t is ForAll:
        return _bind(tpl.var, f.var, vm) and _match(tpl.body, f.body, vm, state)
    return False


def _bind(a, b, vm):
    cur = vm.get(a)
    if cur is None:
        if b in vm.values():
            return False
        vm[a] = b
        return True
    return cur == b


def match_schema(f) -> AxiomMatch | None:
    """Recognise a closed Comprehension or Replacement instance."""
    c = hcore(f)
    if free_vars(c):
        return None
    outer = []
    g = c
    while True:
        for which in ("Comprehension", "Replacement"):
            hit = _try_schema(which, outer, g)
            if hit is not None:
                return hit
        if type(g) is not ForAll:
            return None
        outer.append(g.var)
        g = g.body


def _try_schema(which, prefix, body):
    vm, state = {}, {}
    if not _match(_template(which), body, vm, state):
        return None
    phi = state.get("phi")
    if phi is None:
        return None
    fv = free_vars(phi)
    if which == "Comprehension":
        x, y, z = vm["x"], vm["y"], vm["z"]
        if y not in prefix or z in fv or x in prefix or z in prefix:
            return None
        if not fv <= set(prefix) | {x}:
            return None
        return AxiomMatch("schema", "Comprehension", phi)
    x, y, A, B, y2 = vm["x"], vm["y"], vm["A"], vm["B"], vm["y2"]
    if not prefix or prefix[-1] != A or B in fv or y2 in all_vars(phi):
        return None
    if x in prefix or y in prefix:
        return None
    for tpl, sub in state.get("subst", []):
        try:
            if substitute(phi, y, y2) != sub:
                return None
        except CaptureError:
            return None
    if not fv <= set(prefix) | {x, y}:
        return None
    return AxiomMatch("schema", "Replacement", phi)


def instantiate_schema(kind: str, phi, x: str = "x", y: str = "y", z: str = "z",
                       params: Sequence | None = None, A: str = "A", B: str = "B") -> Formula:
    """The closed schema instance for ``phi``.

    Comprehension: all y . all params . ex z . all x . (x in z <-> (x in y & phi)).
    Replacement: all params . all A . ((all x in A . ex! y . phi) -> ex B . all x in A . ex y in B . phi),
    here x plays the argument and y the value.
    """
    phi = as_formula(phi)
    fv = free_vars(phi)
    if kind == "Comprehension":
        if len({x, y, z}) < 3:
            raise ProofError("comprehension roles must be three distinct variables")
        if z in fv:
            raise ProofError(f"the target variable {z!r} may not be free in the formula")
        rest = sorted(fv - {x, y}) if params is None else list(params)
        if not fv <= {x, y} | set(rest):
            raise ProofError("the formula has free variables outside the listed parameters")
        if z in rest or x in rest or y in rest:
            raise ProofError("parameters clash with the schema roles")
        body = Exists(z, ForAll(x, Iff(Member(x, z), And(Member(x, y), phi))))
        for w in reversed(rest):
            body = ForAll(w, body)
        return ForAll(y, body)
    if kind == "Replacement":
        if len({x, y, A, B}) < 4:
            raise ProofError("replacement roles must be four distinct variables")
        if B in fv:
            raise ProofError(f"the image variable {B!r} may not be free in the formula")
        rest = sorted(fv - {x, y, A}) if params is None else list(params)
        if not fv <= {x, y, A} | set(rest):
            raise ProofError("the formula has free variables outside the listed parameters")
        if set(rest) & {x, y, A, B}:
            raise ProofError("parameters clash with the schema roles")
        y2 = _fresh(all_vars(phi) | {x, y, A, B} | set(rest), y + "2")
        unique = Exists(y, And(phi, ForAll(y2, Implies(substitute(phi, y, y2), Equal(y2, y)))))
        body = ForAll(A, Implies(ForAll(x, unique, A), Exists(B, ForAll(x, Exists(y, phi, B), A))))
        for w in reversed(rest):
            body = ForAll(w, body)
        return body
    raise ProofError(f"unknown schema {kind!r}")


def _fresh(avoid, base):
    name, i = base, 0
    while name in avoid:
        i += 1
        name = f"{base}_{i}"
    return name


def is_zfc_axiom(f) -> AxiomMatch | None:
    """Which ZFC axiom or schema f is, up to renaming of bound variables."""
    f = as_formula(f)
    for name in ZFC_NAMES:
        if alpha_equal(f, zfc_axiom(name)):
            return AxiomMatch("axiom", name)
    return match_schema(f)


# --------------------------------------------------------------- proofs

@dataclass(frozen=True)
class LogicalAxiom:
    index: int

    def __str__(self):
        return f"A{self.index}"


@dataclass(frozen=True)
class EqualityAxiom:
    index: int

    def __str__(self):
        return f"EQ{self.index}"


@dataclass(frozen=True)
class ZFCAxiom:
    name: str

    def __str__(self):
        return f"ZFC {self.name}"


@dataclass(frozen=True)
class SchemaInstance:
    kind: str

    def __str__(self):
        return self.kind


@dataclass(frozen=True)
class ModusPonens:
    i: int
    j: int

    def __str__(self):
        return f"MP {self.i} {self.j}"


@dataclass(frozen=True)
class Generalization:
    i: int
    var: str

    def __str__(self):
        return f"Gen {self.i} {self.var}"


@dataclass(frozen=True)
class Renaming:
    i: int
    mapping: tuple

    def __str__(self):
        return f"Rename {self.i} " + ", ".join(f"{a}->{b}" for a, b in self.mapping)


Justification = LogicalAxiom | EqualityAxiom | ZFCAxiom | SchemaInstance | ModusPonens | Generalization | Renaming


def parse_justification(text: str) -> Justification:
    s = text.strip()
    m = re.fullmatch(r"A([1-5])", s)
    if m:
        return LogicalAxiom(int(m.group(1)))
    m = re.fullmatch(r"EQ([12])", s)
    if m:
        return EqualityAxiom(int(m.group(1)))
    m = re.fullmatch(r"ZFC\s+(\w+)", s)
    if m:
        if m.group(1) not in ZFC_TEXT:
            raise ProofError(f"unknown ZFC axiom {m.group(1)!r}")
        return ZFCAxiom(m.group(1))
    if s in ("Comprehension", "Replacement"):
        return SchemaInstance(s)
    m = re.fullmatch(r"MP\s+(\d+)\s+(\d+)", s)
    if m:
        return ModusPonens(int(m.group(1)), int(m.group(2)))
    m = re.fullmatch(r"Gen\s+(\d+)\s+([A-Za-z_][A-Za-z0-9_]*'*)", s)
    if m:
        return Generalization(int(m.group(1)), m.group(2))
    m = re.fullmatch(r"Rename\s+(\d+)\s+(.+)", s)
    if m:
        pairs = []
        for part in m.group(2).split(","):
            ab = part.split("->")
            if len(ab) != 2 or not ab[0].strip() or not ab[1].strip():
                raise ProofError(f"bad renaming entry {part.strip()!r}")
            pairs.append((ab[0].strip(), ab[1].strip()))
        return Renaming(int(m.group(1)), tuple(pairs))
    raise ProofError(f"unrecognised justification {s!r}")


@dataclass(frozen=True)
class Proof:
    lines: tuple   # of (Formula, Justification)

    def __len__(self):
        return len(self.lines)

    @property
    def conclusion(self):
        return self.lines[-1][0] if self.lines else None

    def to_text(self) -> str:
        return "".join(f"{n}. {render(f)} ; {j}\n" for n, (f, j) in enumerate(self.lines, 1))

    @classmethod
    def from_text(cls, text: str) -> "Proof":
        lines = []
        for raw_no, raw in enumerate(text.splitlines(), 1):
            s = raw.strip()
            if not s or s.startswith("#"):
                continue
            m = re.match(r"(\d+)\.\s*(.*)$", s)
            if not m:
                raise ProofError(f"text line {raw_no}: expected '<n>. <formula> ; <justification>'")
            n = int(m.group(1))
            if n != len(lines) + 1:
                raise ProofError(f"text line {raw_no}: expected line number {len(lines) + 1}, got {n}")
            rest = m.group(2)
            if ";" not in rest:
                raise ProofError(f"line {n}: missing ';' before the justification")
            ftext, jtext = rest.rsplit(";", 1)
            try:
                f = parse(ftext)
            except FormulaSyntaxError as exc:
                raise ProofError(f"line {n}: {exc}") from None
            lines.append((f, parse_justification(jtext)))
        return cls(tuple(lines))


@dataclass(frozen=True)
class ProofVerdict:
    valid: bool
    first_bad: int | None = None
    diagnostics: tuple = ()

    def __bool__(self):
        return self.valid

    def to_json(self) -> dict:
        return {"valid": self.valid, "first_bad": self.first_bad,
                "diagnostics": [{"line": n, "message": m} for n, m in self.diagnostics]}


def _check_line(n, f, j, cores):
    c = cores[n - 1]
    if isinstance(j, LogicalAxiom):
        return None if LOGICAL[f"A{j.index}"](c) else f"not an instance of axiom A{j.index}"
    if isinstance(j, EqualityAxiom):
        return None if EQUALITY[f"EQ{j.index}"](c) else f"not an instance of equality axiom EQ{j.index}"
    if isinstance(j, ZFCAxiom):
        if j.name not in ZFC_TEXT:
            return f"unknown ZFC axiom {j.name!r}"
        return None if alpha_equal(c, zfc_axiom(j.name)) else f"not the ZFC axiom {j.name}"
    if isinstance(j, SchemaInstance):
        m = match_schema(c)
        return None if m is not None and m.name == j.kind else f"not a {j.kind} instance"
    refs = [j.i] + ([j.j] if isinstance(j, ModusPonens) else [])
    for r in refs:
        if not 1 <= r < n:
            return f"reference {r} does not point to an earlier line"
    if isinstance(j, ModusPonens):
        a, b = cores[j.i - 1], cores[j.j - 1]
        if b == Implies(a, c) or a == Implies(b, c):
            return None
        return f"lines {j.i} and {j.j} do not yield this line by modus ponens"
    if isinstance(j, Generalization):
        return None if c == ForAll(j.var, cores[j.i - 1]) else f"not the generalisation of line {j.i} over {j.var}"
    if isinstance(j, Renaming):
        mp = dict(j.mapping)
        if len(mp) != len(j.mapping):
            return "renaming lists a variable twice"
        try:
            expect = rename(cores[j.i - 1], mp)
        except RenamingError as exc:
            return f"renaming is not injective: {exc}"
        return None if expect == c else f"not a renaming of line {j.i}"
    return f"unknown justification {j!r}"


def check_proof(p: Proof) -> ProofVerdict:
    """Validate every line; report all failures and the first one."""
    if not p.lines:
        return ProofVerdict(False, None, ((0, "empty proof"),))
    cores = [hcore(f) for f, _ in p.lines]
    diags = []
    for n, (f, j) in enumerate(p.lines, 1):
        msg = _check_line(n, f, j, cores)
        if msg is not None:
            diags.append((n, msg))
    if diags:
        return ProofVerdict(False, diags[0][0], tuple(diags))
    return ProofVerdict(True)


def load_proof(path) -> Proof:
    with open(path, encoding="utf-8") as fh:
        return Proof.from_text(fh.read())


def relativize_proof(p: Proof, restrictor: str = "M") -> list:
    """Each line relativised to ``restrictor``: a list of formulas, not a checkable proof."""
    return [relativize(f, restrictor) for f, _ in p.lines]


# ------------------------------------------------------------- builder

class _Line:
    __slots__ = ("display", "core", "kind", "args", "frame", "dep", "keep")

    def __init__(self, display, core, kind, args, frame, dep, keep=False):
        self.display, self.core, self.kind, self.args = display, core, kind, args
        self.frame, self.dep, self.keep = frame, dep, keep


class ProofBuilder:
    """Assemble Hilbert proofs with hypotheses discharged by the deduction theorem.

    Every method returns a handle to a line.  ``assume`` opens a frame and
    ``discharge`` closes it, rewriting its lines into lines proving
    hypothesis -> line.
    """

    def __init__(self):
        self.frames = [[]]
        self.hyps = [None]

    @property
    def depth(self):
        return len(self.frames) - 1

    def _add(self, display, core, kind, args, keep=False):
        d = self.depth
        dep = kind == "hyp" or any(isinstance(a, _Line) and a.frame == d and a.dep for a in args)
        line = _Line(display, core, kind, args, d, dep, keep)
        self.frames[-1].append(line)
        return line

    def axiom(self, f, just: str, keep: bool = False):
        f = as_formula(f)
        c = hcore(f)
        j = parse_justification(just)
        msg = _check_line(1, f, j, [c])
        if msg is not None:
            raise ProofError(f"{render(f)}: {msg}")
        return self._add(f, c, "axiom", (j,), keep)

    def assume(self, f):
        f = as_formula(f)
        self.frames.append([])
        self.hyps.append(f)
        return self._add(f, hcore(f), "hyp", ())

    def mp(self, a, b):
        if type(b.core) is not Implies or b.core.left != a.core:
            if type(a.core) is Implies and a.core.left == b.core:
                a, b = b, a
            else:
                raise ProofError(f"modus ponens does not apply to {render(a.core)} and {render(b.core)}")
        r = b.core.right
        return self._add(r, r, "mp", (a, b))

    def gen(self, a, x: str):
        c = ForAll(x, a.core)
        return self._add(c, c, "gen", (a, x))

    def rename(self, a, mapping: Mapping):
        if self.depth:
            raise ProofError("renaming is only allowed outside hypotheses")
        c = rename(a.core, dict(mapping))
        return self._add(c, c, "rename", (a, tuple(mapping.items())))

    def restate(self, a, f):
        """Give a line a different but abbreviation-equal display form."""
        f = as_formula(f)
        if hcore(f) != a.core:
            raise ProofError("restated formula differs from the line")
        a.display = f
        return a

    def discharge(self, target):
        if not self.depth:
            raise ProofError("no open hypothesis")
        lines = self.frames.pop()
        H = self.hyps.pop()
        Hc = hcore(H)
        inner = self.depth + 1
        copy, conv = {}, {}

        def outer(h):
            return copy[h] if h.frame == inner else h

        def lifted(h):
            if h in conv:
                return conv[h]
            o = outer(h)
            a1 = self._axiom_core(Implies(o.core, Implies(Hc, o.core)), "A1")
            r = self.mp(o, a1)
            conv[h] = r
            return r

        for L in lines:
            if not L.dep:
                args = tuple(outer(a) if isinstance(a, _Line) else a for a in L.args)
                copy[L] = self._add(L.display, L.core, L.kind, args, L.keep)
                continue
            if L.kind == "hyp":
                conv[L] = self.identity(H)
            elif L.kind == "mp":
                a, b = L.args
                ha, hb = lifted(a), lifted(b)
                psi, phi = a.core, L.core
                ax = self._axiom_core(Implies(Implies(Hc, Implies(psi, phi)),
                                              Implies(Implies(Hc, psi), Implies(Hc, phi))), "A2")
                conv[L] = self.mp(ha, self.mp(hb, ax))
            elif L.kind == "gen":
                a, x = L.args
                if x in free_vars(Hc):
                    raise ProofError(f"cannot generalise over {x!r}, free in the hypothesis {render(H)}")
                g = self.gen(lifted(a), x)
                ax = self._axiom_core(Implies(ForAll(x, Implies(Hc, a.core)), Implies(Hc, ForAll(x, a.core))), "A4")
                conv[L] = self.mp(g, ax)
            else:
                raise ProofError(f"cannot discharge a {L.kind} line")
        return lifted(target)

    def _axiom_core(self, c, just):
        return self.axiom(c, just)

    # ---------------------------------------------------------- lemmas

    def identity(self, A):
        """A -> A."""
        A = hcore(A)
        AA = Implies(A, A)
        s1 = self.axiom(Implies(Implies(A, Implies(AA, A)), Implies(Implies(A, AA), AA)), "A2")
        s2 = self.axiom(Implies(A, Implies(AA, A)), "A1")
        s3 = self.mp(s2, s1)
        s4 = self.axiom(Implies(A, AA), "A1")
        return self.mp(s4, s3)

    def dne(self, A):
        """~~A -> A."""
        A = hcore(A)
        nA, nnA = Not(A), Not(Not(A))
        h = self.assume(nnA)
        m = self.mp(h, self.axiom(Implies(nnA, Implies(Not(Not(nnA)), nnA)), "A1"))
        m = self.mp(m, self.axiom(Implies(Implies(Not(Not(nnA)), nnA), Implies(nA, Not(nnA))), "A3"))
        m = self.mp(m, self.axiom(Implies(Implies(nA, Not(nnA)), Implies(nnA, A)), "A3"))
        return self.discharge(self.mp(h, m))

    def dni(self, A):
        """A -> ~~A."""
        A = hcore(A)
        d = self.dne(Not(A))
        return self.mp(d, self.axiom(Implies(Implies(Not(Not(Not(A))), Not(A)), Implies(A, Not(Not(A)))), "A3"))

    def explosion(self, A, B):
        """~A -> (A -> B)."""
        A, B = hcore(A), hcore(B)
        h = self.assume(Not(A))
        m = self.mp(h, self.axiom(Implies(Not(A), Implies(Not(B), Not(A))), "A1"))
        m = self.mp(m, self.axiom(Implies(Implies(Not(B), Not(A)), Implies(A, B)), "A3"))
        return self.discharge(m)

    def contrapose(self, A, B):
        """(A -> B) -> (~B -> ~A)."""
        A, B = hcore(A), hcore(B)
        h1 = self.assume(Implies(A, B))
        h2 = self.assume(Not(Not(A)))
        a = self.mp(h2, self.dne(A))
        b = self.mp(a, h1)
        nnb = self.mp(b, self.dni(B))
        i = self.discharge(nnb)
        r = self.mp(i, self.axiom(Implies(Implies(Not(Not(A)), Not(Not(B))), Implies(Not(B), Not(A))), "A3"))
        return self.discharge(r)

    def and_left(self, A, B):
        """~(A -> ~B) -> A, that is A & B -> A."""
        A, B = hcore(A), hcore(B)
        e = self.explosion(A, Not(B))
        m = self.mp(e, self.contrapose(Not(A), Implies(A, Not(B))))
        h = self.assume(Not(Implies(A, Not(B))))
        x = self.mp(h, m)
        return self.discharge(self.mp(x, self.dne(A)))

    def and_right(self, A, B):
        """~(A -> ~B) -> B."""
        A, B = hcore(A), hcore(B)
        a1 = self.axiom(Implies(Not(B), Implies(A, Not(B))), "A1")
        m = self.mp(a1, self.contrapose(Not(B), Implies(A, Not(B))))
        h = self.assume(Not(Implies(A, Not(B))))
        x = self.mp(h, m)
        return self.discharge(self.mp(x, self.dne(B)))

    def forall_dist(self, x, P, Q):
        """all x . (P -> Q) -> (all x . P -> all x . Q)."""
        P, Q = hcore(P), hcore(Q)
        h1 = self.assume(ForAll(x, Implies(P, Q)))
        h2 = self.assume(ForAll(x, P))
        pq = self.mp(h1, self.axiom(Implies(ForAll(x, Implies(P, Q)), Implies(P, Q)), "A5"))
        p = self.mp(h2, self.axiom(Implies(ForAll(x, P), P), "A5"))
        g = self.gen(self.mp(p, pq), x)
        return self.discharge(self.discharge(g))

    # ----------------------------------------------------------- output

    def build(self, target, conclusion=None, prune: bool = True) -> Proof:
        if self.depth:
            raise ProofError("hypotheses are still open")
        if conclusion is not None:
            self.restate(target, conclusion)
        lines = self.frames[0]
        if prune:
            need = set()
            stack = [target] + [L for L in lines if L.keep]
            while stack:
                L = stack.pop()
                if id(L) in need:
                    continue
                need.add(id(L))
                stack.extend(a for a in L.args if isinstance(a, _Line))
            lines = [L for L in lines if id(L) in need]
            # keep the target last
            lines = [L for L in lines if L is not target] + [target]
        num = {}
        out = []
        for L in lines:
            if id(L) in num:
                continue
            if L.kind == "axiom":
                j = L.args[0]
            elif L.kind == "mp":
                j = ModusPonens(num[id(L.args[0])], num[id(L.args[1])])
            elif L.kind == "gen":
                j = Generalization(num[id(L.args[0])], L.args[1])
            elif L.kind == "rename":
                j = Renaming(num[id(L.args[0])], L.args[1])
            else:
                raise ProofError(f"unexpected {L.kind} line at top level")
            out.append((L.display, j))
            num[id(L)] = len(out)
        return Proof(tuple(out))


# ---------------------------------------------------- empty-set proof

EMPTY_SET_GOAL = "ex z . all w . ~(w in z)"


def empty_set_proof() -> Proof:
    """A formal derivation of the existence of an empty set.

    Comprehension is instantiated with a contradictory condition.  Without
    a reflexivity axiom, w = w is not derivable, so the condition used is
    w in w & ~(w in w).  Infinity is cited but the derivation does not
    need it: the logic already assumes a nonempty domain.
    """
    b = ProofBuilder()
    b.axiom(zfc_axiom("Infinity"), "ZFC Infinity", keep=True)
    a, bw, m = Member("w", "w"), Member("w", "y"), Member("w", "z")
    phi = And(a, Not(a))
    comp = instantiate_schema("Comprehension", phi, x="w", y="y", z="z")
    c = b.axiom(comp, "Comprehension")
    cc = hcore(comp)
    E = b.mp(c, b.axiom(Implies(cc, cc.body), "A5"))
    psi = E.core.body.body.body
    chi = hcore(And(bw, phi))
    K = hcore(phi)
    theta = ForAll("w", Not(m))

    # not chi, purely propositionally
    nk = b.mp(b.dni(a), b.dni(Implies(a, Not(Not(a)))))
    bk = b.mp(nk, b.axiom(Implies(Not(K), Implies(bw, Not(K))), "A1"))
    nchi = b.mp(bk, b.dni(Implies(bw, Not(K))))
    assert nchi.core == Not(chi)

    # psi -> theta
    hp = b.assume(psi)
    i = b.mp(hp, b.axiom(Implies(psi, psi.body), "A5"))
    mc = b.mp(i, b.and_left(Implies(m, chi), Implies(chi, m)))
    x = b.mp(mc, b.contrapose(m, chi))
    g = b.gen(b.mp(nchi, x), "w")
    pt = b.discharge(g)

    # ex z . psi -> ex z . theta
    y1 = b.mp(pt, b.contrapose(psi, theta))
    y2 = b.mp(b.gen(y1, "z"), b.forall_dist("z", Not(theta), Not(psi)))
    y3 = b.mp(y2, b.contrapose(ForAll("z", Not(theta)), ForAll("z", Not(psi))))
    goal = b.mp(E, y3)
    return b.build(goal, parse(EMPTY_SET_GOAL))


def identity_proof(A="x in y") -> Proof:
    b = ProofBuilder()
    return b.build(b.identity(A))


def one_line_proofs() -> list:
    """Single-line proofs of each axiom shape."""
    texts = [
        ("x in y -> (y = x -> x in y)", "A1"),
        ("(x in y -> (y in x -> x = y)) -> ((x in y -> y in x) -> (x in y -> x = y))", "A2"),
        ("(~(x in y) -> ~(y = x)) -> (y = x -> x in y)", "A3"),
        ("(all z . (x in y -> z in x)) -> (x in y -> (all z . z in x))", "A4"),
        ("(all x . x in y) -> w in y", "A5"),
        ("x = y -> (x in z -> y in z)", "EQ1"),
        ("x = y -> (z in x -> z in y)", "EQ2"),
    ]
    out = [Proof(((parse(f), parse_justification(j)),)) for f, j in texts]
    for name in ZFC_NAMES:
        out.append(Proof(((zfc_axiom(name), ZFCAxiom(name)),)))
    out.append(Proof(((instantiate_schema("Comprehension", "~(x = w)", params=["w"]), SchemaInstance("Comprehension")),)))
    out.append(Proof(((instantiate_schema("Replacement", "y = x"), SchemaInstance("Replacement")),)))
    return out


def rename_proof() -> Proof:
    return Proof((
        (parse("x in y -> (y = z -> x in y)"), LogicalAxiom(1)),
        (parse("a in b -> (b = c -> a in b)"), Renaming(1, (("x", "a"), ("y", "b"), ("z", "c")))),
        (parse("all a . (a in b -> (b = c -> a in b))"), Generalization(2, "a")),
    ))


def proof_corpus() -> list:
    return [empty_set_proof(), identity_proof(), rename_proof()] + one_line_proofs()


# ---------------------------------------------------- checks on proofs

@dataclass
class SoundnessReport:
    lines: int = 0
    exempt: list = field(default_factory=list)
    failures: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.failures


def soundness_screen(p: Proof, structure=None, exempt: Iterable[str] = ("Infinity",)) -> SoundnessReport:
    """Every line of a valid proof must hold in a finite model of its premises.

    Lines are evaluated over V_4 (by default) with free variables read
    universally.  Lines resting on an exempt axiom are skipped and listed.
    """
    from .hf import v_stage
    from .logic import Structure

    s = structure or Structure.from_hfsets(v_stage(4))
    exempt = set(exempt)
    tainted = set()
    rep = SoundnessReport()
    for n, (f, j) in enumerate(p.lines, 1):
        refs = []
        if isinstance(j, ModusPonens):
            refs = [j.i, j.j]
        elif isinstance(j, (Generalization, Renaming)):
            refs = [j.i]
        if (isinstance(j, ZFCAxiom) and j.name in exempt) or any(r in tainted for r in refs):
            tainted.add(n)
            rep.exempt.append(n)
            continue
        rep.lines += 1
        fv = sorted(free_vars(f))
        if not truth_table(f, s, fv).all():
            rep.failures.append(n)
    return rep


_FLIPS = ("swap", "atom", "neg", "quant", "var")


def _subterms(f, path=()):
    yield path, f
    t = type(f)
    if t is Not:
        yield from _subterms(f.body, path + ("body",))
    elif t in (And, Or, Implies, Iff):
        yield from _subterms(f.left, path + ("left",))
        yield from _subterms(f.right, path + ("right",))
    elif t in (ForAll, Exists):
        yield from _subterms(f.body, path + ("body",))


def _replace(f, path, new):
    if not path:
        return new
    head, rest = path[0], path[1:]
    t = type(f)
    if t is Not:
        return Not(_replace(f.body, rest, new))
    if t in (And, Or, Implies, Iff):
        if head == "left":
            return t(_replace(f.left, rest, new), f.right)
        return t(f.left, _replace(f.right, rest, new))
    return t(f.var, _replace(f.body, rest, new), f.bound)


def _flip_node(g, kind, rng):
    t = type(g)
    if kind == "swap" and t in (Implies, Iff, And, Or) and g.left != g.right:
        return Implies(g.right, g.left) if t is Implies else {And: Or, Or: And, Iff: Implies}[t](g.left, g.right)
    if kind == "atom" and t is Member:
        return Equal(g.left, g.right)
    if kind == "atom" and t is Equal:
        return Member(g.left, g.right)
    if kind == "neg":
        return g.body if t is Not else Not(g)
    if kind == "quant" and t in (ForAll, Exists):
        return (Exists if t is ForAll else ForAll)(g.var, g.body, g.bound)
    if kind == "var" and t in (Member, Equal) and g.left != g.right:
        return t(g.right, g.left)
    return None


def mutate(p: Proof, rng: random.Random, kind: str | None = None):
    """One random single-point mutation, or None when the drawn one does not apply."""
    kind = kind or rng.choice(["operator", "index", "swap_lines", "rename"])
    lines = list(p.lines)
    if kind == "operator":
        n = rng.randrange(len(lines))
        f, j = lines[n]
        spots = list(_subterms(f))
        path, g = rng.choice(spots)
        new = _flip_node(g, rng.choice(_FLIPS), rng)
        if new is None:
            return None
        f2 = _replace(f, path, new)
        if hcore(f2) == hcore(f):
            return None
        lines[n] = (f2, j)
        return Proof(tuple(lines)), ("operator", n + 1)
    if kind == "index":
        cands = [n for n, (_, j) in enumerate(lines) if isinstance(j, (ModusPonens, Generalization, Renaming))]
        if not cands:
            return None
        n = rng.choice(cands)
        f, j = lines[n]
        d = rng.choice([-1, 1])
        if isinstance(j, ModusPonens):
            if rng.random() < 0.5:
                j2 = ModusPonens(j.i + d, j.j)
            else:
                j2 = ModusPonens(j.i, j.j + d)
        elif isinstance(j, Generalization):
            j2 = Generalization(j.i + d, j.var)
        else:
            j2 = Renaming(j.i + d, j.mapping)
        lines[n] = (f, j2)
        return Proof(tuple(lines)), ("index", n + 1)
    if kind == "swap_lines":
        if len(lines) < 2:
            return None
        n = rng.randrange(len(lines) - 1)
        if hcore(lines[n][0]) == hcore(lines[n + 1][0]):
            return None
        # swap the formulas, leaving the justifications in place
        (f1, j1), (f2, j2) = lines[n], lines[n + 1]
        lines[n], lines[n + 1] = (f2, j1), (f1, j2)
        return Proof(tuple(lines)), ("swap_lines", n + 1)
    if kind == "rename":
        cands = [n for n, (_, j) in enumerate(lines) if isinstance(j, Renaming)]
        if not cands:
            return None
        n = rng.choice(cands)
        f, j = lines[n]
        mp = list(j.mapping)
        if len(mp) < 2:
            return None
        a = rng.randrange(len(mp))
        b = (a + 1) % len(mp)
        mp[a] = (mp[a][0], mp[b][1])
        new = tuple(mp)
        try:
            f2 = hcore(rename(lines[j.i - 1][0], dict(new))) if len(set(v for _, v in new)) == len(new) else f
        except RenamingError:
            f2 = f
        lines[n] = (f2, Renaming(j.i, new))
        return Proof(tuple(lines)), ("rename", n + 1)
    raise ValueError(f"unknown mutation kind {kind!r}")


@dataclass
class MutationReport:
    total: int = 0
    rejected: int = 0
    survivors: list = field(default_factory=list)
    by_kind: dict = field(default_factory=dict)

    @property
    def rate(self) -> float:
        return self.rejected / self.total if self.total else 1.0


MUTATION_KINDS = ("operator", "index", "rename")


def mutation_suite(corpus: Sequence | None = None, n: int = 400, seed: int = 0,
                   kinds: Sequence = MUTATION_KINDS) -> MutationReport:
    """Apply random single mutations to the valid corpus and count rejections."""
    corpus = list(corpus) if corpus is not None else proof_corpus()
    rng = random.Random(seed)
    rep = MutationReport()
    kinds = list(kinds)
    attempts = 0
    while rep.total < n and attempts < 50 * n:
        attempts += 1
        kind = kinds[attempts % len(kinds)]
        p = rng.choice(corpus)
        got = mutate(p, rng, kind)
        if got is None:
            continue
        q, where = got
        rep.total += 1
        tally = rep.by_kind.setdefault(kind, [0, 0])
        tally[0] += 1
        if not check_proof(q):
            rep.rejected += 1
            tally[1] += 1
        else:
            rep.survivors.append(where)
    return rep
