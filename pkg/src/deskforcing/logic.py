"""First-order formulas in the language of set theory.

Terms are variables only and the atoms are ``x in y`` and ``x = y``.  The
ASCII syntax accepted by :func:`parse` is::

    formula := quant | iff
    quant   := ("all" | "ex") VAR ["in" VAR] "." formula
    iff     := imp {"<->" imp}
    imp     := or ["->" imp]
    or      := and {"|" and}
    and     := unary {"&" unary}
    unary   := "~" unary | atom
    atom    := VAR "in" VAR | VAR "=" VAR | "(" formula ")"

The unicode connectives are accepted as synonyms.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .errors import CaptureError, EvaluationError, FormulaSyntaxError, RenamingError
from .hf import HFSet, format_hf, parse_hf


@dataclass(frozen=True)
class Member:
    left: str
    right: str


@dataclass(frozen=True)
class Equal:
    left: str
    right: str


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Iff:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class ForAll:
    var: str
    body: "Formula"
    bound: str | None = None


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Formula"
    bound: str | None = None


Formula = Member | Equal | Not | And | Or | Implies | Iff | ForAll | Exists
ATOMS = (Member, Equal)
BINARY = (And, Or, Implies, Iff)
QUANTIFIERS = (ForAll, Exists)

DELTA0 = "Delta0"
SIGMA1 = "Sigma1"
PI1 = "Pi1"
HIGHER = "Higher"


# ---------------------------------------------------------------- parsing

KEYWORDS = {"all", "ex", "in"}
_UNICODE = {"∀": "all", "∃": "ex", "∈": "in", "¬": "~", "∧": "&", "∨": "|",
            "→": "->", "↔": "<->"}
_TOKEN = re.compile(r"\s*(<->|->|[~&|=().]|[A-Za-z_][A-Za-z0-9_]*'*|[∀∃∈¬∧∨→↔])")


def _tokenize(text):
    pos = 0
    out = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", pos)
        tok = _UNICODE.get(m.group(1), m.group(1))
        out.append((tok, m.start(1)))
        pos = m.end()
    out.append(("<end>", len(text)))
    return out


class _Parser:
    def __init__(self, text):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i][0]

    def pos(self):
        return self.toks[self.i][1]

    def take(self, expected=None):
        tok, pos = self.toks[self.i]
        if expected is not None and tok != expected:
            shown = "end of input" if tok == "<end>" else repr(tok)
            raise FormulaSyntaxError(f"expected {expected!r}, found {shown}", pos)
        self.i += 1
        return tok

    def var(self):
        tok, pos = self.toks[self.i]
        if tok in KEYWORDS or not (tok[0].isalpha() or tok[0] == "_"):
            shown = "end of input" if tok == "<end>" else repr(tok)
            raise FormulaSyntaxError(f"expected a variable, found {shown}", pos)
        self.i += 1
        return tok

    def formula(self):
        if self.peek() in ("all", "ex"):
            q = self.take()
            v = self.var()
            bound = None
            if self.peek() == "in":
                self.take()
                bound = self.var()
                if bound == v:
                    raise FormulaSyntaxError(f"variable {v!r} bounded by itself", self.pos())
            self.take(".")
            body = self.formula()
            return ForAll(v, body, bound) if q == "all" else Exists(v, body, bound)
        return self.iff()

    def iff(self):
        left = self.imp()
        while self.peek() == "<->":
            self.take()
            left = Iff(left, self.imp())
        return left

    def imp(self):
        left = self.disj()
        if self.peek() == "->":
            self.take()
            return Implies(left, self.imp())
        return left

    def disj(self):
        left = self.conj()
        while self.peek() == "|":
            self.take()
            left = Or(left, self.conj())
        return left

    def conj(self):
        left = self.unary()
        while self.peek() == "&":
            self.take()
            left = And(left, self.unary())
        return left

    def unary(self):
        if self.peek() == "~":
            self.take()
            return Not(self.unary())
        return self.atom()

    def atom(self):
        if self.peek() == "(":
            self.take()
            f = self.formula()
            self.take(")")
            return f
        a = self.var()
        tok = self.peek()
        if tok == "in":
            self.take()
            return Member(a, self.var())
        if tok == "=":
            self.take()
            return Equal(a, self.var())
        shown = "end of input" if tok == "<end>" else repr(tok)
        raise FormulaSyntaxError(f"expected 'in' or '=', found {shown}", self.pos())


def parse(text: str) -> Formula:
    p = _Parser(text)
    if p.peek() == "<end>":
        raise FormulaSyntaxError("empty formula", 0)
    f = p.formula()
    if p.peek() != "<end>":
        raise FormulaSyntaxError(f"unexpected {p.peek()!r}", p.pos())
    return f


def as_formula(f) -> Formula:
    return parse(f) if isinstance(f, str) else f


# -------------------------------------------------------------- rendering

_LEVEL = {ForAll: 0, Exists: 0, Iff: 1, Implies: 2, Or: 3, And: 4, Not: 5,
          Member: 6, Equal: 6}
_CHILD_LEVELS = {Iff: (1, 2), Implies: (3, 2), Or: (3, 4), And: (4, 5)}
_OPS = {Iff: "<->", Implies: "->", Or: "|", And: "&"}


def render(f: Formula, level: int = 0) -> str:
    t = type(f)
    if t is Member:
        s = f"{f.left} in {f.right}"
    elif t is Equal:
        s = f"{f.left} = {f.right}"
    elif t is Not:
        return "~(" + render(f.body) + ")"
    elif t in _OPS:
        lo, ro = _CHILD_LEVELS[t]
        s = f"{render(f.left, lo)} {_OPS[t]} {render(f.right, ro)}"
    else:
        q = "all" if t is ForAll else "ex"
        head = f"{q} {f.var}" + (f" in {f.bound}" if f.bound is not None else "")
        s = f"{head} . {render(f.body)}"
    if _LEVEL[t] < level:
        return "(" + s + ")"
    return s


# ------------------------------------------------------------------- JSON

def to_json(f: Formula) -> dict:
    t = type(f)
    if t in ATOMS:
        return {"op": "in" if t is Member else "eq", "left": f.left, "right": f.right}
    if t is Not:
        return {"op": "not", "body": to_json(f.body)}
    if t in BINARY:
        return {"op": t.__name__.lower(), "left": to_json(f.left), "right": to_json(f.right)}
    d = {"op": "all" if t is ForAll else "ex", "var": f.var, "body": to_json(f.body)}
    if f.bound is not None:
        d["bound"] = f.bound
    return d


_BY_OP = {"and": And, "or": Or, "implies": Implies, "iff": Iff}


def from_json(d: dict) -> Formula:
    op = d["op"]
    if op == "in":
        return Member(d["left"], d["right"])
    if op == "eq":
        return Equal(d["left"], d["right"])
    if op == "not":
        return Not(from_json(d["body"]))
    if op in _BY_OP:
        return _BY_OP[op](from_json(d["left"]), from_json(d["right"]))
    if op in ("all", "ex"):
        cls = ForAll if op == "all" else Exists
        return cls(d["var"], from_json(d["body"]), d.get("bound"))
    raise FormulaSyntaxError(f"unknown operator {op!r}")


# ------------------------------------------------------------ inspection

def free_vars(f: Formula) -> frozenset:
    t = type(f)
    if t in ATOMS:
        return frozenset((f.left, f.right))
    if t is Not:
        return free_vars(f.body)
    if t in BINARY:
        return free_vars(f.left) | free_vars(f.right)
    inner = free_vars(f.body) - {f.var}
    if f.bound is not None:
        inner = inner | {f.bound}
    return inner


def all_vars(f: Formula) -> frozenset:
    t = type(f)
    if t in ATOMS:
        return frozenset((f.left, f.right))
    if t is Not:
        return all_vars(f.body)
    if t in BINARY:
        return all_vars(f.left) | all_vars(f.right)
    out = all_vars(f.body) | {f.var}
    if f.bound is not None:
        out = out | {f.bound}
    return out


def subformulas(f: Formula) -> list:
    """All subformulas, children before parents, without repeats."""
    out = []
    seen = set()

    def walk(g):
        t = type(g)
        if t is Not or t in QUANTIFIERS:
            walk(g.body)
        elif t in BINARY:
            walk(g.left)
            walk(g.right)
        if g not in seen:
            seen.add(g)
            out.append(g)

    walk(f)
    return out


def size(f: Formula) -> int:
    t = type(f)
    if t in ATOMS:
        return 1
    if t is Not or t in QUANTIFIERS:
        return 1 + size(f.body)
    return 1 + size(f.left) + size(f.right)


def quantifier_depth(f: Formula) -> int:
    t = type(f)
    if t in ATOMS:
        return 0
    if t is Not:
        return quantifier_depth(f.body)
    if t in BINARY:
        return max(quantifier_depth(f.left), quantifier_depth(f.right))
    return 1 + quantifier_depth(f.body)


# ------------------------------------------------------- transformations

def rename(f: Formula, mapping: Mapping[str, str]) -> Formula:
    """Rename every occurrence, free or bound, of the mapped variables.

    The renaming, extended by the identity on unmapped variables of ``f``,
    must be injective on the variables of ``f``.
    """
    vs = all_vars(f)
    image = {}
    for v in vs:
        w = mapping.get(v, v)
        if w in image and image[w] != v:
            raise RenamingError(f"renaming sends both {image[w]!r} and {v!r} to {w!r}")
        image[w] = v
    return _rename(f, mapping)


def _rename(f, m):
    t = type(f)
    if t in ATOMS:
        return t(m.get(f.left, f.left), m.get(f.right, f.right))
    if t is Not:
        return Not(_rename(f.body, m))
    if t in BINARY:
        return t(_rename(f.left, m), _rename(f.right, m))
    b = None if f.bound is None else m.get(f.bound, f.bound)
    return t(m.get(f.var, f.var), _rename(f.body, m), b)


def substitute(f: Formula, var: str, term: str) -> Formula:
    """Replace the free occurrences of ``var`` by the variable ``term``."""
    if var == term:
        return f
    t = type(f)
    if t in ATOMS:
        return t(term if f.left == var else f.left, term if f.right == var else f.right)
    if t is Not:
        return Not(substitute(f.body, var, term))
    if t in BINARY:
        return t(substitute(f.left, var, term), substitute(f.right, var, term))
    bound = term if f.bound == var else f.bound
    if f.var == var:
        return t(f.var, f.body, bound)
    if var in free_vars(f.body):
        if f.var == term:
            raise CaptureError(f"substituting {term!r} for {var!r} would be captured")
        return t(f.var, substitute(f.body, var, term), bound)
    return t(f.var, f.body, bound)


def desugar(f: Formula) -> Formula:
    """Rewrite into Member, Equal, Not, And and unbounded ForAll only."""
    t = type(f)
    if t in ATOMS:
        return f
    if t is Not:
        return Not(desugar(f.body))
    if t is And:
        return And(desugar(f.left), desugar(f.right))
    if t is Or:
        return Not(And(Not(desugar(f.left)), Not(desugar(f.right))))
    if t is Implies:
        return Not(And(desugar(f.left), Not(desugar(f.right))))
    if t is Iff:
        a, b = desugar(f.left), desugar(f.right)
        return And(Not(And(a, Not(b))), Not(And(b, Not(a))))
    body = desugar(f.body)
    if t is ForAll:
        if f.bound is None:
            return ForAll(f.var, body)
        return ForAll(f.var, Not(And(Member(f.var, f.bound), Not(body))))
    if f.bound is None:
        return Not(ForAll(f.var, Not(body)))
    return Not(ForAll(f.var, Not(And(Member(f.var, f.bound), body))))


def is_core(f: Formula) -> bool:
    t = type(f)
    if t in ATOMS:
        return True
    if t is Not:
        return is_core(f.body)
    if t is And:
        return is_core(f.left) and is_core(f.right)
    if t is ForAll and f.bound is None:
        return is_core(f.body)
    return False


def is_delta0(f: Formula) -> bool:
    t = type(f)
    if t in ATOMS:
        return True
    if t is Not:
        return is_delta0(f.body)
    if t in BINARY:
        return is_delta0(f.left) and is_delta0(f.right)
    return f.bound is not None and is_delta0(f.body)


def classify(f: Formula) -> str:
    """Syntactic class: Delta0, Sigma1, Pi1 or Higher."""
    if is_delta0(f):
        return DELTA0
    for cls, label in ((Exists, SIGMA1), (ForAll, PI1)):
        g = f
        n = 0
        while type(g) is cls and g.bound is None:
            g = g.body
            n += 1
        if n and is_delta0(g):
            return label
    return HIGHER


def relativize(f: Formula, restrictor: str) -> Formula:
    """Restrict every unbounded quantifier to members of ``restrictor``."""
    if restrictor in all_vars(f):
        raise CaptureError(f"restrictor {restrictor!r} already occurs in the formula")
    return _relativize(f, restrictor)


def _relativize(f, m):
    t = type(f)
    if t in ATOMS:
        return f
    if t is Not:
        return Not(_relativize(f.body, m))
    if t in BINARY:
        return t(_relativize(f.left, m), _relativize(f.right, m))
    body = _relativize(f.body, m)
    if f.bound is not None:
        return t(f.var, body, f.bound)
    if t is ForAll:
        return ForAll(f.var, Implies(Member(f.var, m), body))
    return Exists(f.var, And(Member(f.var, m), body))


# ------------------------------------------------------------- structures

@dataclass(frozen=True)
class Tag:
    """A class of nodes assigned to a variable, read as a unary predicate."""
    nodes: frozenset


class Structure:
    """A finite membership structure: nodes plus an edge relation.

    ``edges`` holds pairs (child, parent) meaning child is a member of
    parent.  Equality is node identity.  ``labels`` optionally maps nodes to
    the HF sets they stand for.
    """

    def __init__(self, nodes: Iterable, edges: Iterable, labels: Mapping | None = None):
        self.nodes = tuple(dict.fromkeys(nodes))
        self.node_set = frozenset(self.nodes)
        self.edges = frozenset((a, b) for a, b in edges)
        for a, b in self.edges:
            if a not in self.node_set or b not in self.node_set:
                raise EvaluationError(f"edge ({a!r}, {b!r}) mentions an unknown node")
            if a == b:
                raise EvaluationError(f"node {a!r} cannot be a member of itself")
        mem = {n: [] for n in self.nodes}
        for a, b in self.edges:
            mem[b].append(a)
        order = {n: i for i, n in enumerate(self.nodes)}
        self.members = {n: tuple(sorted(v, key=order.__getitem__)) for n, v in mem.items()}
        self.labels = dict(labels) if labels else {}
        self.index = order
        self._adj = None

    def __len__(self):
        return len(self.nodes)

    def is_member(self, a, b) -> bool:
        return (a, b) in self.edges

    def adjacency(self) -> np.ndarray:
        """Boolean matrix A with A[i, j] true when node i is a member of node j."""
        if self._adj is None:
            n = len(self.nodes)
            a = np.zeros((n, n), dtype=bool)
            for x, y in self.edges:
                a[self.index[x], self.index[y]] = True
            self._adj = a
        return self._adj

    @classmethod
    def from_hfsets(cls, sets: Iterable[HFSet]) -> "Structure":
        """Nodes are the given sets, edges are the true membership among them."""
        order = sorted(set(sets), key=HFSet.key)
        ids = {x: i for i, x in enumerate(order)}
        edges = [(ids[m], ids[x]) for x in order for m in x.members if m in ids]
        return cls(range(len(order)), edges, {i: x for i, x in enumerate(order)})

    def node_for(self, x: HFSet):
        if not hasattr(self, "_by_label"):
            self._by_label = {lab: n for n, lab in self.labels.items()}
        try:
            return self._by_label[x]
        except KeyError:
            raise EvaluationError(f"{format_hf(x)} is not a node of the structure") from None

    def restrict(self, keep: Iterable) -> "Structure":
        keep = set(keep)
        nodes = [n for n in self.nodes if n in keep]
        edges = [(a, b) for a, b in self.edges if a in keep and b in keep]
        labels = {n: self.labels[n] for n in nodes if n in self.labels}
        return Structure(nodes, edges, labels)

    def to_json(self) -> dict:
        d = {"nodes": list(self.nodes), "edges": [[a, b] for a, b in sorted(self.edges, key=lambda e: (self.index[e[1]], self.index[e[0]]))]}
        if self.labels:
            d["labels"] = {str(n): format_hf(v) if isinstance(v, HFSet) else str(v) for n, v in self.labels.items()}
        return d

    @classmethod
    def from_json(cls, d: Mapping) -> "Structure":
        nodes = list(d["nodes"])
        by_str = {str(n): n for n in nodes}
        labels = {}
        for k, v in (d.get("labels") or {}).items():
            if k not in by_str:
                raise EvaluationError(f"label for unknown node {k!r}")
            labels[by_str[k]] = parse_hf(v)
        edges = []
        for e in d.get("edges", []):
            if len(e) != 2:
                raise EvaluationError(f"malformed edge {e!r}")
            edges.append((by_str.get(str(e[0]), e[0]), by_str.get(str(e[1]), e[1])))
        return cls(nodes, edges, labels)


def evaluate(f: Formula, s: Structure, assignment: Mapping | None = None) -> bool:
    """Tarskian truth of ``f`` in ``s`` under ``assignment``.

    A variable may be assigned a :class:`Tag`, in which case ``x in M`` means
    membership of x in the tagged class.
    """
    a = dict(assignment or {})
    missing = free_vars(f) - a.keys()
    if missing:
        raise EvaluationError(f"unassigned free variables: {', '.join(sorted(missing))}")
    for v, n in a.items():
        if not isinstance(n, Tag) and n not in s.node_set:
            raise EvaluationError(f"variable {v!r} is assigned {n!r}, which is not a node")
    return _eval(f, s, a)


def _node(a, v):
    n = a[v]
    if isinstance(n, Tag):
        raise EvaluationError(f"class variable {v!r} used as an element")
    return n


def _domain(s, a, bound):
    if bound is None:
        return s.nodes
    b = a[bound]
    if isinstance(b, Tag):
        return [n for n in s.nodes if n in b.nodes]
    return s.members[b]


def _eval(f, s, a):
    t = type(f)
    if t is Member:
        r = a[f.right]
        if isinstance(r, Tag):
            return _node(a, f.left) in r.nodes
        return (_node(a, f.left), r) in s.edges
    if t is Equal:
        return _node(a, f.left) == _node(a, f.right)
    if t is Not:
        return not _eval(f.body, s, a)
    if t is And:
        return _eval(f.left, s, a) and _eval(f.right, s, a)
    if t is Or:
        return _eval(f.left, s, a) or _eval(f.right, s, a)
    if t is Implies:
        return (not _eval(f.left, s, a)) or _eval(f.right, s, a)
    if t is Iff:
        return _eval(f.left, s, a) == _eval(f.right, s, a)
    dom = _domain(s, a, f.bound)
    old = a.get(f.var, _MISSING)
    try:
        if t is ForAll:
            for n in dom:
                a[f.var] = n
                if not _eval(f.body, s, a):
                    return False
            return True
        for n in dom:
            a[f.var] = n
            if _eval(f.body, s, a):
                return True
        return False
    finally:
        if old is _MISSING:
            a.pop(f.var, None)
        else:
            a[f.var] = old


_MISSING = object()


def truth_table(f: Formula, s: Structure, variables: list) -> np.ndarray:
    """Truth values of ``f`` for every assignment of ``variables`` to nodes.

    Returns a boolean array of shape ``(len(s),) * len(variables)`` whose
    entry at index tuple (i, j, ...) is the truth value with the variables
    sent to ``s.nodes[i], s.nodes[j], ...``.  Evaluation is vectorised over
    all assignments at once.
    """
    variables = list(variables)
    missing = free_vars(f) - set(variables)
    if missing:
        raise EvaluationError(f"unassigned free variables: {', '.join(sorted(missing))}")
    core = desugar(f)
    depth = len(variables) + quantifier_depth(core)
    n = len(s.nodes)
    adj = s.adjacency()
    env = {v: i for i, v in enumerate(variables)}
    out = _tt(core, env, len(variables), depth, n, adj)
    out = np.broadcast_to(out, (n,) * len(variables) + (1,) * (depth - len(variables)))
    return np.ascontiguousarray(out.reshape((n,) * len(variables)))


def _place(mat, ax1, ax2, depth, n):
    shape = [1] * depth
    if ax1 == ax2:
        shape[ax1] = n
        return np.diagonal(mat).reshape(shape)
    lo, hi = sorted((ax1, ax2))
    if ax1 > ax2:
        mat = mat.T
    shape[lo] = n
    shape[hi] = n
    return mat.reshape(shape)


def _tt(f, env, nxt, depth, n, adj):
    t = type(f)
    if t is Member:
        return _place(adj, env[f.left], env[f.right], depth, n)
    if t is Equal:
        return _place(np.eye(n, dtype=bool), env[f.left], env[f.right], depth, n)
    if t is Not:
        return ~_tt(f.body, env, nxt, depth, n, adj)
    if t is And:
        return _tt(f.left, env, nxt, depth, n, adj) & _tt(f.right, env, nxt, depth, n, adj)
    inner = dict(env)
    inner[f.var] = nxt
    body = _tt(f.body, inner, nxt + 1, depth, n, adj)
    return body.all(axis=nxt, keepdims=True)


# ------------------------------------------------------ formula library

NAMED = {
    "Empty": "all y . ~(y in x)",
    "Ord": "(all y in x . all z in y . z in x) & (all y in x . all z in x . (y in z | z in y | y = z))",
    "Transitive": "all y in x . all z in y . z in x",
    "Extensionality": "all x . all y . ((all z . (z in x <-> z in y)) <-> x = y)",
    "Pairing": "all x . all y . ex z . (x in z & y in z)",
}


def named(name: str) -> Formula:
    return parse(NAMED[name])
