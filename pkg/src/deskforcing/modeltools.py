"""Finite model tools: extensionality, Mostowski collapse, reflection closure."""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .errors import EvaluationError, NotExtensional, NotWellFounded
from .hf import HFSet, format_hf
from . import logic
from .logic import Structure, Tag, as_formula, evaluate, free_vars, relativize


class MembershipDigraph:
    """Nodes with display labels and edges (member, container)."""

    def __init__(self, nodes: Iterable, edges: Iterable, labels: Mapping | None = None):
        self.nodes = tuple(dict.fromkeys(nodes))
        known = set(self.nodes)
        self.edges = frozenset((a, b) for a, b in edges)
        for a, b in self.edges:
            if a not in known or b not in known:
                raise EvaluationError(f"edge ({a!r}, {b!r}) mentions an unknown node")
        self.labels = {n: str((labels or {}).get(n, n)) for n in self.nodes}
        ins = {n: set() for n in self.nodes}
        for a, b in self.edges:
            ins[b].add(a)
        self.in_neighbors = {n: frozenset(v) for n, v in ins.items()}

    @classmethod
    def from_json(cls, d: Mapping) -> "MembershipDigraph":
        nodes = list(d["nodes"])
        by_str = {str(n): n for n in nodes}
        edges = [(by_str.get(str(a), a), by_str.get(str(b), b)) for a, b in d.get("edges", [])]
        labels = {by_str.get(str(k), k): v for k, v in (d.get("labels") or {}).items()}
        return cls(nodes, edges, labels)

    def to_json(self) -> dict:
        order = {n: i for i, n in enumerate(self.nodes)}
        return {
            "nodes": list(self.nodes),
            "edges": [[a, b] for a, b in sorted(self.edges, key=lambda e: (order[e[1]], order[e[0]]))],
            "labels": {str(n): lab for n, lab in self.labels.items()},
        }

    @classmethod
    def from_structure(cls, s: Structure) -> "MembershipDigraph":
        labels = {n: format_hf(v, numerals=True) for n, v in s.labels.items()} if s.labels else None
        return cls(s.nodes, s.edges, labels)

    def restrict(self, keep: Iterable) -> "MembershipDigraph":
        keep = set(keep)
        return MembershipDigraph([n for n in self.nodes if n in keep],
                                 [(a, b) for a, b in self.edges if a in keep and b in keep],
                                 {n: self.labels[n] for n in self.nodes if n in keep})


@dataclass(frozen=True)
class ExtensionalityVerdict:
    extensional: bool
    witness: tuple | None = None

    def __bool__(self):
        return self.extensional


def check_extensional(g: MembershipDigraph) -> ExtensionalityVerdict:
    """Distinct nodes must have distinct in-neighbour sets."""
    seen = {}
    for n in g.nodes:
        key = g.in_neighbors[n]
        if key in seen:
            return ExtensionalityVerdict(False, (seen[key], n))
        seen[key] = n
    return ExtensionalityVerdict(True)


def topological_order(g: MembershipDigraph) -> list:
    """Members before containers; raises NotWellFounded on a cycle."""
    indeg = {n: len(g.in_neighbors[n]) for n in g.nodes}
    out = {n: [] for n in g.nodes}
    for a, b in g.edges:
        out[a].append(b)
    ready = [n for n in g.nodes if indeg[n] == 0]
    order = []
    while ready:
        n = ready.pop(0)
        order.append(n)
        for m in out[n]:
            indeg[m] -= 1
            if indeg[m] == 0:
                ready.append(m)
    if len(order) != len(g.nodes):
        stuck = [n for n in g.nodes if indeg[n] > 0]
        raise NotWellFounded(f"membership cycle through {stuck[0]!r}")
    return order


def mostowski_collapse(g: MembershipDigraph) -> dict:
    """f(x) = {f(y) : y in x}, computed members-first."""
    order = topological_order(g)
    v = check_extensional(g)
    if not v:
        a, b = v.witness
        raise NotExtensional(f"nodes {a!r} and {b!r} have the same members")
    f = {}
    for n in order:
        f[n] = HFSet(f[m] for m in g.in_neighbors[n])
    return f


def example_digraph() -> MembershipDigraph:
    """M = {1, 2, 2022, w, w*2022, {2022, w*2022}} with the true membership among them."""
    nodes = ["1", "2", "2022", "w", "w*2022", "{2022,w*2022}"]
    edges = [("1", "2"), ("1", "2022"), ("2", "2022"),
             ("1", "w"), ("2", "w"), ("2022", "w"),
             ("1", "w*2022"), ("2", "w*2022"), ("2022", "w*2022"), ("w", "w*2022"),
             ("2022", "{2022,w*2022}"), ("w*2022", "{2022,w*2022}")]
    return MembershipDigraph(nodes, edges)


# ------------------------------------------------------------ reflection

def _fresh(avoid, base="M"):
    name = base
    i = 0
    while name in avoid:
        i += 1
        name = f"{base}{i}"
    return name


def check_reflection(f, M: Iterable, ambient: Structure, params: Mapping | None = None) -> bool:
    """Whether f and its relativisation to M agree over the ambient structure."""
    f = as_formula(f)
    M = frozenset(M)
    params = dict(params or {})
    for v, n in params.items():
        if n not in M:
            raise EvaluationError(f"parameter {v!r} = {n!r} lies outside M")
    tag = _fresh(logic.all_vars(f) | params.keys())
    rel = relativize(f, tag)
    a = dict(params)
    a[tag] = Tag(M)
    return evaluate(f, ambient, params) == evaluate(rel, ambient, a)


def reflects_everywhere(f, M: Iterable, ambient: Structure) -> bool:
    """check_reflection for every assignment of the free variables into M."""
    f = as_formula(f)
    M = [n for n in ambient.nodes if n in set(M)]
    fv = sorted(free_vars(f))
    for combo in itertools.product(M, repeat=len(fv)):
        if not check_reflection(f, M, ambient, dict(zip(fv, combo))):
            return False
    return True


def check_absolute(f, M: Iterable, ambient: Structure, params: Mapping | None = None) -> bool:
    """Truth in the substructure on M equals truth in the ambient structure."""
    f = as_formula(f)
    sub = ambient.restrict(M)
    return evaluate(f, sub, params) == evaluate(f, ambient, params)


@dataclass
class ReflectionReport:
    closure: tuple
    verdicts: dict
    collapse: dict | None
    rounds: int
    witnesses: list = field(default_factory=list)

    def to_json(self, ambient: Structure) -> dict:
        def lab(n):
            v = ambient.labels.get(n)
            return format_hf(v, numerals=True) if isinstance(v, HFSet) else str(n)

        return {
            "closure": [lab(n) for n in self.closure],
            "verdicts": {k: v for k, v in self.verdicts.items()},
            "collapse": None if self.collapse is None else {lab(n): format_hf(v, numerals=True) for n, v in self.collapse.items()},
            "rounds": self.rounds,
        }


def _witness_order(ambient: Structure):
    if ambient.labels and all(n in ambient.labels for n in ambient.nodes):
        return sorted(ambient.nodes, key=lambda n: ambient.labels[n].key())
    g = MembershipDigraph(ambient.nodes, ambient.edges)
    order = topological_order(g)
    height = {}
    for n in order:
        height[n] = 1 + max((height[m] for m in g.in_neighbors[n]), default=-1)
    pos = {n: i for i, n in enumerate(ambient.nodes)}
    return sorted(ambient.nodes, key=lambda n: (height[n], pos[n]))


def reflect_closure(formulas, ambient: Structure, seed: Iterable = (), extensional: bool = False,
                    max_rounds: int = 10_000) -> ReflectionReport:
    """Close seed under minimal witnesses for every listed formula and its negation.

    The list is the given formulas, their subformulas and (if requested)
    Extensionality.  For each formula psi in it, each free variable x of psi
    and each assignment of the other free variables into M: if some ambient
    node makes psi (or not psi) true but none in M does, the least such node
    (by rank, then canonical order) is added.  Rounds repeat until nothing
    changes.
    """
    fs = [as_formula(f) for f in formulas]
    pool = list(fs)
    if extensional:
        pool.append(logic.named("Extensionality"))
    listed = []
    for f in pool:
        for g in logic.subformulas(f):
            if g not in listed:
                listed.append(g)
    checks = []
    for g in listed:
        for h in (g, logic.Not(g)):
            fv = sorted(free_vars(h))
            for x in fv:
                checks.append((h, x, [v for v in fv if v != x]))

    order = _witness_order(ambient)
    rank_of = [ambient.index[n] for n in order]
    tables = [(h, x, others, logic.truth_table(h, ambient, others + [x])) for h, x, others in checks]
    M = set(seed)
    for n in M:
        if n not in ambient.node_set:
            raise EvaluationError(f"seed node {n!r} is not in the ambient structure")
    witnesses = []
    rounds = 0
    while True:
        rounds += 1
        if rounds > max_rounds:
            raise RuntimeError("reflection closure did not stabilise")
        added = False
        current = [ambient.index[n] for n in order if n in M]
        inside = np.zeros(len(ambient.nodes), dtype=bool)
        inside[current] = True
        for h, x, others, tt in tables:
            for combo in itertools.product(current, repeat=len(others)):
                row = tt[combo]
                if (row & inside).any():
                    continue
                for i in rank_of:
                    if row[i]:
                        n = ambient.nodes[i]
                        M.add(n)
                        inside[i] = True
                        witnesses.append((h, x, {v: ambient.nodes[c] for v, c in zip(others, combo)}, n))
                        added = True
                        break
        if not added:
            break
    closure = tuple(n for n in ambient.nodes if n in M)
    verdicts = {logic.render(f): reflects_everywhere(f, closure, ambient) for f in fs}
    collapse = None
    g = MembershipDigraph(closure, [(a, b) for a, b in ambient.edges if a in M and b in M])
    if check_extensional(g):
        collapse = mostowski_collapse(g)
    return ReflectionReport(closure, verdicts, collapse, rounds, witnesses)


def load_digraph(path) -> MembershipDigraph:
    with open(path) as fh:
        return MembershipDigraph.from_json(json.load(fh))
