"""The forcing relation over a finite poset and a bounded name universe.

Every forcing set is computed as a boolean vector over the poset's
elements, so one recursive call answers the question for all conditions at
once.  ``semantic_forces`` is the brute-force oracle: on a finite poset the
generic ideals are exactly the principal ideals of maximal elements.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import _kernels
from .errors import BudgetExceeded, EvaluationError, InfinitePosetError
from .forcing import Poset, maximal_elements, principal_ideal
from .logic import (And, Equal, Exists, ForAll, Formula, Iff, Implies, Member, Not, Or, as_formula,
                    free_vars, render, truth_table)
from .names import PName, mg_structure, name_universe, saturate, up_sets


class ForcingEnv:
    """A finite poset, a name universe and a variable binding.

    Names bound to variables are added to the universe together with their
    sub-names.  Memo tables live on the environment.
    """

    def __init__(self, P: Poset, universe: Iterable | None = None, binding: Mapping | None = None,
                 rank_bound: int = 2, budget: int = 200):
        if not P.finite:
            raise InfinitePosetError(f"forcing needs a finite poset, got {P.describe()}")
        self.P = P
        self.elements = P.elements()
        self.up = np.ascontiguousarray(P.up)
        self.binding = dict(binding or {})
        if universe is None:
            universe = name_universe(P, (), list(self.binding.values()), rank_bound, budget)
        U = dict.fromkeys(universe)
        for t in self.binding.values():
            for s in t.subnames():
                U.setdefault(s)
        self.universe = tuple(U)
        self.n = len(self.elements)
        self.kx = _kernels.for_size(self.n)
        self._ones = np.ones(self.n, dtype=bool)
        self._zeros = np.zeros(self.n, dtype=bool)
        self._tags = {}
        self._eq = {}
        self._mem = {}
        self._vec = {}
        self._worlds = None

    # ------------------------------------------------------------ helpers

    def with_names(self, names: Iterable) -> "ForcingEnv":
        """Same environment with extra names (and sub-names) in the universe."""
        extra = [s for t in names for s in t.subnames() if s not in set(self.universe)]
        if not extra:
            return self
        return ForcingEnv(self.P, list(self.universe) + extra, self.binding)

    def bind(self, **names) -> "ForcingEnv":
        b = dict(self.binding)
        b.update(names)
        return ForcingEnv(self.P, self.universe, b)

    def idx(self, p) -> int:
        try:
            return self.P.index[p]
        except KeyError:
            raise EvaluationError(f"{p!r} is not a condition of {self.P.describe()}") from None

    def tags(self, t: PName) -> dict:
        """member -> up-closed boolean vector of its tags (saturation applied)."""
        d = self._tags.get(t)
        if d is None:
            raw = {}
            for s, p in t.pairs:
                v = raw.get(s)
                if v is None:
                    v = raw[s] = np.zeros(self.n, dtype=bool)
                v[self.idx(p)] = True
            upT = np.ascontiguousarray(self.up.T)
            d = {s: self.kx.exists_above(upT, v) for s, v in raw.items()}
            self._tags[t] = d
        return d

    # -------------------------------------------------------------- atoms

    def eq_vec(self, a: PName, b: PName) -> np.ndarray:
        if a == b:
            return self._ones
        key = (a, b)
        r = self._eq.get(key)
        if r is not None:
            return r
        up = self.up
        r = self._ones.copy()
        for x, y in ((a, b), (b, a)):
            ty = self.tags(y)
            for s, T in self.tags(x).items():
                W = self._zeros.copy()
                for s2, T2 in ty.items():
                    W |= T2 & self.eq_vec(s, s2)
                r &= self.kx.forall_above(up, ~T | self.kx.exists_above(up, W))
                if not r.any():
                    break
            if not r.any():
                break
        self._eq[key] = r
        self._eq[(b, a)] = r
        return r

    def mem_vec(self, a: PName, b: PName) -> np.ndarray:
        key = (a, b)
        r = self._mem.get(key)
        if r is not None:
            return r
        W = self._zeros.copy()
        for s, T in self.tags(b).items():
            W |= T & self.eq_vec(a, s)
        r = self.kx.forall_above(self.up, self.kx.exists_above(self.up, W))
        self._mem[key] = r
        return r

    # ---------------------------------------------------------- formulas

    def _name(self, a, v):
        try:
            return a[v]
        except KeyError:
            raise EvaluationError(f"free variable {v!r} is not bound to a name") from None

    def vec(self, f: Formula, a: Mapping | None = None) -> np.ndarray:
        """Boolean vector: entry i says elements()[i] forces f."""
        f = as_formula(f)
        a = dict(self.binding if a is None else a)
        return self._v(f, a)

    def _v(self, f, a):
        fv = free_vars(f)
        key = (f, tuple(sorted((v, a[v]) for v in fv if v in a)))
        r = self._vec.get(key)
        if r is not None:
            return r
        up = self.up
        t = type(f)
        if t is Member:
            r = self.mem_vec(self._name(a, f.left), self._name(a, f.right))
        elif t is Equal:
            r = self.eq_vec(self._name(a, f.left), self._name(a, f.right))
        elif t is Not:
            r = ~self.kx.exists_above(up, self._v(f.body, a))
        elif t is And:
            r = self._v(f.left, a) & self._v(f.right, a)
        elif t is Implies:
            r = self.kx.forall_exists_above(up, self._v(f.left, a), self._v(f.right, a))
        elif t is Or:
            r = self._v(Not(And(Not(f.left), Not(f.right))), a)
        elif t is Iff:
            r = self._v(And(Implies(f.left, f.right), Implies(f.right, f.left)), a)
        elif t is ForAll and f.bound is not None:
            r = self._v(ForAll(f.var, Implies(Member(f.var, f.bound), f.body)), a)
        elif t is Exists:
            body = f.body if f.bound is None else And(Member(f.var, f.bound), f.body)
            r = self._v(Not(ForAll(f.var, Not(body))), a)
        elif t is ForAll:
            r = self._ones.copy()
            inner = dict(a)
            for tau in self.universe:
                inner[f.var] = tau
                r &= self.kx.forall_above(up, self.kx.exists_above(up, self._v(f.body, inner)))
                if not r.any():
                    break
        else:
            raise TypeError(f"not a formula: {f!r}")
        self._vec[key] = r
        return r

    # ------------------------------------------------------------- oracle

    def worlds(self) -> list:
        """(maximal m, structure of M[G_m], node of each universe name)."""
        if self._worlds is None:
            out = []
            for m in maximal_elements(self.P):
                G = principal_ideal(self.P, m)
                s, node = mg_structure(self.universe, G)
                out.append((m, s, node))
            self._worlds = out
        return self._worlds

    def oracle_vec(self, f: Formula, a: Mapping | None = None) -> np.ndarray:
        """Truth at every maximal m above p, computed by evaluating in M[G_m]."""
        f = as_formula(f)
        a = dict(self.binding if a is None else a)
        fv = sorted(free_vars(f))
        truth = self.truth_at_maximal(f, a, fv)
        out = self._ones.copy()
        up = self.up
        for (m, _, _), ok in zip(self.worlds(), truth):
            if not ok:
                out &= ~up[:, self.idx(m)]
        return out

    def truth_at_maximal(self, f, a, fv=None, tables=None) -> list:
        fv = sorted(free_vars(f)) if fv is None else fv
        out = []
        for k, (m, s, node) in enumerate(self.worlds()):
            tt = tables[k] if tables is not None else truth_table(f, s, fv)
            pos = tuple(s.index[node[self._name(a, v)]] for v in fv)
            out.append(bool(tt[pos]))
        return out


def forces_eq(p, t1: PName, t2: PName, env: ForcingEnv) -> bool:
    return bool(env.eq_vec(t1, t2)[env.idx(p)])


def forces_mem(p, t1: PName, t2: PName, env: ForcingEnv) -> bool:
    return bool(env.mem_vec(t1, t2)[env.idx(p)])


def forces(p, f, env: ForcingEnv, binding: Mapping | None = None) -> bool:
    return bool(env.vec(f, binding)[env.idx(p)])


def semantic_forces(p, f, env: ForcingEnv, binding: Mapping | None = None) -> bool:
    return bool(env.oracle_vec(f, binding)[env.idx(p)])


# -------------------------------------------------------------- FTF check

@dataclass
class FTFReport:
    checked: int = 0
    formulas: int = 0
    bindings: int = 0
    violations: list = field(default_factory=list)
    coherence_failures: list = field(default_factory=list)
    truth_failures: list = field(default_factory=list)
    dichotomy_failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not (self.violations or self.coherence_failures or self.truth_failures or self.dichotomy_failures)

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "checked": self.checked,
            "formulas": self.formulas,
            "bindings": self.bindings,
            "violations": self.violations,
            "coherence_failures": self.coherence_failures,
            "truth_failures": self.truth_failures,
            "dichotomy_failures": self.dichotomy_failures,
        }


def _binding_label(env, b, names):
    return {v: names.get(t, f"u{env.universe.index(t)}" if t in env.universe else "?") for v, t in b.items()}


def check_ftf(formulas: Sequence, env: ForcingEnv, bindings: Sequence | None = None,
              labels: Mapping | None = None, max_bindings: int | None = None) -> FTFReport:
    """Compare forces with the oracle for every formula, binding and condition.

    Also checks coherence (forcing sets are up-closed), truth at maximal
    elements, and that maximal elements decide every formula.  Bindings
    default to every assignment of the free variables into the universe.
    """
    labels = {t: n for n, t in (labels or {}).items()}
    rep = FTFReport()
    up = env.up
    els = env.elements
    maxi = [env.idx(m) for m, _, _ in env.worlds()]
    for f in formulas:
        f = as_formula(f)
        rep.formulas += 1
        fv = sorted(free_vars(f))
        if bindings is not None:
            bs = [dict(b) for b in bindings]
        else:
            bs = (dict(zip(fv, combo)) for combo in itertools.product(env.universe, repeat=len(fv)))
        tables = [truth_table(f, s, fv) for _, s, _ in env.worlds()]
        neg = Not(f)
        count = 0
        for b in bs:
            count += 1
            if max_bindings is not None and count > max_bindings:
                break
            a = dict(env.binding)
            a.update(b)
            F = env.vec(f, a)
            truth = env.truth_at_maximal(f, a, fv, tables)
            O = env._ones.copy()
            for i, ok in zip(maxi, truth):
                if not ok:
                    O &= ~up[:, i]
            rep.checked += env.n
            if not np.array_equal(F, O):
                for i in np.flatnonzero(F != O):
                    rep.violations.append({"p": _plabel(els[i]), "formula": render(f),
                                           "binding": _binding_label(env, b, labels),
                                           "forces": bool(F[i]), "oracle": bool(O[i])})
            if not _kernels.upward_closed(up, F):
                rep.coherence_failures.append({"formula": render(f), "binding": _binding_label(env, b, labels)})
            Fn = env.vec(neg, a)
            for i, ok in zip(maxi, truth):
                if bool(F[i]) != ok:
                    rep.truth_failures.append({"m": _plabel(els[i]), "formula": render(f),
                                               "binding": _binding_label(env, b, labels),
                                               "forces": bool(F[i]), "true": ok})
                if bool(F[i]) == bool(Fn[i]):
                    rep.dichotomy_failures.append({"m": _plabel(els[i]), "formula": render(f),
                                                   "binding": _binding_label(env, b, labels)})
        rep.bindings += min(count, max_bindings) if max_bindings is not None else count
    return rep


def _plabel(p):
    return p.to_json() if hasattr(p, "to_json") else p


# ------------------------------------------------- axiom-transfer names

def comprehension_name(t: PName, f, var: str, env: ForcingEnv, binding: Mapping | None = None) -> PName:
    """{(s, p) in t : p forces f(s)}, with t saturated first."""
    f = as_formula(f)
    t = saturate(t, env.P)
    env = env.with_names([t])
    a = dict(env.binding)
    a.update(binding or {})
    out = []
    for s in t.domain():
        a[var] = s
        F = env.vec(f, a)
        for s2, p in t.pairs:
            if s2 == s and F[env.idx(p)]:
                out.append((s, p))
    return PName(out)


def pairing_name(s: PName, t: PName, P: Poset) -> PName:
    tags = P.elements() if P.finite else (P.bottom,)
    return PName([(s, p) for p in tags] + [(t, p) for p in tags])


def union_name(t: PName, P: Poset | None = None) -> PName:
    """{(r, p) : (r, p) in s for some (s, p) in t}, on the saturated form of t."""
    if P is not None and P.finite:
        t = saturate(t, P)
    out = []
    for s, p in t.pairs:
        for r, q in s.pairs:
            if q == p:
                out.append((r, p))
    return PName(out)


def power_name(t: PName, env: ForcingEnv, budget: int = 5000) -> PName:
    """Tag by every condition each saturated sub-name of t.

    A saturated sub-name picks, for each member s of t, an up-set inside the
    tags of s.  Raises BudgetExceeded past ``budget`` sub-names.
    """
    P = env.P
    t = saturate(t, P)
    dom = t.domain()
    tags = env.tags(t)
    choices = []
    total = 1
    for s in dom:
        opts = list(up_sets(P, within=tags[s], limit=budget))
        choices.append(opts)
        total *= len(opts)
        if total > budget:
            raise BudgetExceeded(f"the power name would need more than {budget} sub-names")
    els = env.elements
    subs = []
    for pick in itertools.product(*choices):
        pairs = [(s, els[i]) for s, mask in zip(dom, pick) for i in np.flatnonzero(mask)]
        subs.append(PName(pairs))
    return PName((sub, p) for sub in subs for p in els)


def subset_witness(sigma: PName, t: PName, env: ForcingEnv) -> PName:
    """{(r, p) in t : p forces r in sigma}: the sub-name of t matching sigma."""
    t = saturate(t, env.P)
    env = env.with_names([t, sigma])
    out = []
    for r in t.domain():
        F = env.mem_vec(r, sigma)
        for r2, p in t.pairs:
            if r2 == r and F[env.idx(p)]:
                out.append((r, p))
    return PName(out)


def formula_family(vars2=("x", "y"), bounded: bool = True) -> list:
    """The standard check family: atoms, one level of connectives, one bounded quantifier."""
    x, y = vars2
    atoms = [Equal(x, y), Member(x, y), Member(y, x), Equal(x, x)]
    fam = list(atoms)
    fam += [Not(a) for a in atoms[:3]]
    fam += [Implies(atoms[0], atoms[1]), Implies(atoms[1], atoms[2]), And(atoms[1], Not(atoms[0]))]
    if bounded:
        z = "z"
        fam += [ForAll(z, Not(Member(z, x))),
                ForAll(z, Implies(Member(z, x), Equal(z, z))),
                ForAll(z, Not(Member(z, z)), x)]
    return fam
