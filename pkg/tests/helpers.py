"""Shared random generators and oracles for the test suite."""
import random

from deskforcing.forcing import maximal_elements, principal_ideal
from deskforcing.forcingrel import ForcingEnv, comprehension_name
from deskforcing.logic import Structure, evaluate, parse
from deskforcing.names import EMPTY_NAME, PName, eval_name

COMPREHENSION_FORMULAS = [parse(t) for t in [
    "ex w in x . w = w",
    "all w in x . ~(w in w)",
    "x = y",
    "x in y",
    "~(y in x)",
    "all w in x . w in y",
    "ex w in y . x in w",
    "~(x = x)",
]]


def random_name(rng, conds, depth):
    if depth == 0:
        return EMPTY_NAME
    subs = [random_name(rng, conds, depth - 1) for _ in range(rng.randint(0, 3))]
    return PName((s, rng.choice(conds)) for s in subs)


def comprehension_case(P, rng):
    conds = P.elements()
    tau = random_name(rng, conds, rng.randint(1, 3))
    param = random_name(rng, conds, rng.randint(0, 2))
    phi = rng.choice(COMPREHENSION_FORMULAS)
    return tau, param, phi


def comprehension_failures(P, tau, param, phi, env=None):
    """Maximal ideals where the comprehension name disagrees with the direct filter."""
    env = env or ForcingEnv(P, universe=[], binding={"y": param})
    env = env.with_names([tau, param])
    c = comprehension_name(tau, phi, "x", env, {"y": param})
    bad = []
    for m in maximal_elements(P):
        G = principal_ideal(P, m)
        vals = {}
        for t in list(env.universe) + [c]:
            for s in t.subnames():
                vals.setdefault(s, eval_name(s, G))
        M = Structure.from_hfsets(vals.values())
        yv = vals[param]
        want = {eval_name(s, G) for s, p in tau.pairs if p in G
                if evaluate(phi, M, {"x": M.node_for(vals[s]), "y": M.node_for(yv)})}
        if set(eval_name(c, G).members) != want:
            bad.append(m)
    return bad


def rng_for(seed):
    return random.Random(seed)


def random_delta0(rng, free=("x", "y"), depth=3, _fresh=None):
    """A random formula whose quantifiers are all bounded by variables in scope."""
    from deskforcing.logic import And, Equal, Exists, ForAll, Implies, Member, Not, Or
    fresh = _fresh if _fresh is not None else iter(f"v{i}" for i in range(1000))
    scope = list(free)
    if depth == 0 or rng.random() < 0.25:
        a, b = rng.choice(scope), rng.choice(scope)
        return Member(a, b) if rng.random() < 0.7 else Equal(a, b)
    k = rng.randrange(6)
    if k == 0:
        return Not(random_delta0(rng, scope, depth - 1, fresh))
    if k in (1, 2, 3):
        op = (And, Or, Implies)[k - 1]
        return op(random_delta0(rng, scope, depth - 1, fresh), random_delta0(rng, scope, depth - 1, fresh))
    v = next(fresh)
    bound = rng.choice(scope)
    body = random_delta0(rng, scope + [v], depth - 1, fresh)
    return (ForAll if k == 4 else Exists)(v, body, bound)


def random_transitive(rng, universe, k):
    """Transitive closure of k random sets from ``universe`` (HF sets)."""
    from deskforcing.hf import transitive_closure
    picks = rng.sample(universe, min(k, len(universe)))
    out = set(picks)
    for x in picks:
        out |= set(transitive_closure(x))
    return out
