from types import SimpleNamespace

import numpy as np
import pytest

from deskforcing import forcingrel
from deskforcing.errors import BudgetExceeded, EvaluationError, InfinitePosetError
from deskforcing.forcing import Explicit, FiniteGrid, InfiniteGrid, maximal_elements, principal_ideal
from deskforcing.forcingrel import (ForcingEnv, check_ftf, formula_family, forces, forces_eq,
                                    forces_mem, pairing_name, power_name, semantic_forces, subset_witness,
                                    union_name)
from deskforcing.hf import HFSet
from deskforcing.logic import parse
from deskforcing.names import EMPTY_NAME, PName, canonical_name, eval_name, tau_example

from helpers import comprehension_case, comprehension_failures, random_name, rng_for

V = Explicit(["0", "p", "q"], [("0", "p"), ("0", "q")])
A = PName([(EMPTY_NAME, "p")])       # {empty} under p, empty under q


def _env(**binding):
    return ForcingEnv(V, binding=binding)


def _forcing_set(f, env):
    return [c for c in V.elements() if forces(c, parse(f), env)]


def test_member_and_negation():
    env = _env(x=A, y=EMPTY_NAME)
    assert _forcing_set("y in x", env) == ["p"]
    assert _forcing_set("~(y in x)", env) == ["q"]


def test_excluded_middle_forced_everywhere():
    env = _env(x=A, y=EMPTY_NAME)
    assert _forcing_set("y in x | ~(y in x)", env) == ["0", "p", "q"]
    # but neither disjunct is forced by the bottom
    assert not forces("0", parse("y in x"), env) and not forces("0", parse("~(y in x)"), env)


def test_equality():
    env = _env(x=A, y=EMPTY_NAME)
    assert _forcing_set("x = y", env) == ["q"]
    assert _forcing_set("~(x = y)", env) == ["p"]
    assert forces_eq("0", A, A, env)
    assert forces_mem("p", EMPTY_NAME, A, env)


def test_implication():
    env = _env(x=A, y=EMPTY_NAME)
    # every extension forcing y in x also forces ~(x = y): holds at all conditions
    assert _forcing_set("y in x -> ~(x = y)", env) == ["0", "p", "q"]
    assert _forcing_set("x = y -> y in x", env) == ["p"]


def test_forces_agrees_with_semantics_small():
    env = _env(x=A, y=EMPTY_NAME)
    for f in formula_family():
        for c in V.elements():
            assert forces(c, f, env) == semantic_forces(c, f, env)


def test_tau_example_forcing():
    P, n = tau_example()
    env = ForcingEnv(P, binding={"x": n["tau"], "y": n["rho"]})
    for f in ["y in x", "x = y", "~(y in x)", "ex z in x . z = y"]:
        for c in P.elements():
            assert forces(c, parse(f), env) == semantic_forces(c, parse(f), env)


def test_coherence_and_dichotomy_on_maximal():
    env = ForcingEnv(FiniteGrid(1, 1), rank_bound=1)
    maxi = [env.idx(m) for m in maximal_elements(env.P)]
    for f in formula_family():
        F = env.vec(f, {"x": env.universe[1], "y": env.universe[-1]})
        N = env.vec(parse("~(" + forcingrel.render(f) + ")"), {"x": env.universe[1], "y": env.universe[-1]})
        assert all(F[i] != N[i] for i in maxi)
        assert not (F & N).any()


def test_ftf_rank_one():
    env = ForcingEnv(FiniteGrid(1, 1), rank_bound=1)
    rep = check_ftf(formula_family(), env)
    assert rep.ok and rep.checked > 0
    assert rep.to_json()["violations"] == []


def test_ftf_detects_corrupted_equality(monkeypatch):
    env = ForcingEnv(FiniteGrid(1, 1), rank_bound=1)
    real = ForcingEnv.eq_vec

    def broken(self, a, b):
        r = real(self, a, b)
        return np.ones_like(r) if a != b else r

    monkeypatch.setattr(ForcingEnv, "eq_vec", broken)
    rep = check_ftf(formula_family(), env)
    assert not rep.ok and rep.violations


def test_ftf_detects_corrupted_negation():
    env = ForcingEnv(FiniteGrid(1, 1), rank_bound=1)
    real = env.kx
    # drop the "some extension" step from every kernel call of this environment
    env.kx = SimpleNamespace(exists_above=lambda up, v: v.copy(), forall_above=real.forall_above,
                             forall_exists_above=real.forall_exists_above)
    rep = check_ftf([parse("~(x in y)")], env)
    assert not rep.ok


def test_kernel_set_chosen_by_size():
    from deskforcing import _kernels
    assert ForcingEnv(FiniteGrid(1, 1)).kx is _kernels.for_size(3)
    assert _kernels.for_size(10_000).exists_above is _kernels.numpy_impl.exists_above


def test_env_errors():
    with pytest.raises(InfinitePosetError):
        ForcingEnv(InfiniteGrid(2))
    env = _env(x=A)
    with pytest.raises(EvaluationError):
        forces("0", parse("x = z"), env)
    with pytest.raises(EvaluationError):
        forces("nope", parse("x = x"), env)


def test_check_ftf_with_explicit_bindings():
    env = ForcingEnv(FiniteGrid(1, 1), rank_bound=1)
    rep = check_ftf([parse("x in y")], env, bindings=[{"x": EMPTY_NAME, "y": env.universe[-1]}])
    assert rep.ok and rep.bindings == 1


# ------------------------------------------------------- transfer names

def test_comprehension_random_cases():
    P = FiniteGrid(1, 2)
    rng = rng_for(17)
    for _ in range(30):
        tau, param, phi = comprehension_case(P, rng)
        assert comprehension_failures(P, tau, param, phi) == []


def test_comprehension_oracle_catches_wrong_name(monkeypatch):
    P = FiniteGrid(1, 2)
    tau = PName([(EMPTY_NAME, P.bottom), (canonical_name(HFSet([HFSet()]), P), P.bottom)])
    monkeypatch.setattr("helpers.comprehension_name", lambda t, *a, **k: t)
    assert comprehension_failures(P, tau, EMPTY_NAME, parse("x = x")) == []
    assert comprehension_failures(P, tau, EMPTY_NAME, parse("x = y"))


def test_pairing_and_union_names():
    P = FiniteGrid(1, 2)
    rng = rng_for(5)
    conds = P.elements()
    for _ in range(40):
        s, t = random_name(rng, conds, 2), random_name(rng, conds, 3)
        pr, un = pairing_name(s, t, P), union_name(t, P)
        for m in maximal_elements(P):
            G = principal_ideal(P, m)
            assert eval_name(pr, G) == HFSet([eval_name(s, G), eval_name(t, G)])
            expect = set()
            for y in eval_name(t, G).members:
                expect |= set(y.members)
            assert set(eval_name(un, G).members) == expect


def test_power_name():
    P = FiniteGrid(1, 1)
    rng = rng_for(8)
    for _ in range(10):
        t = random_name(rng, P.elements(), 2)
        env = ForcingEnv(P, rank_bound=2, budget=80).with_names([t])
        pw = power_name(t, env)
        for m in maximal_elements(P):
            G = principal_ideal(P, m)
            tv = eval_name(t, G)
            pv = eval_name(pw, G)
            assert all(set(x.members) <= set(tv.members) for x in pv.members)
            for u in env.universe:
                uv = eval_name(u, G)
                if set(uv.members) <= set(tv.members):
                    assert uv in pv


def test_power_name_budget():
    P = FiniteGrid(1, 2)
    t = canonical_name(HFSet([HFSet(), HFSet([HFSet()])]), P)
    with pytest.raises(BudgetExceeded):
        power_name(t, ForcingEnv(P, universe=[]), budget=10)


def test_subset_witness():
    P = FiniteGrid(1, 1)
    rng = rng_for(3)
    for _ in range(20):
        sigma, t = random_name(rng, P.elements(), 2), random_name(rng, P.elements(), 2)
        env = ForcingEnv(P, universe=[]).with_names([sigma, t])
        w = subset_witness(sigma, t, env)
        for m in maximal_elements(P):
            G = principal_ideal(P, m)
            assert set(eval_name(w, G).members) == set(eval_name(sigma, G).members) & set(eval_name(t, G).members)
