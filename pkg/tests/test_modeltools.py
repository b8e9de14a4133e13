import itertools
import random
import time

import pytest
from hypothesis import given, settings, strategies as st

from deskforcing.errors import EvaluationError, NotExtensional, NotWellFounded
from deskforcing.hf import HFSet, format_hf, is_transitive, parse_hf, v_stage, von_neumann
from deskforcing.logic import Structure, evaluate, named, parse
from deskforcing.modeltools import (MembershipDigraph, check_absolute, check_extensional, check_reflection,
                                    mostowski_collapse, example_digraph, reflect_closure,
                                    reflects_everywhere)


def test_example_digraph_extensional():
    assert check_extensional(example_digraph())


def test_two_isolated_nodes():
    v = check_extensional(MembershipDigraph(["a", "b"], []))
    assert not v and set(v.witness) == {"a", "b"}


def test_single_node():
    assert check_extensional(MembershipDigraph(["a"], []))


def test_example_collapse():
    g = example_digraph()
    t0 = time.perf_counter()
    f = mostowski_collapse(g)
    elapsed = time.perf_counter() - t0
    image = {format_hf(v, numerals=True) for v in f.values()}
    assert image == {"0", "1", "2", "3", "4", "{2,4}"}
    assert f["{2022,w*2022}"] == HFSet([von_neumann(2), von_neumann(4)])
    assert elapsed < 0.01


def test_collapse_of_transitive_set_is_identity():
    s = Structure.from_hfsets([von_neumann(k) for k in range(4)])
    g = MembershipDigraph.from_structure(s)
    f = mostowski_collapse(g)
    assert all(f[n] == s.labels[n] for n in s.nodes)


def test_collapse_chain():
    g = MembershipDigraph(["a", "b", "c"], [("a", "b"), ("b", "c")])
    f = mostowski_collapse(g)
    assert f == {"a": parse_hf("0"), "b": parse_hf("{0}"), "c": parse_hf("{{0}}")}


def test_collapse_errors():
    with pytest.raises(NotExtensional):
        mostowski_collapse(MembershipDigraph(["a", "b"], []))
    with pytest.raises(NotWellFounded):
        mostowski_collapse(MembershipDigraph(["a", "b", "c"], [("a", "b"), ("b", "c"), ("c", "a")]))


def test_digraph_json_round_trip():
    g = example_digraph()
    h = MembershipDigraph.from_json(g.to_json())
    assert h.nodes == g.nodes and h.edges == g.edges


def _random_extensional_dag(rng, n):
    # build bottom-up, giving every new node a fresh in-neighbour set
    nodes, ins = [], []
    for i in range(n):
        for _ in range(50):
            k = rng.randint(0, len(nodes))
            s = frozenset(rng.sample(nodes, k)) if nodes else frozenset()
            if s not in ins:
                break
        else:
            continue
        nodes.append(i)
        ins.append(s)
    edges = [(a, b) for b, s in zip(nodes, ins) for a in s]
    return MembershipDigraph(nodes, edges)


def test_collapse_is_isomorphism_with_transitive_image():
    rng = random.Random(7)
    for _ in range(100):
        g = _random_extensional_dag(rng, rng.randint(1, 9))
        f = mostowski_collapse(g)
        assert len(set(f.values())) == len(g.nodes)
        assert is_transitive(f.values())
        for a, b in itertools.product(g.nodes, repeat=2):
            assert ((a, b) in g.edges) == (f[a] in f[b])


# ------------------------------------------------------------- reflection

V4 = Structure.from_hfsets(v_stage(4))


def test_reflect_trivial():
    seed = [V4.node_for(von_neumann(2))]
    rep = reflect_closure([parse("x = x")], V4, seed)
    assert set(rep.closure) == set(seed)


def test_reflect_adds_minimal_member():
    x = V4.node_for(HFSet([von_neumann(1), von_neumann(2)]))
    rep = reflect_closure([parse("ex y . y in x")], V4, [x])
    # one round adds the least-rank member {0} = 1 for x, then 0 for 1
    assert V4.node_for(von_neumann(1)) in rep.closure
    assert V4.node_for(von_neumann(2)) not in rep.closure


def test_reflect_empty_set_formula():
    phi = parse("ex y . all z . ~(z in y)")
    rep = reflect_closure([phi], V4, [])
    assert check_reflection(phi, rep.closure, V4)
    assert V4.node_for(von_neumann(0)) in rep.closure


def test_reflection_of_delta0_on_transitive():
    M = [V4.node_for(von_neumann(k)) for k in range(4)]
    for f in [named("Transitive"), named("Ord"), parse("all y in x . ~(y = y)")]:
        assert reflects_everywhere(f, M, V4)


def test_omega_stand_in_does_not_reflect():
    amb = Structure.from_hfsets(v_stage(5))
    M = [amb.node_for(von_neumann(k)) for k in range(5)]
    psi = parse("all y . (x in y | y in x | x = y)")
    for n in M:
        assert not check_reflection(psi, M, amb, {"x": n})


def test_reflection_params_outside():
    with pytest.raises(EvaluationError):
        check_reflection(parse("x = x"), [0], V4, {"x": 5})


FORMULAS = [parse(t) for t in [
    "ex y . y in x",
    "ex y . all z . ~(z in y)",
    "all y in x . ex z . z in y",
    "ex z . (x in z & y in z)",
    "all y . (y in x -> (ex w . w in y))",
]]


def test_reflect_closure_fixed_point():
    seed = [V4.node_for(parse_hf("{{1}}")), V4.node_for(von_neumann(3))]
    rep = reflect_closure(FORMULAS, V4, seed)
    assert all(rep.verdicts.values())
    again = reflect_closure(FORMULAS, V4, rep.closure)
    assert set(again.closure) == set(rep.closure)


@given(st.lists(st.sampled_from(sorted(v_stage(3), key=HFSet.key)), max_size=3))
@settings(max_examples=25, deadline=None)
def test_reflect_closure_reflects(seed):
    rep = reflect_closure(FORMULAS[:3], V4, [V4.node_for(x) for x in seed])
    for f in FORMULAS[:3]:
        assert reflects_everywhere(f, rep.closure, V4)


def test_absoluteness_transitive_delta0():
    M = [V4.node_for(von_neumann(k)) for k in range(4)]
    f = parse("all y in x . all z in y . z in x")
    for n in M:
        assert check_absolute(f, M, V4, {"x": n})


def test_empty_not_absolute_for_nontransitive():
    amb = Structure.from_hfsets([von_neumann(k) for k in range(3)])
    M = [amb.node_for(von_neumann(1)), amb.node_for(von_neumann(2))]
    assert evaluate(named("Empty"), amb.restrict(M), {"x": M[0]})
    assert not check_absolute(named("Empty"), M, amb, {"x": M[0]})
