import random

import pytest
from hypothesis import given, settings, strategies as st

from deskforcing.errors import ProofError
from deskforcing.hf import v_stage
from deskforcing.logic import ForAll, Implies, Member, Not, Equal, Structure, parse, truth_table
from deskforcing.proof import (EMPTY_SET_GOAL, MUTATION_KINDS, LogicalAxiom, ModusPonens, Proof, ProofBuilder,
                               ZFC_NAMES, alpha_equal, check_a1, check_a3, check_a4, check_a5, check_proof,
                               empty_set_proof, hcore, instantiate_schema, is_hcore, is_zfc_axiom, match_schema,
                               mutate, mutation_suite, one_line_proofs, parse_justification, proof_corpus,
                               relativize_proof, rename_proof, soundness_screen, zfc_axiom)

V3 = Structure.from_hfsets(v_stage(3))


def valid_in(f, s=V3):
    from deskforcing.logic import free_vars
    return bool(truth_table(f, s, sorted(free_vars(f))).all())


# ------------------------------------------------------------- corpus

def test_corpus_accepted():
    for p in proof_corpus():
        v = check_proof(p)
        assert v, v.diagnostics


def test_empty_set_proof():
    p = empty_set_proof()
    assert alpha_equal(p.conclusion, parse(EMPTY_SET_GOAL))
    assert check_proof(p).valid
    assert len(p) > 10


def test_one_line_proofs():
    ps = one_line_proofs()
    assert len(ps) == 7 + len(ZFC_NAMES) + 2
    assert all(check_proof(p) for p in ps)


def test_text_round_trip():
    p = empty_set_proof()
    q = Proof.from_text("# comment\n" + p.to_text())
    assert q.lines == p.lines
    assert check_proof(q)


def test_text_errors():
    with pytest.raises(ProofError):
        Proof.from_text("2. x = x ; A1\n")
    with pytest.raises(ProofError):
        Proof.from_text("1. x = x\n")
    with pytest.raises(ProofError):
        Proof.from_text("1. x = ; A1\n")
    with pytest.raises(ProofError):
        parse_justification("Frobnicate 3")


def test_justification_forms():
    for text in ["A1", "EQ2", "ZFC Pairing", "Comprehension", "Replacement", "MP 1 2", "Gen 3 x", "Rename 1 a->b, c->d"]:
        assert str(parse_justification(text)) == text


def test_empty_proof_invalid():
    assert not check_proof(Proof(()))


# ------------------------------------------------------- axiom schemes

def test_logical_examples():
    assert check_a1(hcore(parse("x in y -> (y in x -> x in y)")))
    assert not check_a1(hcore(parse("x in y -> (y in x -> y in x)")))
    assert check_a3(hcore(parse("(~(x = y) -> ~(y in x)) -> (y in x -> x = y)")))
    assert check_a4(hcore(parse("(all z . (x in y -> z in x)) -> (x in y -> (all z . z in x))")))
    assert not check_a4(hcore(parse("(all x . (x in y -> x in x)) -> (x in y -> (all x . x in x))")))
    assert check_a5(hcore(parse("(all x . (ex y . x in y)) -> (ex y . z in y)")))
    # substituting y for x would be captured
    assert not check_a5(hcore(parse("(all x . (ex y . x in y)) -> (ex y . y in y)")))


def test_pairing_recognised_and_tautology_not():
    assert is_zfc_axiom(zfc_axiom("Pairing")).name == "Pairing"
    assert is_zfc_axiom(parse("x = x")) is None


def test_zfc_alpha_renamed():
    f = zfc_axiom("Union")
    from deskforcing.logic import all_vars, rename
    vs = sorted(all_vars(f))
    g = rename(f, {v: v + "9" for v in vs})
    assert is_zfc_axiom(g).name == "Union"


def test_unknown_axiom():
    with pytest.raises(ProofError):
        zfc_axiom("Determinacy")


def test_zfc_axioms_true_in_v4_where_expected():
    V4 = Structure.from_hfsets(v_stage(4))
    for name in ["Extensionality", "Foundation"]:
        assert valid_in(zfc_axiom(name), V4)


def test_hcore_shape():
    f = parse("(ex x . x in y) & (y = y | ~(y in y)) <-> (all z in y . z = z)")
    c = hcore(f)
    assert is_hcore(c)
    # and the core says the same thing
    assert truth_table(f, V3, ["y"]).tolist() == truth_table(c, V3, ["y"]).tolist()


def test_schema_side_conditions():
    with pytest.raises(ProofError):
        instantiate_schema("Comprehension", "x in z")            # z free
    with pytest.raises(ProofError):
        instantiate_schema("Replacement", "y = B")
    with pytest.raises(ProofError):
        instantiate_schema("Comprehension", "x in w", params=[])
    with pytest.raises(ProofError):
        instantiate_schema("Other", "x = x")
    # an instance with the target free in phi is not recognised
    bad = parse("all y . ex z . all x . (x in z <-> (x in y & x in z))")
    assert match_schema(bad) is None
    # unbound parameter
    assert match_schema(parse("ex z . all x . (x in z <-> (x in y & x = x))")) is None


@given(st.sampled_from(["x = w", "~(x in w)", "ex v . (v in x & v in w)", "x in x", "all v in w . v = x"]),
       st.sampled_from(["Comprehension", "Replacement"]))
@settings(max_examples=40, deadline=None)
def test_instances_are_recognised(phi, kind):
    if kind == "Replacement":
        phi = phi.replace("w", "y")
    f = instantiate_schema(kind, phi)
    m = is_zfc_axiom(f)
    assert m is not None and m.name == kind


@given(st.sampled_from(["x = w", "~(x in w)", "x in w & w in x"]))
@settings(max_examples=20, deadline=None)
def test_comprehension_true_in_v4(phi):
    # every comprehension instance with separation inside a stage holds in V_4 for sets of V_3
    f = instantiate_schema("Comprehension", phi)
    V4 = Structure.from_hfsets(v_stage(4))
    assert valid_in(f, V4)


# ------------------------------------------------------------- builder

def test_identity_lemma():
    b = ProofBuilder()
    p = b.build(b.identity("x in y"))
    assert check_proof(p) and p.conclusion == hcore(parse("x in y -> x in y"))


def test_deduction_theorem():
    b = ProofBuilder()
    A, B = parse("x in y"), parse("y in x")
    h = b.assume(A)
    res = b.discharge(b.mp(h, b.axiom(Implies(A, Implies(B, A)), "A1")))
    p = b.build(res)
    assert check_proof(p)
    assert alpha_equal(p.conclusion, Implies(A, Implies(B, A)))


def test_rename_proof():
    assert check_proof(rename_proof())


def test_non_injective_rename_rejected():
    p = rename_proof()
    lines = list(p.lines)
    lines[1] = (parse("a in a -> (a = c -> a in a)"), parse_justification("Rename 1 x->a, y->a, z->c"))
    v = check_proof(Proof(tuple(lines)))
    assert not v and v.first_bad == 2


def test_bad_mp_reference():
    p = Proof(((parse("x in y -> (y in x -> x in y)"), LogicalAxiom(1)),
               (parse("y in x -> x in y"), ModusPonens(1, 3))))
    v = check_proof(p)
    assert not v and v.first_bad == 2


def test_swapped_lines_invalid_at_swap():
    p = empty_set_proof()
    rng = random.Random(0)
    for _ in range(20):
        got = mutate(p, rng, "swap_lines")
        if got is None:
            continue
        q, (_, where) = got
        v = check_proof(q)
        if v:
            # two self-standing axiom lines traded places: still a proof
            assert all(isinstance(j, LogicalAxiom) for _, j in p.lines[where - 1:where + 1])
            continue
        assert v.first_bad in (where, where + 1)


def test_verdict_json():
    v = check_proof(Proof(((parse("x = x"), LogicalAxiom(1)),)))
    d = v.to_json()
    assert d["valid"] is False and d["first_bad"] == 1 and d["diagnostics"][0]["line"] == 1


# --------------------------------------------------- soundness, mutation

def test_soundness_screen():
    rep = soundness_screen(empty_set_proof())
    assert rep.ok and rep.lines > 0 and rep.exempt


def test_soundness_screen_catches_false_line():
    p = Proof(((parse("x in y"), LogicalAxiom(1)),))
    assert not soundness_screen(p).ok


def test_one_line_axioms_semantically_valid():
    for p in one_line_proofs()[:7]:
        assert valid_in(p.conclusion)


def test_mutation_rate():
    rep = mutation_suite(n=200, seed=1)
    assert rep.rate >= 0.95
    assert set(rep.by_kind) == set(MUTATION_KINDS)


def test_relativize_proof():
    rel = relativize_proof(empty_set_proof())
    assert rel[-1] == parse("ex z . z in M & (all w . w in M -> ~(w in z))")
    assert len(rel) == len(empty_set_proof())


def test_generalisation_requires_exact_body():
    p = Proof(((parse("x in y -> (y = x -> x in y)"), LogicalAxiom(1)),
               (ForAll("x", Implies(Member("x", "y"), Implies(Equal("y", "x"), Not(Member("x", "y"))))),
                parse_justification("Gen 1 x"))))
    assert not check_proof(p)
