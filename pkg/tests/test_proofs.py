import json

import pytest

from bccsp.axioms import build_system
from bccsp.proofs import (
    Accepted,
    AcMismatch,
    ProofBuilder,
    ProofError,
    ProofScript,
    Rejected,
    Step,
    TermTrace,
    canon,
    check_proof,
    replay_conclusions,
    script_from_json,
    script_to_json,
)
from bccsp.terms import Sum, Var, make_alphabet, parse, render

A = make_alphabet(("a", "b"))
E0 = build_system("E0", A)
E1 = build_system("E1", A)

pa = parse("a.0", A)
pb = parse("b.0", A)


def test_canon_flattens_sorts_dedups_drops_zero():
    assert canon(parse("b + a + 0 + a", A)) is parse("a + b", A)
    assert canon(parse("a.(y + x + x)", A)) is parse("a.(x + y)", A)
    assert canon(parse("0 + 0", A)) is parse("0", A)
    assert canon(parse("(x + y) || (y + x)", A)) is parse("(x + y) || (x + y)", A)


def test_empty_script_only_proves_trivial_goals():
    assert check_proof(ProofScript(pa, pa, ()), E0) == Accepted(0)
    out = check_proof(ProofScript(pa, pb, ()), E0)
    assert isinstance(out, Rejected) and out.step == -1


def test_refl_and_goal_mismatch():
    good = ProofScript(pa, pa, (Step("refl", term=pa),))
    assert check_proof(good, E0)
    bad = ProofScript(pa, pb, (Step("refl", term=pa),))
    out = check_proof(bad, E0)
    assert not out and out.step == -1
    assert "goal" in out.reason


def test_axiom_step_with_substitution():
    lhs = Sum(pa, pa)
    steps = (Step("axiom", axiom_id="A3", subst=(("x", pa),)),)
    assert check_proof(ProofScript(lhs, pa, steps), E0)
    # flipped direction swaps the conclusion
    steps = (Step("axiom", axiom_id="A3", subst=(("x", pa),), direction="rl"),)
    assert check_proof(ProofScript(pa, lhs, steps), E0)


def test_axiom_outside_the_system_is_rejected():
    steps = (Step("axiom", axiom_id="P0", subst=(("x", pa),)),)
    out = check_proof(ProofScript(parse("a || 0", A), pa, steps), E0)
    assert isinstance(out, Rejected)
    assert out.step == 0
    assert "not in system" in out.reason


def test_broken_transitivity_chain():
    steps = (
        Step("refl", term=pa),
        Step("refl", term=pb),
        Step("trans", of=(0, 1)),
    )
    out = check_proof(ProofScript(pa, pb, steps), E0)
    assert isinstance(out, Rejected)
    assert out.step == 2
    assert "chain" in out.reason


def test_premise_index_out_of_range():
    out = check_proof(ProofScript(pa, pa, (Step("sym", of=(3,)),)), E0)
    assert isinstance(out, Rejected) and out.step == 0


def test_contextual_axiom_step():
    host = parse("b.(a + 0)", A)
    steps = (
        Step("axiom", axiom_id="A0", subst=(("x", pa),), host=host, path=(0,)),
    )
    assert check_proof(ProofScript(host, parse("b.a", A), steps), E0)
    # wrong path: the axiom instance does not occur there
    steps = (
        Step("axiom", axiom_id="A0", subst=(("x", pb),), host=host, path=(0,)),
    )
    out = check_proof(ProofScript(host, parse("b.a", A), steps), E0)
    assert not out and "context mismatch" in out.reason


def test_replay_conclusions_lists_every_step():
    steps = (
        Step("refl", term=pa),
        Step("cong_prefix", of=(0,), action="b"),
    )
    concl = replay_conclusions(ProofScript(pa, pa, steps), E0)
    assert concl == [(pa, pa), (parse("b.a", A), parse("b.a", A))]
    with pytest.raises(ProofError):
        replay_conclusions(ProofScript(pa, pa, (Step("sym", of=(9,)),)), E0)


def test_builder_ac_proves_choice_rearrangements():
    t = parse("a + (b + a)", A)
    u = parse("b + a + a + 0", A)
    b = ProofBuilder(E0)
    idx = b.ac(t, u)
    script = b.script(t, u, idx)
    assert check_proof(script, E0) == Accepted(len(script.steps))


def test_builder_ac_rejects_genuinely_different_terms():
    b = ProofBuilder(E0)
    with pytest.raises(AcMismatch):
        b.ac(pa, pb)


def test_builder_rewrite_deep_in_a_term():
    host = parse("(a + a) || b.(0 + 0)", A)
    b = ProofBuilder(E1)
    new, idx = b.rewrite(host, (0,), "A3", {"x": pa})
    assert new is parse("a || b.(0 + 0)", A)
    new2, idx2 = b.rewrite(new, (1, 0), "A0", {"x": parse("0", A)})
    assert new2 is parse("a || b.0", A)
    final = b.trans([idx, idx2])
    script = b.script(host, new2, final)
    assert check_proof(script, E1)


def test_builder_refuses_wrong_goal():
    b = ProofBuilder(E0)
    idx = b.refl(pa)
    with pytest.raises(ProofError):
        b.script(pa, pb, idx)


def test_trace_without_builder_applies_choice_laws():
    t = parse("a + b", A)
    tr = TermTrace(t, None)
    tr.rewrite((), "A1", {"x": pa, "y": pb})
    assert tr.term is parse("b + a", A)
    tr.ac_to(parse("a + b + 0", A))
    assert tr.term is parse("a + b + 0", A)
    with pytest.raises(AcMismatch):
        tr.ac_to(pa)
    assert tr.proof_index() is None


def test_trace_with_builder_accumulates_a_proof():
    t = parse("(a + a) + b", A)
    b = ProofBuilder(E0)
    tr = TermTrace(t, b)
    tr.ac_to(parse("a + b", A))
    idx = tr.proof_index()
    script = b.script(t, parse("a + b", A), idx)
    assert check_proof(script, E0)


def test_script_json_round_trip():
    host = parse("b.(a + 0)", A)
    b = ProofBuilder(E0)
    new, idx = b.rewrite(host, (0,), "A0", {"x": pa})
    script = b.script(host, new, idx)

    doc = script_to_json(script, system_name="E0")
    assert doc["system"] == "E0"
    text = json.dumps(doc)
    back = script_from_json(json.loads(text), A)
    assert back.lhs is script.lhs and back.rhs is script.rhs
    assert back.steps == script.steps
    assert check_proof(back, E0)


def test_step_json_keeps_context_fields():
    host = parse("b.(a + 0)", A)
    step = Step("axiom", axiom_id="A0", subst=(("x", pa),), host=host, path=(0,))
    doc = script_to_json(ProofScript(host, parse("b.a", A), (step,)))
    (sd,) = doc["steps"]
    assert sd["host"] == render(host)
    assert sd["path"] == [0]
    assert sd["subst"] == {"x": "a.0"}
    assert sd["axiom"] == "A0" and sd["dir"] == "lr"
