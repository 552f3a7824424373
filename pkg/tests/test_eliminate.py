import pytest

from bccsp.axioms import build_system
from bccsp.eliminate import eliminate, family_of, par_free
from bccsp.equivalences import equivalent
from bccsp.proofs import check_proof
from bccsp.semantics import TransitionMode
from bccsp.terms import Var, make_alphabet, parse, render

A = make_alphabet(("a", "b"))
S1 = make_alphabet(("a",), sync=True)

ELIMINATING = ("E_T", "E_CT", "E_F", "E_R", "E_FT", "E_RT", "E_S", "E_CS", "E_RS")


def test_family_of():
    assert family_of("E_RS") == "RS"
    assert family_of("E_S") == "CS"
    assert family_of("E_CS") == "CS"
    assert family_of("E_F") == "RT"
    assert family_of("E_T") == "CT"
    assert family_of("E^c_CT") == "CT"
    for name in ("E0", "E1"):
        with pytest.raises(ValueError):
            family_of(name)


def test_par_free():
    assert par_free(parse("a.b + b.a", A))
    assert not par_free(parse("a.(b || 0)", A))


def test_two_prefixes_expand_to_the_interleaving():
    got, script = eliminate(parse("a || b", A), "E_RS", A)
    assert got is parse("a.b + b.a", A)
    assert script is None


def test_nested_parallel_is_fully_removed():
    t = parse("(a || b) || a.b", A)
    got, _ = eliminate(t, "E_CS", A)
    assert par_free(got)
    assert equivalent(t, got, "CS", A)


def test_eliminate_accepts_built_systems_and_requires_alphabets():
    sys_ = build_system("E_RT", A)
    got, _ = eliminate(parse("a || a", A), sys_)
    assert par_free(got)
    with pytest.raises(ValueError):
        eliminate(parse("a || a", A), "E_RT")


def test_eliminate_rejects_open_terms_and_lawless_systems():
    with pytest.raises(ValueError):
        eliminate(Var("x"), "E_RS", A)
    for name in ("E0", "E1"):
        with pytest.raises(ValueError):
            eliminate(parse("a || b", A), name, A)


def first_case_axiom(script):
    for step in script.steps:
        if step.rule == "axiom" and step.axiom_id[0] not in "AP":
            return step.axiom_id
    return None


@pytest.mark.parametrize(
    "system,text,axiom",
    [
        ("E_RS", "(a + a.b) || (b + b.a)", "RSP1[a,b]"),
        ("E_RS", "(a + b) || (a + a.b)", "RSP2[{a,b};a]"),
        ("E_RS", "a || b", "EL2[{a};{b}]"),
        ("E_CS", "a || (a + b)", "CSP2[a,a,b]"),
        ("E_CS", "(a + b) || (a + b)", "CSP1[a,b,a,b]"),
        ("E_CS", "a || b", "EL1[a,b]"),
        ("E_RT", "(a + a.b) || b", "FP[a]"),
        ("E_RT", "(a + b) || a", "EL2[{a,b};{a}]"),
        ("E_CT", "(a + b) || a", "CTP[a,b]"),
        ("E_CT", "b || a", "EL1[b,a]"),
    ],
)
def test_case_analysis_picks_the_family_axiom(system, text, axiom):
    t = parse(text, A)
    got, script = eliminate(t, system, A, emit_proof=True)
    assert par_free(got)
    assert first_case_axiom(script) == axiom
    assert check_proof(script, build_system(system, A))


@pytest.mark.parametrize("name", ELIMINATING)
def test_each_system_eliminates_and_proves(name):
    sys_ = build_system(name, A)
    rel = sys_.target_relation
    for text in ("a || b", "(a + b.a) || (b + a.b)", "a.(a || b) + b || a"):
        t = parse(text, A)
        got, script = eliminate(t, sys_, emit_proof=True)
        assert par_free(got)
        assert equivalent(t, got, rel, A)
        assert check_proof(script, sys_), f"{name} on {text}"


@pytest.mark.parametrize("name", ("E^c_T", "E^c_S", "E^c_RS", "E^c_RT"))
def test_sync_systems_eliminate_with_silent_summands(name):
    sys_ = build_system(name, S1)
    t = parse("a || a'", S1)
    got, script = eliminate(t, sys_, emit_proof=True)
    assert par_free(got)
    assert "tau." in render(got)
    assert equivalent(t, got, sys_.target_relation, S1, TransitionMode.CCS_SYNC)
    assert check_proof(script, sys_)


def test_elimination_is_stable_on_par_free_input():
    t = parse("a.b + b", A)
    got, script = eliminate(t, "E_RS", A, emit_proof=True)
    assert got is t
    assert check_proof(script, build_system("E_RS", A))
