import pytest
from hypothesis import given, settings

from bccsp.axioms import build_system
from bccsp.equivalences import (
    FLAT_RELATIONS,
    NotRefuted,
    Refuted,
    SpectrumError,
    bisimilar,
    default_substitution_scheme,
    equivalent,
    nested_sim_eq,
    nested_trace_eq,
    parse_relation,
    refute_open,
    relation_name,
    sim_eq,
    simulation_preorder,
    spectrum_vector,
)
from bccsp.semantics import TransitionMode
from bccsp.terms import Var, all_terms, make_alphabet, parse, substitute

from conftest import closed_terms

A = make_alphabet(("a", "b"))
A3 = make_alphabet(("a", "b", "c"))


def test_parse_relation():
    assert parse_relation("RS") == "RS"
    assert parse_relation("NT2") == ("NT", 2)
    assert parse_relation(("NS", 1)) == ("NS", 1)
    assert relation_name(("NT", 3)) == "NT3"
    for bad in ("X", "NT", ("NT", -1), ("Q", 2)):
        with pytest.raises(ValueError):
            parse_relation(bad)


def test_distributed_choice_splits_trace_from_failure():
    t = parse("a.(b + c)", A3)
    u = parse("a.b + a.c", A3)
    assert equivalent(t, u, "T")
    assert equivalent(t, u, "CT")
    assert not equivalent(t, u, "F", A3)
    assert not sim_eq(t, u)
    assert simulation_preorder(u, t)
    assert not simulation_preorder(t, u)


def test_refusal_relations_need_alphabet():
    t = parse("a.0", A)
    for rel in ("F", "FT"):
        with pytest.raises(ValueError):
            equivalent(t, t, rel)


def test_completed_simulation_versus_ready_simulation():
    p = parse("a.(b + c)", A3)
    q = parse("a.(b + c) + a.b", A3)
    assert sim_eq(p, q, "CS")
    assert not sim_eq(p, q, "RS")


def test_failure_simulation_coincides_with_ready_simulation():
    terms = all_terms(A, 4)
    for p in terms:
        for q in terms:
            assert sim_eq(p, q, "FS") == sim_eq(p, q, "RS")


def test_spectrum_vector_frozen_example():
    p = parse("a.(b + c)", A3)
    q = parse("a.(b + c) + a.b", A3)
    vec = spectrum_vector(p, q, A3)
    assert vec == {
        "T": True,
        "CT": True,
        "F": False,
        "R": False,
        "FT": False,
        "RT": False,
        "PF": False,
        "S": True,
        "CS": True,
        "RS": False,
        "B": False,
        "NT1": True,
        "NT2": False,
        "NS1": True,
        "NS2": False,
    }


def test_spectrum_vector_on_bisimilar_pair():
    p = parse("a || b", A)
    q = parse("a.b + b.a", A)
    vec = spectrum_vector(p, q, A)
    assert all(vec.values())


def test_spectrum_vector_input_validation():
    with pytest.raises(ValueError):
        spectrum_vector(Var("x"), parse("0", A), A)
    with pytest.raises(ValueError):
        spectrum_vector(parse("0", A), parse("0", A), A, nested_max=0)


def test_nested_level_zero_relates_everything():
    p, q = parse("a.0", A), parse("0", A)
    assert nested_trace_eq(p, q, 0)
    assert nested_sim_eq(p, q, 0)
    with pytest.raises(ValueError):
        nested_trace_eq(p, q, -1)


def test_nested_coincidences_on_small_terms():
    terms = all_terms(A, 4)
    from bccsp.observations import possible_futures
    from bccsp.semantics import traces

    for p in terms:
        for q in terms:
            assert nested_trace_eq(p, q, 1) == (traces(p) == traces(q))
            assert nested_trace_eq(p, q, 2) == (possible_futures(p) == possible_futures(q))
            assert nested_sim_eq(p, q, 1) == sim_eq(p, q)


def test_sync_mode_expansion_is_bisimilar():
    S = make_alphabet(("a",), sync=True)
    lhs = parse("a || a'", S)
    rhs = parse("a.a' + a'.a + tau.0", S)
    assert bisimilar(lhs, rhs, TransitionMode.CCS_SYNC, S)
    assert not bisimilar(lhs, rhs)  # without sync the silent summand is extra


def test_refute_open_closed_terms():
    out = refute_open(parse("a.0", A), parse("b.0", A), "T", A)
    assert isinstance(out, Refuted)
    assert out.substitution == {}
    assert out.checked == 1


def test_refute_open_cannot_refute_commutativity():
    t = parse("x + y", A)
    u = parse("y + x", A)
    out = refute_open(t, u, "B", A)
    assert isinstance(out, NotRefuted)
    # six pool candidates per variable; the deep tags for depth-0 terms are
    # short action chains the pool already contains
    assert out.checked == 36


def test_refute_open_finds_distributivity_failure():
    # a.(x + y) = a.x + a.y fails already for failures
    t = parse("a.(x + y)", A)
    u = parse("a.x + a.y", A)
    out = refute_open(t, u, "F", A)
    assert isinstance(out, Refuted)
    sub = out.substitution
    assert set(sub) == {"x", "y"}
    assert not equivalent(substitute(t, sub), substitute(u, sub), "F", A)


def test_sp2_and_fp_fail_under_ready_simulation():
    es = build_system("E_S", A)
    sp2 = es.by_id["SP2[a]"]
    out = refute_open(sp2.lhs, sp2.rhs, "RS", A)
    assert isinstance(out, Refuted)

    er = build_system("E_R", A)
    fp = er.by_id["FP[a]"]
    out = refute_open(fp.lhs, fp.rhs, "RS", A)
    assert isinstance(out, Refuted)


def test_default_scheme_pool_is_deduplicated():
    scheme = default_substitution_scheme(make_alphabet(("a",)))
    assert len(set(scheme.pool)) == len(scheme.pool)


@settings(max_examples=60, deadline=None)
@given(closed_terms, closed_terms)
def test_bisimilarity_implies_every_flat_relation(p, q):
    if bisimilar(p, q):
        for rel in FLAT_RELATIONS:
            assert equivalent(p, q, rel, A)


@settings(max_examples=60, deadline=None)
@given(closed_terms)
def test_every_relation_is_reflexive(p):
    for rel in FLAT_RELATIONS:
        assert equivalent(p, p, rel, A)
