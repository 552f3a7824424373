import pytest
from hypothesis import given, settings

from bccsp.axioms import Equation, build_system
from bccsp.models import (
    FiniteModel,
    fixture_model,
    independence_report,
    search_model,
)
from bccsp.terms import Nil, Par, Prefix, Sum, Var

from conftest import closed_terms

x, y = Var("x"), Var("y")


def tiny_model():
    """Two elements; + and || are max, prefixes jump to 1."""
    return FiniteModel(
        carrier=2,
        zero=0,
        prefix={"a": (1, 1), "b": (1, 1)},
        plus=((0, 1), (1, 1)),
        par=((0, 1), (1, 1)),
    )


# -- well-formedness ---------------------------------------------------------


def test_rejects_empty_carrier():
    with pytest.raises(ValueError, match="carrier"):
        FiniteModel(carrier=0, zero=0, prefix={}, plus=(), par=())


def test_rejects_zero_out_of_range():
    with pytest.raises(ValueError, match="zero"):
        FiniteModel(carrier=2, zero=2, prefix={"a": (0, 0)}, plus=((0, 0), (0, 0)), par=((0, 0), (0, 0)))


def test_rejects_bad_prefix_row():
    with pytest.raises(ValueError, match="prefix"):
        FiniteModel(carrier=2, zero=0, prefix={"a": (0, 2)}, plus=((0, 0), (0, 0)), par=((0, 0), (0, 0)))


def test_rejects_ragged_table():
    with pytest.raises(ValueError, match="plus"):
        FiniteModel(carrier=2, zero=0, prefix={"a": (0, 0)}, plus=((0, 0),), par=((0, 0), (0, 0)))


def test_tables_are_normalised_to_tuples():
    m = FiniteModel(
        carrier=2,
        zero=0,
        prefix={"a": [1, 0]},
        plus=[[0, 1], [1, 1]],
        par=[[0, 1], [1, 1]],
    )
    assert m.prefix["a"] == (1, 0)
    assert m.plus[1] == (1, 1)


# -- evaluation --------------------------------------------------------------


def test_eval_follows_tables():
    m = tiny_model()
    assert m.eval(Nil(), {}) == 0
    assert m.eval(Prefix("a", Nil()), {}) == 1
    assert m.eval(Sum(Nil(), Nil()), {}) == 0
    assert m.eval(Par(Prefix("a", Nil()), x), {"x": 0}) == 1


def test_eval_reports_missing_variable():
    with pytest.raises(ValueError, match="misses variable"):
        tiny_model().eval(x, {})


def test_eval_reports_unknown_action():
    with pytest.raises(ValueError, match="no table"):
        tiny_model().eval(Prefix("c", Nil()), {})


def test_holds_and_counter_valuation():
    m = tiny_model()
    assert m.holds(Equation("comm", Sum(x, y), Sum(y, x)))
    eq = Equation("pre-drop", Prefix("a", x), x)
    cv = m.counter_valuation(eq)
    assert cv == {"x": 0}
    assert m.eval(eq.lhs, cv) == 1 and m.eval(eq.rhs, cv) == 0


@settings(max_examples=60)
@given(closed_terms, closed_terms)
def test_eval_is_homomorphic_on_sums(s, t):
    m = tiny_model()
    vs, vt = m.eval(s, {}), m.eval(t, {})
    assert m.eval(Sum(s, t), {}) == m.plus[vs][vt]
    assert m.eval(Par(s, t), {}) == m.par[vs][vt]


def test_json_round_trip():
    m = fixture_model("table6")
    again = FiniteModel.from_json(m.to_json())
    assert again == m


def test_fixture_model_unknown_name():
    with pytest.raises(FileNotFoundError):
        fixture_model("no_such_table")


# -- the shipped counter-models ---------------------------------------------


def test_table6_separates_el2_from_the_simulation_system(ab):
    m = fixture_model("table6")
    assert m.carrier == 5
    for name in ("E_CS", "E_CT"):
        for eq in build_system(name, ab):
            assert m.holds(eq), eq.id
    el2 = build_system("E_RS", ab).by_id["EL2[{a,b};{a,b}]"]
    cv = m.counter_valuation(el2)
    assert cv == {"x1": 0, "x2": 0, "y1": 1, "y2": 1}
    assert m.eval(el2.lhs, cv) == 4
    assert m.eval(el2.rhs, cv) == 3


def test_table7_separates_rsp2_from_the_ready_trace_system(ab):
    m = fixture_model("table7")
    assert m.carrier == 3
    for name in ("E_RT", "E_CT"):
        for eq in build_system(name, ab):
            assert m.holds(eq), eq.id
    ers = build_system("E_RS", ab)
    for rid in ("RSP2[{a};a]", "RSP2[{a};b]"):
        eq = ers.by_id[rid]
        cv = m.counter_valuation(eq)
        assert cv == {"w": 1, "x1": 0, "y": 0, "z": 0}
        assert m.eval(eq.lhs, cv) == 1 and m.eval(eq.rhs, cv) == 2
    csp2 = build_system("E_CS", ab).by_id["CSP2[a,a,b]"]
    assert not m.holds(csp2)


def test_independence_report_shape(ab):
    m = fixture_model("table6")
    ecs = build_system("E_CS", ab)
    goal = build_system("E_RS", ab).by_id["EL2[{a,b};{a,b}]"]
    rep = independence_report(m, ecs, goal)
    assert rep["independent"] is True
    assert rep["all_axioms_hold"] is True
    assert rep["axiom_failures"] == []
    assert len(rep["axioms"]) == len(ecs)
    assert all(a["holds"] for a in rep["axioms"])
    assert rep["goal"]["refuted"] is True
    assert rep["goal"]["counter_valuation"] == {"x1": 0, "x2": 0, "y1": 1, "y2": 1}


def test_independence_report_flags_broken_axiom(ab):
    m = fixture_model("table7")
    ers = build_system("E_RS", ab)
    goal = ers.by_id["EL2[{a,b};{a,b}]"]
    rep = independence_report(m, ers, goal)
    assert rep["independent"] is False
    assert any(f["id"].startswith("RSP2") for f in rep["axiom_failures"])


# -- search ------------------------------------------------------------------


def test_search_separates_rsp2_from_ready_traces(ab):
    ert = build_system("E_RT", ab)
    goal = build_system("E_RS", ab).by_id["RSP2[{a};b]"]
    res = search_model(ab, 3, ert, goal)
    assert res.status == "found" and bool(res)
    assert res.carrier == 3
    m = res.model
    for eq in ert:
        assert m.holds(eq), eq.id
    assert not m.holds(goal)
    again = search_model(ab, 3, ert, goal)
    assert again.nodes == res.nodes and again.model == m


def test_search_reports_none_for_a_derivable_goal(ab):
    ecs = build_system("E_CS", ab)
    res = search_model(ab, 2, ecs, ecs.by_id["A3"])
    assert res.status == "none"
    assert res.model is None and res.carrier is None
    assert res.nodes == 0
    assert not res


def test_search_respects_the_node_budget(ab):
    ecs = build_system("E_CS", ab)
    goal = build_system("E_RS", ab).by_id["EL2[{a,b};{a,b}]"]
    res = search_model(ab, 5, ecs, goal, budget=50)
    assert res.status == "budget"
    assert res.nodes == 50 and res.model is None
    assert not res


def test_search_validates_carrier_bounds(ab):
    ecs = build_system("E_CS", ab)
    with pytest.raises(ValueError, match="min_carrier"):
        search_model(ab, 3, ecs, ecs.by_id["A3"], min_carrier=4)


def test_search_can_start_above_one(ab):
    ert = build_system("E_RT", ab)
    goal = build_system("E_RS", ab).by_id["RSP2[{a};b]"]
    res = search_model(ab, 3, ert, goal, min_carrier=3)
    assert res.status == "found" and res.carrier == 3
    rep = independence_report(res.model, ert, goal)
    assert rep["independent"] is True
