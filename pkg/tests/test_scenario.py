import json
import warnings

import pytest

from bundlediag.presets import bell_scenario, ghz_ab_scenario
from bundlediag.scenario import (
    GlobalAssignment,
    Incompatibility,
    Observable,
    Scenario,
    ScenarioError,
    Section,
    faces,
    glue,
    require_valid,
    restrict,
    scenario_from_dict,
    scenario_to_dict,
    sections_over,
    validate_scenario,
)


def kinds(s):
    return [v.kind for v in validate_scenario(s)]


def test_bell_scenario_is_valid():
    s = bell_scenario()
    assert validate_scenario(s) == []
    assert s.context("C1").observables == ("X_A", "X_B")


def test_nested_context_is_rejected():
    s = Scenario.build(["A", "B"], {"C1": ["A", "B"], "C2": ["A"]})
    violations = validate_scenario(s)
    assert [v.kind for v in violations] == ["context ⊂ context"]
    assert "C2" in violations[0].subject


def test_uncovered_observable_is_reported_by_name():
    s = Scenario.build(["A", "B", "Y"], {"C1": ["A", "B"]})
    violations = validate_scenario(s)
    assert [(v.kind, v.subject) for v in violations] == [("uncovered observable", "Y")]


@pytest.mark.parametrize(
    "obs, ctxs, kind",
    [
        (["A", "A"], {"C1": ["A"]}, "duplicate observable id"),
        (["A"], {"C1": []}, "empty context"),
        (["A", "B"], {"C1": ["A", "A", "B"]}, "duplicate observable in context"),
        (["A"], {"C1": ["A", "Q"]}, "unknown observable"),
    ],
)
def test_structural_violations(obs, ctxs, kind):
    assert kind in kinds(Scenario.build(obs, ctxs))


def test_duplicate_context_name_and_bad_arity():
    s = Scenario(
        (Observable("A", 1), Observable("B")),
        Scenario.build(["A", "B"], {"C1": ["A"], "C2": ["B"]}).contexts * 2,
    )
    got = kinds(s)
    assert "bad arity" in got and "duplicate context name" in got
    with pytest.raises(ScenarioError):
        require_valid(s)


def test_faces_counts():
    assert len(faces(bell_scenario())) == 8
    assert faces(Scenario.build(["a"], {"C": ["a"]})) == {frozenset({"a"})}
    ghz = faces(ghz_ab_scenario())
    assert len(ghz) == 22
    assert sum(len(f) == 3 for f in ghz) == 4 and sum(len(f) == 2 for f in ghz) == 12


def test_faces_rejects_invalid_scenario():
    with pytest.raises(ScenarioError):
        faces(Scenario.build(["A", "B"], {"C1": ["A"]}))


def test_restrict_examples():
    sec = Section.of({"X_A": 1, "X_B": 1})
    assert restrict(sec, ["X_A"]) == Section.of({"X_A": 1})
    c2 = Section.from_tuple(("X_A", "Y_B", "Y_C"), (0, 1, 1))
    assert restrict(c2, {"Y_B", "Y_C"}).as_dict() == {"Y_B": 1, "Y_C": 1}
    with pytest.raises(ScenarioError):
        restrict(sec, ["Z_A"])


def test_glue_agreeing_overlap():
    out = glue([Section.of({"X_A": 1, "X_B": 1}), Section.of({"X_B": 1, "Z_A": 0})])
    assert out == Section.of({"X_A": 1, "X_B": 1, "Z_A": 0})


def test_glue_clash_witness():
    out = glue([Section.of({"X_B": 1}), Section.of({"X_B": 0})])
    assert out == Incompatibility("X_B", 1, 0)


def test_glue_edges_of_a_global_section():
    s = bell_scenario()
    g = GlobalAssignment.for_scenario(s, {"X_A": 1, "X_B": 1, "Z_A": 0, "Z_B": 0})
    edges = [restrict(g, c.observables) for c in s.contexts]
    assert glue(edges) == g


def test_global_assignment_must_be_total():
    with pytest.raises(ScenarioError):
        GlobalAssignment.for_scenario(bell_scenario(), {"X_A": 0})


def test_section_rejects_negative_outcome():
    with pytest.raises(ScenarioError):
        Section.of({"A": -1})


def test_sections_over_order_and_counts():
    s = bell_scenario()
    secs = list(sections_over(s, {"Z_A", "X_B"}))
    # declaration order puts X_B before Z_A
    assert [sec.values_for(("X_B", "Z_A")) for sec in secs] == [(0, 0), (0, 1), (1, 0), (1, 1)]
    assert len(list(sections_over(s, ["Z_B"]))) == 2
    assert len(list(sections_over(s, s.ids))) == 16
    with pytest.raises(ScenarioError):
        list(sections_over(s, []))
    with pytest.raises(ScenarioError):
        list(sections_over(s, ["nope"]))


def test_section_str():
    assert str(Section.of({"X_B": 0, "X_A": 1})) == "{X_A↦1, X_B↦0}"


def test_json_round_trip_and_unknown_keys():
    s = Scenario.build(["A", "B"], {"C1": ["A", "B"]})
    data = scenario_to_dict(s)
    assert scenario_from_dict(json.loads(json.dumps(data))) == s
    data["observables"][0]["colour"] = "red"
    with pytest.raises(ScenarioError):
        scenario_from_dict(data, strict=True)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        assert scenario_from_dict(data) == s
    assert any("colour" in str(w.message) for w in caught)


def test_layout_hint_round_trip():
    data = {"observables": [{"name": "A", "layout": [0.5, -1]}], "contexts": [{"name": "C", "observables": ["A"]}]}
    s = scenario_from_dict(data)
    assert s.observables[0].layout_hint == (0.5, -1.0)
    assert scenario_to_dict(s)["observables"][0]["layout"] == [0.5, -1.0]
