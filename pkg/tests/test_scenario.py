import pytest

from ontolab.errors import ScenarioError, ScenarioTooLarge
from ontolab.scenario import (Assignment, MeasurementScenario, PreparationScenario, bell_scenario,
                              event_sheaf, restrict)


def test_event_sheaf_sizes():
    bell = bell_scenario(2, 2, 2)
    assert len(event_sheaf(bell, {"A0", "B0"})) == 4
    assert len(event_sheaf(bell, bell.measurements)) == 16
    s = MeasurementScenario(["m"], ["0", "1", "2"], [["m"]])
    assert len(event_sheaf(s, {"m"})) == 3
    for c in bell.contexts:
        assert len(event_sheaf(bell, c)) == len(bell.outcomes) ** len(c)


def test_event_sheaf_order_is_lexicographic_and_stable():
    bell = bell_scenario(2, 2, 2)
    got = [str(a) for a in event_sheaf(bell, {"B0", "A0"})]
    assert got == ["A0:0,B0:0", "A0:0,B0:1", "A0:1,B0:0", "A0:1,B0:1"]
    assert [str(a) for a in event_sheaf(bell, {"A0", "B0"})] == got


def test_event_sheaf_rejects_unknown():
    with pytest.raises(ScenarioError):
        event_sheaf(bell_scenario(2, 2, 2), {"A0", "Z"})


def test_restrict():
    a = Assignment({"a": "0", "b": "1"})
    assert restrict(a, {"a"}) == Assignment({"a": "0"})
    assert restrict(a, set()) == Assignment()
    full = Assignment({"a": "0", "b": "1", "c": "0"})
    assert full.restrict({"a", "b"}).restrict({"a"}) == full.restrict({"a"})
    with pytest.raises(ScenarioError):
        restrict(a, {"c"})


def test_bell_counts():
    s = bell_scenario(2, 2, 2)
    assert len(s.measurements) == 4 and len(s.contexts) == 4
    assert all(len(c) == 2 for c in s.contexts)
    one = bell_scenario(1, 3, 2)
    assert len(one.contexts) == 3 and all(len(c) == 1 for c in one.contexts)
    three = bell_scenario(3, 2, 2)
    assert len(three.measurements) == 6 and len(three.contexts) == 8
    with pytest.raises(ScenarioError):
        bell_scenario(0, 2, 2)


@pytest.mark.parametrize("contexts", [[[]], [["a", "z"]], [["a"]]])
def test_scenario_validation(contexts):
    with pytest.raises(ScenarioError):
        MeasurementScenario(["a", "b"], ["0"], contexts)


def test_reserved_characters_rejected():
    with pytest.raises(ScenarioError):
        MeasurementScenario(["a:b"], ["0"], [["a:b"]])


def test_compatibility_is_downward_closed():
    s = bell_scenario(2, 2, 2)
    assert s.is_compatible({"A0"})
    assert s.is_compatible({"A0", "B1"})
    assert not s.is_compatible({"A0", "A1"})


def test_global_assignment_bound(monkeypatch):
    s = bell_scenario(2, 2, 2)
    monkeypatch.setenv("ONTOLAB_MAX_GLOBAL_ASSIGNMENTS", "10")
    with pytest.raises(ScenarioTooLarge):
        list(s.global_assignments())
    monkeypatch.setenv("ONTOLAB_MAX_GLOBAL_ASSIGNMENTS", "16")
    assert len(list(s.global_assignments())) == 16


def test_preparation_scenario():
    s = PreparationScenario(["A", "B"], [("a0", "b0"), ("a1", "b0")], ["0", "1"])
    assert s.preparations["A"] == ("a0", "a1")
    assert len(list(s.joint_states())) == 4
    with pytest.raises(ScenarioError):
        PreparationScenario(["A", "B"], [("a0",)], ["0"])
