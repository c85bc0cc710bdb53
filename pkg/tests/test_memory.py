import random

import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from understory import (
    EventEdge,
    GoalSupport,
    MemoryState,
    SchemaEdge,
    SchemaInstance,
    UnknownEvent,
    run_fixpoint,
    run_fixpoint_group,
)

from generators import random_group
from oracles import atomic_fixpoint


def state_over(*events, true=()):
    state = MemoryState(frozenset(events), set(true), set())
    return state


class TestMemoryState:
    def test_closed_world_query(self):
        state = state_over("a", "b", true=["a"])
        assert state.query("a")
        assert not state.query("b")

    def test_unknown_ids_raise(self):
        state = state_over("a")
        with pytest.raises(UnknownEvent):
            state.query("zz")
        with pytest.raises(UnknownEvent):
            state.assert_true("zz")

    def test_assert_is_idempotent(self):
        state = state_over("a")
        state.assert_true("a")
        state.assert_true("a")
        assert state.truths == {"a"}

    def test_copy_is_independent(self):
        state = state_over("a", "b", true=["a"])
        twin = state.copy()
        twin.assert_true("b")
        twin.confirm(("a", "part", "b"))
        assert state.truths == {"a"} and not state.confirmed


class TestRule3:
    def test_truth_flows_and_confirms(self):
        inst = SchemaInstance("m", (
            SchemaEdge("n1", "part", "n2"),
            SchemaEdge("n1", "sequel", "n3"),
            SchemaEdge("n3", "cons", "n4"),
        ), {"n1": "e1", "n2": "e2", "n3": "e3", "n4": "e4"})
        state = state_over("e1", "e2", "e3", "e4", true=["e1"])
        trace = []
        run_fixpoint(state, inst, trace=trace)
        assert state.truths == {"e1", "e2", "e3", "e4"}
        assert state.confirmed == {("e1", "part", "e2"),
                                   ("e1", "sequel", "e3"),
                                   ("e3", "cons", "e4")}
        # Edges fire in (source, target, label) order and see truths added
        # earlier in the same round.
        assert trace == [
            "RULE3 n1 -part-> n2 => e2 true; e1 -part-> e2 confirmed",
            "RULE3 n1 -sequel-> n3 => e3 true; e1 -sequel-> e3 confirmed",
            "RULE3 n3 -cons-> n4 => e4 true; e3 -cons-> e4 confirmed",
        ]

    def test_false_source_is_inert(self):
        inst = SchemaInstance("m", (SchemaEdge("n1", "part", "n2"),),
                              {"n1": "e1", "n2": "e2"})
        state = state_over("e1", "e2")
        run_fixpoint(state, inst)
        assert not state.truths and not state.confirmed

    def test_unmapped_endpoint_is_inert(self):
        inst = SchemaInstance("m", (SchemaEdge("n1", "part", "n2"),),
                              {"n1": "e1"})
        state = state_over("e1", true=["e1"])
        run_fixpoint(state, inst)
        assert not state.confirmed


class TestRule1:
    def test_confirms_without_adding_truth(self):
        inst = SchemaInstance("m", (SchemaEdge("n1", "pre", "n2", test=True),),
                              {"n1": "a", "n2": "b"})
        state = state_over("a", "b", true=["b"])
        trace = []
        run_fixpoint(state, inst, trace=trace)
        assert state.truths == {"b"}  # the source is NOT made true
        assert state.confirmed == {("a", "pre", "b")}
        assert trace == ["RULE1 n1 -pre$-> n2 => a -pre-> b confirmed"]

    def test_needs_target_truth(self):
        inst = SchemaInstance("m", (SchemaEdge("n1", "pre", "n2", test=True),),
                              {"n1": "a", "n2": "b"})
        state = state_over("a", "b", true=["a"])
        run_fixpoint(state, inst)
        assert not state.confirmed

    def test_test_factor_on_other_labels_is_inert(self):
        inst = SchemaInstance("m", (SchemaEdge("n1", "part", "n2", test=True),),
                              {"n1": "a", "n2": "b"})
        state = state_over("a", "b", true=["a", "b"])
        run_fixpoint(state, inst)
        assert not state.confirmed


class TestRule2:
    def _instance(self):
        return SchemaInstance("m", (SchemaEdge("n1", "goal", "n9", test=True),),
                              {"n1": "a", "n2": "b", "n3": "c", "n9": "g"})

    def _support(self):
        return GoalSupport(source="n1", target="n9", chain=("n1", "n2"),
                           final_state="n3")

    def test_fires_when_chain_and_final_state_true(self):
        state = state_over("a", "b", "c", "g", true=["a", "b", "c"])
        trace = []
        run_fixpoint(state, self._instance(), supports=[self._support()],
                     trace=trace)
        assert "g" in state.truths
        assert ("a", "goal", "g") in state.confirmed
        assert trace == ["RULE2 n1 -goal$-> n9 => g true; a -goal-> g confirmed"]

    def test_needs_whole_chain(self):
        state = state_over("a", "b", "c", "g", true=["a", "c"])
        run_fixpoint(state, self._instance(), supports=[self._support()])
        assert "g" not in state.truths and not state.confirmed

    def test_needs_final_state(self):
        state = state_over("a", "b", "c", "g", true=["a", "b"])
        run_fixpoint(state, self._instance(), supports=[self._support()])
        assert "g" not in state.truths

    def test_goal_edge_without_support_is_inert(self):
        state = state_over("a", "b", "c", "g", true=["a", "b", "c"])
        run_fixpoint(state, self._instance(), supports=[])
        assert "g" not in state.truths and not state.confirmed

    def test_chain_truth_earned_by_rule3_feeds_rule2(self):
        inst = SchemaInstance("m", (
            SchemaEdge("n1", "part", "n2"),
            SchemaEdge("n2", "part", "n3"),
            SchemaEdge("n1", "goal", "n9", test=True),
        ), {"n1": "a", "n2": "b", "n3": "c", "n9": "g"})
        state = state_over("a", "b", "c", "g", true=["a"])
        run_fixpoint(state, inst, supports=[self._support()])
        assert state.truths == {"a", "b", "c", "g"}
        assert ("a", "goal", "g") in state.confirmed


class TestEventEdges:
    def test_cross_schema_edge_behaves_like_rule3(self):
        edge = EventEdge("a", "sequel", "b", "one.r -sequel-> two.r")
        state = state_over("a", "b", true=["a"])
        trace = []
        run_fixpoint_group(state, [], [edge], trace)
        assert state.truths == {"a", "b"}
        assert state.confirmed == {("a", "sequel", "b")}
        assert trace == ["RULE3 one.r -sequel-> two.r => b true; a -sequel-> b confirmed"]

    def test_group_shares_truth_across_instances(self):
        first = SchemaInstance("one", (SchemaEdge("x1", "part", "x2"),),
                               {"x1": "a", "x2": "b"})
        second = SchemaInstance("two", (SchemaEdge("y1", "cons", "y2"),),
                                {"y1": "b", "y2": "c"})
        state = state_over("a", "b", "c", true=["a"])
        run_fixpoint_group(state, [(first, ()), (second, ())])
        assert state.truths == {"a", "b", "c"}


# ---------------------------------------------------------------------------
# Fixpoint laws on random instances


@given(st.integers(0, 10_000))
@settings(max_examples=150, deadline=None)
def test_fixpoint_laws_random(seed):
    rng = random.Random(seed)
    state, parts, event_edges = random_group(rng)
    initial = state.snapshot()
    engine = state.copy()
    run_fixpoint_group(engine, parts, event_edges)
    after = engine.snapshot()
    # Monotone: nothing is ever retracted.
    assert initial[0] <= after[0] and initial[1] <= after[1]
    # Idempotent: a second run adds nothing.
    trace = []
    run_fixpoint_group(engine, parts, event_edges, trace)
    assert engine.snapshot() == after and trace == []
    # Confluent: single random firings land on the same fixpoint.
    for order_seed in range(3):
        atomic = state.copy()
        atomic_fixpoint(atomic, parts, event_edges,
                        random.Random(order_seed))
        assert atomic.snapshot() == after
