"""The unit-resolution engine: watching, trail bookkeeping, backtracking.

Every test runs against the pure Python engine and, when the compiled
kernel is importable, against the kernel as well; the two must be
indistinguishable through this API.
"""

import random

import pytest

from conftest import (ENGINES, ENGINE_IDS, check_watch_invariants, flush_units,
                      random_decision, sample_instance)
from dsat.core import normalize_clause
from dsat.oracle import ur_closure

pytestmark = pytest.mark.parametrize("eng", ENGINES, ids=ENGINE_IDS)

XY_VARS = [(0, 4), (1, 4)]
XY_CLAUSES = [[(0, 0b0101), (1, 0b0011)], [(0, 0b1010)]]


def make_state(eng, cards, clauses):
    normalized = [normalize_clause(cl, cards) for cl in clauses]
    return eng.init_state(list(enumerate(cards)), normalized)


def xy_state(eng):
    state = make_state(eng, [4, 4], XY_CLAUSES)
    assert flush_units(eng, state)
    return state


def test_init_queues_units_and_watches_pairs(eng):
    state = eng.init_state(XY_VARS, XY_CLAUSES)
    assert len(state.clauses) == 1
    assert [(lit.var.index, lit.states) for lit in state.unit_literals] == [(0, 0b1010)]
    clause = state.clauses[0]
    assert (clause.watch_a, clause.watch_b) == (0, 1)
    for lit in clause.literals:
        assert clause in lit.watchers
    assert state.level == 0
    assert state.bump == 1.0
    assert state.bump_scale == 1.05


def test_init_empty_clause_latches(eng):
    state = eng.init_state([(0, 2)], [[]])
    assert state.latched_unsat


def test_init_rejects_misnumbered_variables(eng):
    with pytest.raises(ValueError):
        eng.init_state([(1, 2)], [])


def test_variable_cardinality_guard(eng):
    with pytest.raises(ValueError):
        eng.init_state([(0, 1)], [])


def test_level0_unit_propagation(eng):
    state = xy_state(eng)
    assert [v.active for v in state.variables] == [0b1010, 0b0011]
    assert state.level == 0
    assert state.stats.propagations > 0


def test_decide_prunes_and_advances(eng):
    state = xy_state(eng)
    y = state.variables[1]
    assert eng.decide(state, y, 0b0001)
    assert y.active == 0b0001
    assert state.level == 1
    assert state.stats.decisions == 1


def test_decide_conflict_reports_falsified_clause(eng):
    state = make_state(eng, [3, 3], [[(0, 0b001), (1, 0b011)], [(0, 0b001), (1, 0b100)]])
    ok = eng.decide(state, state.variables[0], 0b110)
    assert not ok
    assert state.conflict is state.clauses[1]


def test_decide_without_clauses(eng):
    state = make_state(eng, [3], [])
    assert eng.decide(state, state.variables[0], 0b001)
    assert state.variables[0].active == 0b001


def test_undecide_restores_snapshot(eng):
    state = xy_state(eng)
    y = state.variables[1]
    eng.decide(state, y, 0b0001)
    eng.undecide(state)
    assert y.active == 0b0011
    assert state.level == 0


def test_undecide_is_lifo(eng):
    state = make_state(eng, [4, 4], [])
    x, y = state.variables
    eng.decide(state, x, 0b0011)
    eng.decide(state, y, 0b0111)
    eng.decide(state, x, 0b0001)
    assert (x.active, y.active) == (0b0001, 0b0111)
    eng.undecide(state)
    assert (x.active, y.active) == (0b0011, 0b0111)
    eng.undecide(state)
    assert (x.active, y.active) == (0b0011, 0b1111)
    eng.undecide(state)
    assert (x.active, y.active) == (0b1111, 0b1111)
    assert state.level == 0


def test_undecide_at_root_fails(eng):
    state = make_state(eng, [2], [])
    with pytest.raises(ValueError):
        eng.undecide(state)


def test_level0_prunes_survive_backtracking(eng):
    state = xy_state(eng)
    eng.decide(state, state.variables[0], 0b0010)
    eng.undecide(state)
    assert state.variables[0].active == 0b1010


def test_status_predicates(eng):
    state = xy_state(eng)
    x = state.variables[0]
    assert eng.implied(x.literal(0b1011))
    assert not eng.implied(x.literal(0b0011))
    assert eng.falsified(x.literal(0b0101))
    assert not eng.falsified(x.literal(0b0011))
    picked = eng.active_state(x.literal(0b0011))
    assert (1 << picked) & 0b0010


def test_prune_records(eng):
    state = xy_state(eng)
    x = state.variables[0]
    # both of x's lost states went in one level-0 assertion
    assert eng.last_pruned_state(x, 0b0101) == 0
    assert eng.last_pruned_state(x, 0b0100) == 2
    event = eng.latest_event(x, 0b0101)
    assert event[0] == 0b0101 and event[1] == 0
    with pytest.raises(ValueError):
        eng.last_pruned_state(x, 0)
    with pytest.raises(ValueError):
        eng.last_pruned_state(x, 0b1010)


def test_later_prune_wins_record_lookup(eng):
    state = xy_state(eng)
    x = state.variables[0]
    eng.decide(state, x, 0b0010)
    assert eng.last_pruned_state(x, 0b1100) == 3
    assert eng.latest_event(x, 0b1101)[1] == 1
    assert eng.latest_event(x, 0b0101)[1] == 0




def snapshot(state):
    return [(v.active, list(v.level_stack)) for v in state.variables]


def test_random_traces_keep_invariants(eng):
    """Random decide/undecide walks: snapshots restore exactly, watches hold,
    prune events stay sorted by level and clock, and active sets agree with
    the naive closure at every quiescent point."""
    rng = random.Random(404)
    for _ in range(120):
        cards, clauses = sample_instance(rng)
        normalized = [normalize_clause(cl, cards) for cl in clauses]
        normalized = [cl for cl in normalized if cl is not None]
        state = eng.init_state(list(enumerate(cards)), normalized)
        if state.latched_unsat:
            continue
        decisions = []
        if not flush_units(eng, state):
            assert ur_closure(cards, normalized).contradiction
            continue
        dead = False
        for _ in range(rng.randint(0, 4)):
            pick = random_decision(rng, state)
            if pick is None:
                break
            var, states = pick
            before = snapshot(state)
            level_before = state.level
            ok = eng.decide(state, var, states)
            trial = decisions + [(var.index, states)]
            closure = ur_closure(cards, normalized, trial)
            if not ok:
                assert closure.contradiction
                state.conflict = None
                eng.undecide(state)
                assert snapshot(state) == before
                assert state.level == level_before
                dead = True
                break
            assert not closure.contradiction
            assert [v.active for v in state.variables] == closure.active
            decisions = trial
            check_watch_invariants(eng, state)
            for v in state.variables:
                marks = [(ev[1], ev[2]) for ev in v.events]
                assert marks == sorted(marks)
        if dead:
            continue
        while state.level > 0:
            eng.undecide(state)
        closure = ur_closure(cards, normalized)
        assert [v.active for v in state.variables] == closure.active
