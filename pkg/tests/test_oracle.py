"""The brute-force checkers themselves, pinned on hand-countable cases."""

import random

import pytest

from conftest import all_worlds, sample_instance
from dsat.formats import DcnfDocument, binarize
from dsat.oracle import brute_force, check_implied, ur_closure

XY_CARDS = [4, 4]
XY_CLAUSES = [[(0, 0b0101), (1, 0b0011)], [(0, 0b1010)]]

# three units over one three-state variable with empty joint intersection
TRIPLE_UNSAT = ([3], [[(0, 0b011)], [(0, 0b110)], [(0, 0b101)]])


def test_brute_force_xy():
    result = brute_force(XY_CARDS, XY_CLAUSES)
    assert result.status == "SAT"
    assert result.model_count == 4
    # first satisfying world in lexicographic order
    assert result.witness == [1, 0]


def test_brute_force_unsat():
    result = brute_force(*TRIPLE_UNSAT)
    assert result.status == "UNSAT"
    assert result.model_count == 0
    assert result.witness is None


def test_brute_force_empty_cnf():
    result = brute_force([3], [])
    assert result.status == "SAT"
    assert result.model_count == 3
    assert result.witness == [0]


def test_brute_force_world_limit():
    with pytest.raises(ValueError):
        brute_force([10] * 8, [])


def test_ur_closure_xy():
    result = ur_closure(XY_CARDS, XY_CLAUSES)
    assert not result.contradiction
    assert result.active == [0b1010, 0b0011]


def test_ur_closure_on_binarized_xy_derives_nothing():
    doc = binarize(DcnfDocument(list(XY_CARDS), [list(c) for c in XY_CLAUSES]))
    result = ur_closure(doc.cards, doc.clauses)
    assert not result.contradiction
    # the second variable's four indicator Booleans keep both states
    assert result.active[4:8] == [0b11] * 4


def test_ur_closure_contradiction():
    result = ur_closure([3], [[(0, 0b001)], [(0, 0b010)]])
    assert result.contradiction


def test_ur_closure_idempotent_under_implied_decision():
    base = ur_closure(XY_CARDS, XY_CLAUSES)
    again = ur_closure(XY_CARDS, XY_CLAUSES, decisions=[(0, 0b1010)])
    assert again.active == base.active
    assert again.contradiction == base.contradiction


def test_ur_closure_scan_order_independent():
    rng = random.Random(71)
    for _ in range(60):
        cards, clauses = sample_instance(rng)
        base = ur_closure(cards, clauses)
        shuffled = list(clauses)
        rng.shuffle(shuffled)
        other = ur_closure(cards, shuffled)
        assert other.contradiction == base.contradiction
        if not base.contradiction:
            assert other.active == base.active


def test_ur_closure_sound_by_enumeration():
    """Every model of the CNF plus decisions stays inside the closure."""
    rng = random.Random(72)
    for _ in range(60):
        cards, clauses = sample_instance(rng, max_vars=4, max_card=4)
        decisions = []
        if rng.random() < 0.7:
            var = rng.randrange(len(cards))
            decisions.append((var, rng.randrange(1, (1 << cards[var]) - 1)))
        closure = ur_closure(cards, clauses, decisions)
        for world in all_worlds(cards):
            ok = all((1 << world[var]) & states for var, states in decisions)
            if ok:
                for clause in clauses:
                    if not any((1 << world[var]) & states for var, states in clause):
                        ok = False
                        break
            if ok:
                assert not closure.contradiction
                for var, state in enumerate(world):
                    assert (1 << state) & closure.active[var]


def test_check_implied_examples():
    assert check_implied([3], [[(0, 0b011)], [(0, 0b110)]], [(0, 0b010)]) is True
    assert check_implied(XY_CARDS, XY_CLAUSES, [(1, 0b0011)]) is True
    assert check_implied(XY_CARDS, XY_CLAUSES, [(1, 0b0001)]) is False


def test_check_implied_world_limit():
    with pytest.raises(ValueError):
        check_implied([10] * 8, [], [(0, 0b1)])


def test_binarized_status_matches():
    rng = random.Random(73)
    for _ in range(40):
        cards, clauses = sample_instance(rng, max_vars=4, max_card=4, max_clauses=10)
        doc = binarize(DcnfDocument(cards, clauses))
        assert brute_force(doc.cards, doc.clauses).status == \
            brute_force(cards, clauses).status
