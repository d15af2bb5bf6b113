"""The search loop and the incremental interface.

The two engines must be interchangeable to the bit: for every instance the
pure and the compiled runs take the same decisions, hit the same conflicts,
and return the same model.
"""

import random

import pytest

from conftest import fast_engine, sample_instance
from dsat.core import evaluate
from dsat.gen import GenSpec, generate
from dsat.oracle import brute_force, ur_closure
from dsat.solver import (SAT, UNSAT, UNSAT_UNDER_ASSUMPTIONS, SolveResult,
                         SolveTimeout, Solver)

XY_CARDS = [4, 4]
XY_CLAUSES = [[(0, 0b0101), (1, 0b0011)], [(0, 0b1010)]]

TRIPLE_CARDS = [3]
TRIPLE_CLAUSES = [[(0, 0b011)], [(0, 0b110)], [(0, 0b101)]]

needs_fast = pytest.mark.skipif(fast_engine is None,
                                reason="compiled engine not built")


def fingerprint(result: SolveResult):
    stats = result.stats
    return (result.status, result.model, stats.decisions, stats.conflicts,
            stats.propagations, stats.learned, stats.restarts, stats.deleted)


# ------------------------------------------------------------------ basics

def test_sat_instance_returns_checked_model():
    solver = Solver(XY_CARDS, XY_CLAUSES, verify_models=True)
    result = solver.solve()
    assert result.status == SAT
    assert evaluate(XY_CLAUSES, result.model)
    assert solver.get_value(0) in (1, 3)
    assert solver.get_value(1) in (0, 1)


def test_unsat_instance():
    result = Solver(TRIPLE_CARDS, TRIPLE_CLAUSES).solve()
    assert result.status == UNSAT
    assert result.model is None


def test_empty_formula_is_sat():
    solver = Solver([3, 2])
    result = solver.solve()
    assert result.status == SAT
    assert len(result.model) == 2
    assert 0 <= result.model[0] < 3
    assert 0 <= result.model[1] < 2


def test_get_value_guards():
    solver = Solver(XY_CARDS, XY_CLAUSES)
    with pytest.raises(ValueError):
        solver.get_value(0)
    solver.solve()
    with pytest.raises(ValueError):
        solver.get_value(2)
    unsat = Solver(TRIPLE_CARDS, TRIPLE_CLAUSES)
    unsat.solve()
    with pytest.raises(ValueError):
        unsat.get_value(0)


def test_timeout_raises():
    solver = Solver(XY_CARDS, XY_CLAUSES)
    with pytest.raises(SolveTimeout):
        solver.solve(timeout_s=0.0)


def test_from_document():
    from dsat.formats import parse_dcnf
    doc = parse_dcnf("p dcnf 2 2\nd 4 4\n1:1,3 2:1,2 0\n1:2,4 0\n")
    assert Solver.from_document(doc).solve().status == SAT


def test_solver_survives_repeated_solves():
    solver = Solver(XY_CARDS, XY_CLAUSES)
    first = solver.solve()
    second = solver.solve()
    assert first.status == second.status == SAT
    assert first.model == second.model
    solver.reset()
    assert solver.solve().status == SAT


# ------------------------------------------------------------- assumptions

def test_assumption_conflicts_with_propagation():
    solver = Solver(XY_CARDS, XY_CLAUSES)
    result = solver.solve_assuming([(1, 0b1100)])
    assert result.status == UNSAT_UNDER_ASSUMPTIONS
    # the instance itself is still satisfiable afterwards
    assert solver.solve().status == SAT


def test_assumption_narrows_the_model():
    solver = Solver(XY_CARDS, XY_CLAUSES)
    result = solver.solve_assuming([(1, 0b0001)])
    assert result.status == SAT
    assert solver.get_value(1) == 0
    assert solver.get_value(0) in (1, 3)


def test_assumptions_validate_their_literals():
    solver = Solver(XY_CARDS, XY_CLAUSES)
    with pytest.raises(ValueError):
        solver.solve_assuming([(2, 0b0001)])
    with pytest.raises(ValueError):
        solver.solve_assuming([(0, 0)])
    with pytest.raises(ValueError):
        solver.solve_assuming([(0, 0b1111)])


def test_empty_assumptions_match_plain_solve():
    solver = Solver(XY_CARDS, XY_CLAUSES)
    assert solver.solve_assuming([]).status == solver.solve().status


def test_unsat_base_beats_assumption_status():
    solver = Solver(TRIPLE_CARDS, TRIPLE_CLAUSES)
    assert solver.solve_assuming([(0, 0b001)]).status == UNSAT


# -------------------------------------------------------------- increments

def test_add_clause_narrows_and_latches():
    solver = Solver(XY_CARDS, XY_CLAUSES)
    assert solver.solve().status == SAT
    solver.add_clause([(0, 0b0010)])
    assert solver.solve().status == SAT
    assert solver.get_value(0) == 1
    solver.add_clause([(0, 0b0101)])
    assert solver.solve().status == UNSAT
    # latched for good, even under assumptions
    assert solver.solve().status == UNSAT
    assert solver.solve_assuming([(1, 0b0001)]).status == UNSAT


def test_add_tautology_is_a_no_op():
    solver = Solver(XY_CARDS, XY_CLAUSES)
    solver.add_clause([(0, 0b1111)])
    assert solver.solve().status == SAT
    assert len(solver.state.clauses) <= len(XY_CLAUSES)


def test_add_empty_clause_latches():
    solver = Solver(XY_CARDS, XY_CLAUSES)
    solver.add_clause([])
    assert solver.solve().status == UNSAT


def test_learned_clauses_survive_additions():
    doc = generate(GenSpec(var_count=5, clause_count=38, card=4, seed=733))
    solver = Solver(doc.cards, doc.clauses)
    first = solver.solve()
    learned_before = solver.state.stats.learned
    solver.add_clause([(0, 0b0011)])
    second = solver.solve()
    assert solver.state.stats.learned >= learned_before
    fresh = Solver(doc.cards, list(doc.clauses) + [[(0, 0b0011)]]).solve()
    assert second.status == fresh.status
    if first.status == UNSAT:
        assert second.status == UNSAT


# ------------------------------------------------------------------ engines

def test_engine_keyword_is_validated():
    with pytest.raises(ValueError):
        Solver(XY_CARDS, XY_CLAUSES, engine="turbo")


def test_pure_engine_forced():
    solver = Solver(XY_CARDS, XY_CLAUSES, engine="pure")
    assert solver.solve().status == SAT


@needs_fast
def test_fast_engine_forced():
    solver = Solver(XY_CARDS, XY_CLAUSES, engine="fast")
    assert solver.solve().status == SAT


@needs_fast
def test_fast_engine_rejects_wide_domains():
    with pytest.raises(ValueError):
        Solver([70, 4], engine="fast")


def test_wide_domains_fall_back_to_pure():
    solver = Solver([70, 4], [[(0, (1 << 69) | 1), (1, 0b0011)]])
    result = solver.solve()
    assert result.status == SAT
    assert evaluate([[(0, (1 << 69) | 1), (1, 0b0011)]], result.model)


@needs_fast
def test_engines_agree_to_the_bit():
    """Same decisions, conflicts, learned counts and model on both engines."""
    rng = random.Random(31)
    checked = 0
    for _ in range(60):
        cards, clauses = sample_instance(rng, min_vars=3, max_vars=6,
                                         max_card=5, max_clauses=20)
        pure = Solver(cards, clauses, engine="pure").solve()
        fast = Solver(cards, clauses, engine="fast").solve()
        assert fingerprint(pure) == fingerprint(fast)
        checked += 1
    for seed in range(880, 905):
        doc = generate(GenSpec(var_count=5, clause_count=40, card=4, seed=seed))
        pure = Solver(doc.cards, doc.clauses, engine="pure").solve()
        fast = Solver(doc.cards, doc.clauses, engine="fast").solve()
        assert fingerprint(pure) == fingerprint(fast)
        checked += 1
    assert checked == 85


@needs_fast
def test_engines_agree_with_minimization():
    for seed in range(905, 915):
        doc = generate(GenSpec(var_count=5, clause_count=40, card=4, seed=seed))
        pure = Solver(doc.cards, doc.clauses, engine="pure",
                      minimize_learned=True).solve()
        fast = Solver(doc.cards, doc.clauses, engine="fast",
                      minimize_learned=True).solve()
        assert fingerprint(pure) == fingerprint(fast)


# ------------------------------------------------------------- determinism

def test_runs_are_deterministic():
    for seed in (501, 502, 503):
        doc = generate(GenSpec(var_count=5, clause_count=40, card=4, seed=seed))
        a = Solver(doc.cards, doc.clauses).solve()
        b = Solver(doc.cards, doc.clauses).solve()
        assert fingerprint(a) == fingerprint(b)


# ------------------------------------------------------------ whole-system

def test_statuses_match_brute_force():
    rng = random.Random(32)
    for _ in range(120):
        cards, clauses = sample_instance(rng)
        result = Solver(cards, clauses, verify_models=True).solve()
        expected = brute_force(cards, clauses)
        assert result.status == expected.status
        if result.status == SAT:
            assert evaluate(clauses, result.model)


def test_incremental_scripts_match_fresh_solves():
    """Random add/solve/assume scripts never diverge from scratch solvers."""
    rng = random.Random(33)
    for _ in range(50):
        cards, clauses = sample_instance(rng, min_vars=3, max_vars=5,
                                         max_card=4, max_clauses=10)
        solver = Solver(cards, clauses)
        acc = [list(cl) for cl in clauses]
        for _ in range(rng.randint(1, 5)):
            length = rng.randint(1, min(3, len(cards)))
            chosen = rng.sample(range(len(cards)), length)
            extra = [(v, rng.randrange(1, (1 << cards[v]) - 1)) for v in chosen]
            solver.add_clause(extra)
            acc.append(extra)
            if rng.random() < 0.4:
                var = rng.randrange(len(cards))
                states = rng.randrange(1, (1 << cards[var]) - 1)
                got = solver.solve_assuming([(var, states)]).status
                fresh = Solver(cards, acc).solve_assuming([(var, states)]).status
            else:
                got = solver.solve().status
                fresh = Solver(cards, acc).solve().status
            assert got == fresh


def test_final_actives_close_under_unit_rules():
    """After a SAT solve the remaining actives are singletons; after backing
    off to level 0 the permanent prunes agree with the root closure."""
    rng = random.Random(34)
    for _ in range(40):
        cards, clauses = sample_instance(rng, min_vars=3, max_vars=5,
                                         max_card=4, max_clauses=12)
        solver = Solver(cards, clauses)
        if solver.solve().status != SAT:
            continue
        assert all(v.active.bit_count() == 1 for v in solver.state.variables)
        solver.reset()
        closure = ur_closure(cards, clauses)
        assert not closure.contradiction
        for var, want in zip(solver.state.variables, closure.active):
            assert var.active & want == var.active
