"""Shared helpers for the test suite.

Random instances use ``random.Random`` with explicit seeds so every run of
the suite sees the same inputs.  ``sample_instance`` draws small CNFs in the
shape the brute-force checkers can afford to enumerate; ``sample_nnf`` draws
small circuits the same way.
"""

from __future__ import annotations

import itertools
import random
from types import SimpleNamespace
from typing import Optional

import dsat.heuristics as _heuristics
import dsat.learn as _learn
import dsat.propagate as _propagate
from dsat.core import RawClause, full_set
from dsat.formats import NnfDocument, NnfNode

try:
    from dsat import _engine as _fast
except ImportError:
    _fast = None

# Parameterizing tests over uniform engine namespaces.  The pure engine is
# split across three modules; the compiled one is a single module but leans
# on the pure code for minimization and the clause-database policies, the
# same way the solver does.
_SHARED = dict(
    minimize=_learn.minimize,
    on_conflict=_heuristics.on_conflict,
    reduce_db=_heuristics.reduce_db,
    locked_clauses=_heuristics.locked_clauses,
    is_locked=_heuristics.is_locked,
)

pure_engine = SimpleNamespace(
    name="pure",
    init_state=_propagate.init_state,
    install_clause=_propagate.install_clause,
    assert_literal=_propagate.assert_literal,
    decide=_propagate.decide,
    open_level=_propagate.open_level,
    undecide=_propagate.undecide,
    backtrack_to=_propagate.backtrack_to,
    reseat=_propagate.reseat,
    checkpoint=_propagate.checkpoint,
    implied=_propagate.implied,
    falsified=_propagate.falsified,
    active_state=_propagate.active_state,
    latest_event=_propagate.latest_event,
    last_pruned_state=_propagate.last_pruned_state,
    analyze_literal=_learn.analyze_literal,
    learn_asserting=_learn.learn_asserting,
    compute_lbd=_learn.compute_lbd,
    select_literal=_heuristics.select_literal,
    update_score=_heuristics.update_score,
    **_SHARED,
)

if _fast is None:
    fast_engine = None
else:
    fast_engine = SimpleNamespace(
        name="fast",
        init_state=_fast.init_state,
        install_clause=_fast.install_clause,
        assert_literal=_fast.assert_literal,
        decide=_fast.decide,
        open_level=_fast.open_level,
        undecide=_fast.undecide,
        backtrack_to=_fast.backtrack_to,
        reseat=_fast.reseat,
        checkpoint=_fast.checkpoint,
        implied=_fast.implied,
        falsified=_fast.falsified,
        active_state=_fast.active_state,
        latest_event=_fast.latest_event,
        last_pruned_state=_fast.last_pruned_state,
        analyze_literal=_fast.analyze_literal,
        learn_asserting=_fast.learn_asserting,
        compute_lbd=_fast.compute_lbd,
        select_literal=_fast.select_literal,
        update_score=_fast.update_score,
        **_SHARED,
    )

ENGINES = [pure_engine] if fast_engine is None else [pure_engine, fast_engine]
ENGINE_IDS = ["pure"] if fast_engine is None else ["pure", "fast"]


def sample_instance(rng: random.Random, min_vars: int = 2, max_vars: int = 6,
                    max_card: int = 5, max_clauses: int = 20
                    ) -> tuple[list[int], list[RawClause]]:
    """A random CNF: clause lengths 1..3 over distinct variables."""
    n = rng.randint(min_vars, max_vars)
    cards = [rng.randint(2, max_card) for _ in range(n)]
    m = rng.randint(1, max_clauses)
    clauses = []
    for _ in range(m):
        length = rng.randint(1, min(3, n))
        chosen = rng.sample(range(n), length)
        clauses.append([(v, rng.randrange(1, full_set(cards[v]))) for v in chosen])
    return cards, clauses


def all_worlds(cards):
    return itertools.product(*[range(card) for card in cards])


def sample_nnf(rng: random.Random, max_nodes: int = 15, max_vars: int = 4,
               max_card: int = 4) -> NnfDocument:
    """A random circuit in topological order; leaves lean on literals."""
    n_vars = rng.randint(1, max_vars)
    cards = [rng.randint(2, max_card) for _ in range(n_vars)]
    count = rng.randint(1, max_nodes)
    nodes: list[NnfNode] = []
    for i in range(count):
        if i == 0 or rng.random() < 0.45:
            kind = rng.choice(["T", "F", "L", "L", "L", "L"])
            if kind == "L":
                var = rng.randrange(n_vars)
                states = rng.randrange(1, full_set(cards[var]))
                nodes.append(NnfNode("L", var=var, states=states))
            else:
                nodes.append(NnfNode(kind))
        else:
            arity = rng.randint(1, min(3, i))
            children = rng.sample(range(i), arity)
            nodes.append(NnfNode(rng.choice(["A", "O"]), children=children))
    return NnfDocument(cards, nodes)


def flush_units(eng, state) -> bool:
    """Assert the queued input units at level 0; False on contradiction."""
    eng.reseat(state)
    ok = True
    for lit in state.unit_literals:
        act = lit.var.active & lit.states
        if act == lit.var.active:
            continue
        if not act or not eng.assert_literal(state, lit.var, lit.states, None):
            ok = False
            break
    eng.checkpoint(state)
    return ok


def random_decision(rng: random.Random, state) -> Optional[tuple]:
    """A random literal satisfying the decision precondition, or None."""
    candidates = [v for v in state.variables if v.active.bit_count() >= 2]
    if not candidates:
        return None
    var = rng.choice(candidates)
    active_states = [s for s in range(var.card) if (1 << s) & var.active]
    keep = rng.sample(active_states, rng.randint(1, len(active_states) - 1))
    states = 0
    for s in keep:
        states |= 1 << s
    return var, states


def check_watch_invariants(eng, state):
    """Every watch rule the engines promise, checked directly on a state."""
    for clause in state.clauses:
        implied = any(eng.implied(lit) for lit in clause.literals)
        for pos in (clause.watch_a, clause.watch_b):
            lit = clause.literals[pos]
            assert not eng.falsified(lit) or implied
    for var in state.variables:
        seen: dict[int, int] = {}
        for s, watchers in enumerate(var.state_watchers):
            assert bool(watchers) == bool(var.watched_mask & (1 << s))
            for lit in watchers:
                seen[id(lit)] = seen.get(id(lit), 0) + 1
                assert lit.watchers
        for count in seen.values():
            assert count == 1
    for clause in state.clauses:
        for lit in clause.literals:
            if lit.watchers:
                assert any(lit in watchers for watchers in lit.var.state_watchers)
