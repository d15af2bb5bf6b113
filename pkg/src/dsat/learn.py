"""Conflict analysis: derive an asserting clause by resolution over reasons.

The conflict clause is never materialized while it is being rewritten.
Each variable carries the state set it contributes (``conflict_states``)
plus its most recently pruned contributed state, and the solver state counts
how many variables contribute states pruned at the conflict level.  While
more than one does, the variable holding the overall latest prune is
resolved against the clause recorded as that prune's reason: the variable's
contribution is intersected with the reason's literal on it, and the
reason's other literals fold in by union.  Each resolution step only adds
states pruned strictly earlier, so the loop terminates with exactly one
literal falsified at the conflict level.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .core import Literal, Variable
from .heuristics import update_score
from .propagate import SolverState, latest_event


@dataclass
class LearnResult:
    """An asserting clause plus where to jump back to.

    ``asserting`` is the one literal whose states were pruned at the
    conflict level; ``assertion_level`` is the deepest falsification level
    among the other literals (0 for a unit result) and ``last_at_level`` is
    the literal falsified last at that level (None for a unit result).
    """

    literals: list[Literal]
    asserting: Literal
    assertion_level: int
    last_at_level: Optional[Literal]


def analyze_literal(lit: Literal, state: SolverState) -> None:
    """Fold one falsified literal into the implicit conflict clause.

    New states join the variable's contribution, its latest contributed
    prune is refreshed, the added states get score bumps, and the count of
    variables at the conflict level is adjusted on the way in.
    """
    var = lit.var
    last_ev = var.last_conflict_event
    at_conflict = last_ev is not None and last_ev[1] == state.level
    added = lit.states & ~var.conflict_states
    if added:
        if not var.conflict_states:
            state.touched_vars.append(var)
        var.conflict_states |= added
        # the newest prune among the added states is the first event from
        # the top that touches them; it displaces the current latest only
        # with a strictly newer stamp
        for ev in reversed(var.events):
            inter = ev[0] & added
            if inter:
                if (last_ev is None or ev[1] > last_ev[1]
                        or (ev[1] == last_ev[1] and ev[2] > last_ev[2])):
                    var.last_conflict_state = (inter & -inter).bit_length() - 1
                    var.last_conflict_event = ev
                break
        update_score(var, added, state)
    if not at_conflict:
        ev = var.last_conflict_event
        if ev is not None and ev[1] == state.level:
            state.num_asserting += 1


def learn_asserting(state: SolverState, conflict) -> LearnResult:
    """Turn the conflicting clause into an asserting clause.

    Requires being at the conflict level with the analysis scratch clean.
    A conflict clause that is already asserting is returned unchanged.
    All scratch (contributions, latest states, touched list, counter) is
    cleared before returning.
    """
    level = state.level
    for lit in conflict.literals:
        analyze_literal(lit, state)
    touched = state.touched_vars
    while state.num_asserting > 1:
        # resolve on the variable holding the overall latest pruned state
        best_var: Optional[Variable] = None
        best_level = -1
        best_time = -1
        for var in touched:
            if var.conflict_states:
                ev = var.last_conflict_event
                lvl = ev[1]
                if lvl > best_level or (lvl == best_level and ev[2] > best_time):
                    best_var = var
                    best_level = lvl
                    best_time = ev[2]
        assert best_var is not None
        var = best_var
        reason = var.last_conflict_event[3]
        assert reason is not None
        for lit in reason.literals:
            if lit.var is var:
                inter = var.conflict_states & lit.states
                var.conflict_states = inter
                if not inter:
                    # the variable leaves the clause entirely
                    var.last_conflict_state = -1
                    var.last_conflict_event = None
                    state.num_asserting -= 1
                else:
                    ev = latest_event(var, inter)
                    evinter = ev[0] & inter
                    var.last_conflict_state = (evinter & -evinter).bit_length() - 1
                    var.last_conflict_event = ev
                    if ev[1] != level:
                        state.num_asserting -= 1
            else:
                analyze_literal(lit, state)
    # materialize the clause and locate the asserting literal; scratch is
    # cleared per variable as it is emitted so that a variable that left the
    # clause and rejoined (hence sits in touched twice) is emitted once
    literals: list[Literal] = []
    asserting: Optional[Literal] = None
    assertion_level = 0
    last_at_level: Optional[Literal] = None
    last_time = -1
    for var in touched:
        if not var.conflict_states:
            var.last_conflict_state = -1
            var.last_conflict_event = None
            continue
        lit = var.literal(var.conflict_states)
        literals.append(lit)
        ev = var.last_conflict_event
        lvl = ev[1]
        if lvl == level:
            asserting = lit
        elif lvl > assertion_level or (lvl == assertion_level and ev[2] > last_time):
            assertion_level = lvl
            last_time = ev[2]
            last_at_level = lit
        var.conflict_states = 0
        var.last_conflict_state = -1
        var.last_conflict_event = None
    assert asserting is not None
    touched.clear()
    state.num_asserting = 0
    return LearnResult(literals, asserting, assertion_level, last_at_level)


def compute_lbd(state: SolverState, result: LearnResult) -> int:
    """Distinct decision levels backing the clause, conflict level included.

    Must run at the conflict level, before backtracking, while the prune
    records behind the clause's literals are still live.
    """
    levels = {state.level}
    for lit in result.literals:
        if lit is result.asserting:
            continue
        levels.add(latest_event(lit.var, lit.states)[1])
    return len(levels)


def minimize(state: SolverState, result: LearnResult) -> LearnResult:
    """One-step self-subsumption over the learned clause.

    A non-asserting literal is dropped when every one of its states was
    pruned by a reason clause whose literals, apart from the one on the
    literal's own variable, have all their states inside the clause's state
    sets.  Dropping such a literal keeps the clause implied: any model
    escaping the shrunken clause would have to satisfy one of those reasons
    through a literal the clause already contains.  Runs at the conflict
    level before backtracking; candidates are checked against the original
    clause, and all that pass are removed together.
    """
    if len(result.literals) == 1:
        return result
    in_clause = {lit.var.index: lit.states for lit in result.literals}
    kept = [result.asserting]
    for lit in result.literals:
        if lit is result.asserting:
            continue
        var = lit.var
        removable = True
        rest = lit.states
        while rest and removable:
            low = rest & -rest
            rest ^= low
            reason = latest_event(var, low)[3]
            if reason is None:
                removable = False
                break
            for other in reason.literals:
                if other.var is var:
                    continue
                if other.states & ~in_clause.get(other.var.index, 0):
                    removable = False
                    break
        if not removable:
            kept.append(lit)
    if len(kept) == len(result.literals):
        return result
    # recompute the jump target over the surviving literals
    assertion_level = 0
    last_at_level: Optional[Literal] = None
    last_time = -1
    for lit in kept:
        if lit is result.asserting:
            continue
        ev = latest_event(lit.var, lit.states)
        lvl = ev[1]
        if lvl > assertion_level or (lvl == assertion_level and ev[2] > last_time):
            assertion_level = lvl
            last_time = ev[2]
            last_at_level = lit
    return LearnResult(kept, result.asserting, assertion_level, last_at_level)
