"""Unit propagation over finite-domain clauses with constant-time backtracking.

Pruning a state is the only event the engine reacts to.  Each clause watches
two of its literals and each watched literal watches exactly one of its
states, so a clause is revisited only when a watched literal might have just
become falsified.  Instead of a trail of individual prunes, every variable
snapshots its whole active set the first time it loses states at a decision
level; undoing the level restores those snapshots and pops one entry per
touched variable.  Level 0 prunes take no snapshot and are permanent.

Each assertion that prunes something appends one event (states, level,
per-level clock tick, reason clause) to the variable's event stack; the
reason is None for decisions and level-0 assertions.  The stack is ordered
by (level, time), so the newest prune among a set of states is the first
event from the top that touches the set.  Conflict analysis replays these
events; backtracking pops the undone levels' events.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .core import Clause, Literal, RawClause, Variable


@dataclass
class Stats:
    decisions: int = 0
    conflicts: int = 0
    propagations: int = 0
    learned: int = 0
    restarts: int = 0
    deleted: int = 0

    def copy(self) -> "Stats":
        return Stats(self.decisions, self.conflicts, self.propagations,
                     self.learned, self.restarts, self.deleted)


@dataclass
class SolverState:
    """Everything one solver instance mutates.

    ``prune_time`` and ``level_saves`` always describe the deepest level;
    ``time_stack``/``save_stack`` hold one checkpoint per level from 0 up, so
    both have ``level + 1`` entries whenever the engine is at rest.
    ``level_saves`` aliases ``save_stack[-1]`` between decisions, which is
    what lets an assertion at an already-built level extend that level's
    snapshot list in place.
    """

    variables: list[Variable]
    level: int = 0
    prune_time: int = 0
    level_saves: list[tuple[Variable, int]] = field(default_factory=list)
    time_stack: list[int] = field(default_factory=lambda: [0])
    save_stack: list[list[tuple[Variable, int]]] = field(default_factory=lambda: [[]])
    conflict: Optional[Clause] = None
    num_asserting: int = 0
    unit_literals: list[Literal] = field(default_factory=list)
    clauses: list[Clause] = field(default_factory=list)
    bump: float = 1.0
    bump_scale: float = 1.05
    latched_unsat: bool = False
    stats: Stats = field(default_factory=Stats)
    clause_tags: int = 0
    touched_vars: list[Variable] = field(default_factory=list)

    def next_tag(self) -> int:
        self.clause_tags += 1
        return self.clause_tags


def init_state(variables: Sequence[tuple[int, int]],
               clauses: Iterable[RawClause],
               bump_scale: float = 1.05) -> SolverState:
    """Build a fresh solver state from (id, cardinality) pairs and clauses.

    Clauses must already be normalized (distinct variables, nonempty proper
    state sets).  Unit clauses are queued for level-0 assertion rather than
    installed; an empty clause latches the state unsatisfiable.
    """
    vars_out: list[Variable] = []
    for pos, (index, card) in enumerate(variables):
        if index != pos:
            raise ValueError("variable ids must be 0..n-1 in order")
        vars_out.append(Variable(index, card))
    state = SolverState(vars_out, bump_scale=bump_scale)
    for raw in clauses:
        raw = list(raw)
        if not raw:
            state.latched_unsat = True
            continue
        lits = [vars_out[var].literal(states) for var, states in raw]
        if len(lits) == 1:
            state.unit_literals.append(lits[0])
        else:
            install_clause(state, lits, 0, 1, learned=False)
    return state


def install_clause(state: SolverState, lits: list[Literal], watch_a: int, watch_b: int,
                   learned: bool = False, lbd: int = 0) -> Clause:
    """Create a clause watching two positions and hook up state watches.

    A literal that was not watched by any clause starts watching one of its
    own states: its most significant active state, or, when the literal is
    currently falsified, the state of its pruned last.  The latter keeps the
    rule that a falsified watched literal's watched state becomes active
    again exactly when the literal stops being falsified.
    """
    clause = Clause(lits, learned=learned, lbd=lbd, tag=state.next_tag())
    clause.watch_a = watch_a
    clause.watch_b = watch_b
    positions = (watch_a,) if watch_a == watch_b else (watch_a, watch_b)
    for pos in positions:
        lit = lits[pos]
        if not lit.watchers:
            act = lit.states & lit.var.active
            if act:
                idx = act.bit_length() - 1
            else:
                idx = last_pruned_state(lit.var, lit.states)
            slist = lit.var.state_watchers[idx]
            if not slist:
                lit.var.watched_mask |= 1 << idx
            slist.append(lit)
        lit.watchers.append(clause)
    state.clauses.append(clause)
    return clause


def implied(lit: Literal) -> bool:
    """Every active state of the variable is in the literal."""
    return lit.var.active & ~lit.states == 0


def falsified(lit: Literal) -> bool:
    """No active state of the variable is in the literal."""
    return lit.var.active & lit.states == 0


def active_state(lit: Literal) -> int:
    """Most significant active state inside the literal."""
    act = lit.states & lit.var.active
    if not act:
        raise ValueError("literal has no active state")
    return act.bit_length() - 1


def latest_event(var: Variable, states: int) -> tuple[int, int, int, Optional[Clause]]:
    """Newest prune event touching any of ``states`` (all pruned).

    Because the event stack is ordered by (level, time) and every pruned
    state sits in exactly one live event, the first hit from the top is the
    newest.
    """
    if not states:
        raise ValueError("empty state set")
    for ev in reversed(var.events):
        if ev[0] & states:
            return ev
    raise ValueError("no pruned state among the given states")


def last_pruned_state(var: Variable, states: int) -> int:
    """Among ``states`` (all pruned), the one pruned last (lowest id on ties)."""
    ev = latest_event(var, states)
    inter = ev[0] & states
    return (inter & -inter).bit_length() - 1


def reseat(state: SolverState) -> None:
    """Point the working clock and snapshot list at the current level's."""
    state.prune_time = state.time_stack[-1]
    state.level_saves = state.save_stack[-1]


def checkpoint(state: SolverState) -> None:
    """Store the working clock back into the current level's checkpoint."""
    state.time_stack[-1] = state.prune_time


def assert_literal(state: SolverState, var: Variable, states: int,
                   reason: Optional[Clause]) -> bool:
    """Prune the variable's active states down to ``states`` and propagate.

    The caller guarantees the asserted literal is neither implied nor
    falsified.  Returns False and stores the conflicting clause in
    ``state.conflict`` when propagation finds a clause with every literal
    falsified; returns True at fixpoint otherwise.
    """
    queue = deque()
    pop = queue.popleft
    push = queue.append
    push((var, states, reason))
    level = state.level
    saves = state.level_saves
    clock = state.prune_time
    props = 0
    while queue:
        var, mask, reason = pop()
        active = var.active
        pruned = active & ~mask
        ptime = clock
        clock += 1
        if not pruned:
            continue
        var.events.append((pruned, level, ptime, reason))
        if level:
            lstack = var.level_stack
            if not lstack or lstack[-1] != level:
                lstack.append(level)
                saves.append((var, active))
        var.active = new_active = active & mask
        rest = pruned & var.watched_mask
        if not rest:
            continue
        all_watchers = var.state_watchers
        while rest:
            low = rest & -rest
            rest ^= low
            watchers = all_watchers[low.bit_length() - 1]
            # compact in place: literals that move their watch or end up
            # watching no clause drop out of this state's list
            nlits = len(watchers)
            li = 0
            keep_lit = 0
            while li < nlits:
                lit = watchers[li]
                li += 1
                lit_active = lit.states & new_active
                if lit_active:
                    # literal still has an active state: move its watch there
                    tgt = lit_active.bit_length() - 1
                    target = all_watchers[tgt]
                    if not target:
                        var.watched_mask |= 1 << tgt
                    target.append(lit)
                    continue
                # watched literal just became falsified: revisit its clauses
                clause_watchers = lit.watchers
                ncl = len(clause_watchers)
                ci = 0
                keep_cl = 0
                conflict = None
                while ci < ncl:
                    clause = clause_watchers[ci]
                    ci += 1
                    lits = clause.literals
                    pos_a = clause.watch_a
                    if lits[pos_a] is lit:
                        other = lits[clause.watch_b]
                        moved_is_b = False
                    else:
                        other = lits[pos_a]
                        moved_is_b = True
                    replacement = None
                    rpos = 0
                    for pos, cand in enumerate(lits):
                        if cand is other or cand is lit:
                            continue
                        if cand.states & cand.var.active:
                            replacement = cand
                            rpos = pos
                            break
                    if replacement is not None:
                        rw = replacement.watchers
                        if not rw:
                            rvar = replacement.var
                            ract = replacement.states & rvar.active
                            ridx = ract.bit_length() - 1
                            rlist = rvar.state_watchers[ridx]
                            if not rlist:
                                rvar.watched_mask |= 1 << ridx
                            rlist.append(replacement)
                        rw.append(clause)
                        if moved_is_b:
                            clause.watch_b = rpos
                        else:
                            clause.watch_a = rpos
                        continue        # clause leaves this literal's list
                    clause_watchers[keep_cl] = clause
                    keep_cl += 1
                    other_active = other.var.active
                    other_states = other.states & other_active
                    if other_states == other_active:
                        continue        # clause satisfied through the other watch
                    if not other_states:
                        conflict = clause
                        break
                    props += 1
                    push((other.var, other.states, clause))
                if conflict is not None:
                    while ci < ncl:     # keep the clauses not yet visited
                        clause_watchers[keep_cl] = clause_watchers[ci]
                        keep_cl += 1
                        ci += 1
                    del clause_watchers[keep_cl:]
                    watchers[keep_lit] = lit
                    keep_lit += 1
                    while li < nlits:   # and the literals not yet visited
                        watchers[keep_lit] = watchers[li]
                        keep_lit += 1
                        li += 1
                    del watchers[keep_lit:]
                    state.conflict = conflict
                    state.prune_time = clock
                    state.stats.propagations += props
                    return False
                del clause_watchers[keep_cl:]
                if clause_watchers:
                    watchers[keep_lit] = lit
                    keep_lit += 1
            del watchers[keep_lit:]
            if not watchers:
                var.watched_mask &= ~low
    state.prune_time = clock
    state.stats.propagations += props
    return True


def decide(state: SolverState, var: Variable, states: int) -> bool:
    """Open a new decision level and assert the literal with no reason."""
    state.level += 1
    state.prune_time = 0
    state.level_saves = []
    state.stats.decisions += 1
    ok = assert_literal(state, var, states, None)
    state.time_stack.append(state.prune_time)
    state.save_stack.append(state.level_saves)
    return ok


def open_level(state: SolverState) -> None:
    """Open an empty decision level (used for already-implied assumptions)."""
    state.level += 1
    state.prune_time = 0
    state.level_saves = []
    state.time_stack.append(0)
    state.save_stack.append(state.level_saves)


def undecide(state: SolverState) -> None:
    """Undo the deepest decision level by restoring variable snapshots."""
    if state.level == 0:
        raise ValueError("cannot undo level 0")
    lvl = state.level
    state.time_stack.pop()
    for var, saved in state.save_stack.pop():
        var.active = saved
        var.level_stack.pop()
        events = var.events
        while events and events[-1][1] == lvl:
            events.pop()
    state.level = lvl - 1
    reseat(state)


def backtrack_to(state: SolverState, target: int) -> None:
    while state.level > target:
        undecide(state)
