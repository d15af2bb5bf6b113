"""Decision, scoring, restart and clause-deletion policies.

Scores reward recent conflict involvement: every state folded into a
conflict clause gains the current bump, its variable gains the bump scaled
by the fraction of its domain that was added, and the bump itself grows
geometrically per conflict.  Decisions go to the variable with the highest
score per active state, which favors tight domains, and assert a greedy
slice of its best states.  Restarts fire when recent learned clauses look
bad (high level count) against the long-run average, and the learned
database is halved on a conflict-count schedule.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Optional

from .core import Clause, Variable
from .propagate import SolverState

RESCALE_LIMIT = 1e100
RESCALE_FACTOR = 1e-100

DECISION_RATIO = 0.30
BUMP_SCALE = 1.05
RESTART_WINDOW = 50
RESTART_MARGIN = 0.8
REDUCE_BASE = 2000
REDUCE_STEP = 300


@dataclass
class RestartPolicy:
    """Restart when the recent mean LBD, scaled down, still beats the global mean."""

    margin: float = RESTART_MARGIN
    window: deque = field(default_factory=lambda: deque(maxlen=RESTART_WINDOW))
    total: float = 0.0
    count: int = 0


@dataclass
class ReduceDbPolicy:
    """Trim the learned database at a growing conflict-count schedule."""

    next_at: int = REDUCE_BASE
    interval_base: int = REDUCE_BASE
    interval_step: int = REDUCE_STEP
    reductions_done: int = 0


def update_score(var: Variable, added: int, state: SolverState) -> None:
    """Bump the added states and their variable; rescale everything on overflow."""
    bump = state.bump
    scores = var.state_score
    count = 0
    rest = added
    over = False
    while rest:
        low = rest & -rest
        rest ^= low
        idx = low.bit_length() - 1
        new = scores[idx] + bump
        scores[idx] = new
        if new > RESCALE_LIMIT:
            over = True
        count += 1
    var.score += bump * (count / var.card)
    if over or var.score > RESCALE_LIMIT:
        for v in state.variables:
            v.score *= RESCALE_FACTOR
            v.state_score = [s * RESCALE_FACTOR for s in v.state_score]
        state.bump *= RESCALE_FACTOR


def select_literal(state: SolverState,
                   ratio: float = DECISION_RATIO) -> Optional[tuple[Variable, int]]:
    """Pick the next decision literal, or None when every domain is a singleton.

    The variable maximizes score over active-state count, lowest id on ties.
    Its decision states are taken best-score first (lowest id on ties) while
    the running score sum stays within ``ratio`` of the variable's total
    active score, always leaving at least one active state out.  When every
    active state has score zero only the lowest-id state is taken.
    """
    best_var: Optional[Variable] = None
    best_ratio = -1.0
    for var in state.variables:
        active = var.active
        n = active.bit_count()
        if n < 2:
            continue
        r = var.score / n
        if r > best_ratio:
            best_var = var
            best_ratio = r
    if best_var is None:
        return None
    scores = best_var.state_score
    scored: list[tuple[float, int]] = []
    total = 0.0
    rest = best_var.active
    while rest:
        low = rest & -rest
        rest ^= low
        idx = low.bit_length() - 1
        score = scores[idx]
        scored.append((-score, idx))
        total += score
    if total <= 0.0:
        pick = min(idx for _, idx in scored)
        return best_var, 1 << pick
    scored.sort()
    limit = ratio * total
    chosen = 0
    running = 0.0
    picked = 0
    cap = len(scored) - 1
    for neg_score, idx in scored:
        if running > limit or picked == cap:
            break
        chosen |= 1 << idx
        running += -neg_score
        picked += 1
    return best_var, chosen


def on_conflict(state: SolverState, policy: RestartPolicy, lbd: int) -> bool:
    """Account for one learned clause; True when a restart is due.

    Grows the bump, pushes the clause's LBD into the bounded recent window
    and the running global mean, and signals a restart when the window is
    full and its mean times the margin still exceeds the global mean.  The
    window is cleared when a restart is signalled.
    """
    state.bump *= state.bump_scale
    policy.window.append(lbd)
    policy.total += lbd
    policy.count += 1
    window = policy.window
    if len(window) == window.maxlen:
        if (sum(window) / len(window)) * policy.margin > policy.total / policy.count:
            window.clear()
            return True
    return False


def locked_clauses(state: SolverState) -> set[int]:
    """Ids of clauses currently recorded as the reason of a pruned state."""
    locked: set[int] = set()
    for var in state.variables:
        for ev in var.events:
            reason = ev[3]
            if reason is not None:
                locked.add(id(reason))
    return locked


def is_locked(clause: Clause, state: SolverState) -> bool:
    return id(clause) in locked_clauses(state)


def reduce_db(state: SolverState, policy: ReduceDbPolicy) -> int:
    """Delete the worse half of the learned clauses; returns how many went.

    Learned clauses are ranked by LBD descending with larger clauses first
    on ties; deletion walks that ranking but spares clauses with LBD at most
    2 and clauses locked as some pruned state's reason.  Deleted clauses are
    unhooked from their watched literals, and a literal left watching no
    clause stops watching its state.
    """
    learned = [c for c in state.clauses if c.learned]
    target = len(learned) // 2
    locked = locked_clauses(state)
    ranked = sorted(learned, key=lambda c: (-c.lbd, -c.size(), c.tag))
    doomed: set[int] = set()
    for clause in ranked:
        if len(doomed) == target:
            break
        if clause.lbd <= 2 or id(clause) in locked:
            continue
        doomed.add(id(clause))
        positions = ({clause.watch_a, clause.watch_b})
        for pos in positions:
            lit = clause.literals[pos]
            lit.watchers.remove(clause)
            if not lit.watchers:
                rest = lit.states & lit.var.watched_mask
                while rest:
                    low = rest & -rest
                    rest ^= low
                    watchers = lit.var.state_watchers[low.bit_length() - 1]
                    if lit in watchers:
                        watchers.remove(lit)
                        if not watchers:
                            lit.var.watched_mask ^= low
                        break
    if doomed:
        state.clauses = [c for c in state.clauses if id(c) not in doomed]
    state.stats.deleted += len(doomed)
    policy.reductions_done += 1
    policy.next_at = policy.interval_base + policy.interval_step * policy.reductions_done
    return len(doomed)
