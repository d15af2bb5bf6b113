"""The conflict-driven search loop and the incremental solving interface.

``Solver`` owns one engine state for its lifetime.  Clauses can be added at
any time (the solver drops back to level 0 first), each ``solve`` call may
carry assumptions, and everything learned in one call stays valid for the
next because the clause set only ever grows.  Assumptions are planted as
decisions at levels 1..k in order; whenever a conflict jumps below the
assumption levels the missing ones are replanted before search resumes, and
an assumption found falsified on replanting ends the call with
``UNSAT_UNDER_ASSUMPTIONS`` rather than plain ``UNSAT``.
"""

from __future__ import annotations

from dataclasses import dataclass
from time import monotonic
from types import SimpleNamespace
from typing import Callable, Iterable, Optional, Sequence

from .core import RawClause, RawLiteral, TAUTOLOGY, Variable, evaluate, normalize_clause
from .heuristics import (DECISION_RATIO, BUMP_SCALE, RESTART_MARGIN, ReduceDbPolicy,
                         RestartPolicy, on_conflict, reduce_db, select_literal)
from .learn import LearnResult, compute_lbd, learn_asserting, minimize
from .propagate import (SolverState, Stats, assert_literal, backtrack_to, checkpoint,
                        decide, init_state, install_clause, open_level, reseat)

try:
    from . import _engine
except ImportError:                      # extension not built; pure engine only
    _engine = None

SAT = "SAT"
UNSAT = "UNSAT"
UNSAT_UNDER_ASSUMPTIONS = "UNSAT_UNDER_ASSUMPTIONS"

_PURE = SimpleNamespace(
    init_state=init_state,
    install_clause=install_clause,
    assert_literal=assert_literal,
    decide=decide,
    open_level=open_level,
    backtrack_to=backtrack_to,
    reseat=reseat,
    checkpoint=checkpoint,
    select_literal=select_literal,
    learn_asserting=learn_asserting,
    compute_lbd=compute_lbd,
)


def _pick_engine(cards: Sequence[int], engine: Optional[str]):
    """Choose the compiled kernel when possible, the pure engine otherwise.

    The two engines expose the same primitives and behave identically; the
    compiled one requires every variable to fit a 64-bit state mask.
    """
    if engine == "pure":
        return _PURE
    if engine == "fast":
        if _engine is None:
            raise ValueError("compiled engine is not available")
        if cards and max(cards) > 64:
            raise ValueError("compiled engine supports at most 64 states per variable")
        return _engine
    if engine is not None:
        raise ValueError(f"unknown engine {engine!r}")
    if _engine is not None and (not cards or max(cards) <= 64):
        return _engine
    return _PURE


class SolveTimeout(Exception):
    """Raised when a solve call exceeds its wall-clock budget."""


@dataclass
class SolveResult:
    status: str
    model: Optional[list[int]]
    stats: Stats


class Solver:
    """Incremental solver over variables given by their cardinalities."""

    def __init__(self, cards: Sequence[int], clauses: Iterable[RawClause] = (), *,
                 ratio: float = DECISION_RATIO,
                 bump_scale: float = BUMP_SCALE,
                 restart_margin: float = RESTART_MARGIN,
                 enable_restarts: bool = True,
                 enable_reduce: bool = True,
                 minimize_learned: bool = False,
                 verify_models: bool = False,
                 learn_hook: Optional[Callable[[SolverState, LearnResult, int], None]] = None,
                 engine: Optional[str] = None):
        self.cards = list(cards)
        self._eng = _pick_engine(self.cards, engine)
        normalized: list[RawClause] = []
        for clause in clauses:
            norm = normalize_clause(clause, self.cards)
            if norm is TAUTOLOGY:
                continue
            normalized.append(norm)
        self.state = self._eng.init_state([(i, c) for i, c in enumerate(self.cards)],
                                          normalized, bump_scale=bump_scale)
        self.ratio = ratio
        self.enable_restarts = enable_restarts
        self.enable_reduce = enable_reduce
        self.minimize_learned = minimize_learned
        self.verify_models = verify_models
        self.learn_hook = learn_hook
        self.restart_policy = RestartPolicy(margin=restart_margin)
        self.reduce_policy = ReduceDbPolicy()
        self._raw_clauses = normalized
        self._unit_pos = 0
        self._status: Optional[str] = None
        self._model: Optional[list[int]] = None

    @classmethod
    def from_document(cls, doc, **kwargs) -> "Solver":
        """Build a solver from a parsed DCNF document."""
        return cls(doc.cards, doc.clauses, **kwargs)

    # ------------------------------------------------------------------
    # incremental interface

    def add_clause(self, clause: Iterable[RawLiteral]) -> None:
        """Install one more clause; the solver first returns to level 0.

        Tautologies are dropped.  An empty clause, a clause falsified by the
        permanent level-0 state, or a unit whose assertion fails latches the
        solver unsatisfiable for good.  A clause with exactly one
        non-falsified literal at level 0 acts as that unit.
        """
        state = self.state
        self._status = None
        self._model = None
        self._eng.backtrack_to(state, 0)
        norm = normalize_clause(clause, self.cards)
        if norm is TAUTOLOGY:
            return
        self._raw_clauses.append(norm)
        if not norm:
            state.latched_unsat = True
            return
        if state.latched_unsat:
            return
        if not self._flush_units():
            return
        lits = [state.variables[var].literal(states) for var, states in norm]
        if len(lits) == 1:
            self._assert_unit_now(lits[0])
            return
        alive = [pos for pos, lit in enumerate(lits) if lit.states & lit.var.active]
        if not alive:
            state.latched_unsat = True
            return
        if len(alive) == 1:
            lit = lits[alive[0]]
            if lit.var.active & ~lit.states:
                # effectively unit under the permanent level-0 prunes
                self._assert_unit_now(lit)
                return
            watch_a, watch_b = alive[0], (alive[0] + 1) % len(lits)
        else:
            watch_a, watch_b = alive[0], alive[1]
        self._eng.install_clause(state, lits, watch_a, watch_b, learned=False)

    def _assert_unit_now(self, lit) -> None:
        state = self.state
        eng = self._eng
        eng.reseat(state)
        act = lit.var.active & lit.states
        if act != lit.var.active:
            if not act or not eng.assert_literal(state, lit.var, lit.states, None):
                state.latched_unsat = True
        eng.checkpoint(state)

    def _flush_units(self) -> bool:
        """Assert input units queued since the last flush; False on conflict."""
        state = self.state
        eng = self._eng
        eng.reseat(state)
        units = state.unit_literals
        ok = True
        while self._unit_pos < len(units):
            lit = units[self._unit_pos]
            self._unit_pos += 1
            act = lit.var.active & lit.states
            if act == lit.var.active:
                continue
            if not act or not eng.assert_literal(state, lit.var, lit.states, None):
                state.latched_unsat = True
                ok = False
                break
        eng.checkpoint(state)
        return ok

    # ------------------------------------------------------------------
    # solving

    def solve(self, *, timeout_s: Optional[float] = None) -> SolveResult:
        return self.solve_assuming((), timeout_s=timeout_s)

    def solve_assuming(self, assumptions: Iterable[RawLiteral], *,
                       timeout_s: Optional[float] = None) -> SolveResult:
        """Search under assumptions planted as the first decisions.

        Assumption literals are validated against the variable domains.  An
        assumption already implied when its turn comes takes an empty level
        so assumption i always sits at level i + 1; one found falsified ends
        the call with ``UNSAT_UNDER_ASSUMPTIONS``.
        """
        state = self.state
        planted: list[tuple[Variable, int]] = []
        for var, states in assumptions:
            if not 0 <= var < len(self.cards):
                raise ValueError(f"unknown variable {var}")
            if states <= 0 or states >= state.variables[var].full:
                raise ValueError("assumption states must be a nonempty proper subset")
            planted.append((state.variables[var], states))
        deadline = None if timeout_s is None else monotonic() + timeout_s
        self._status = None
        self._model = None
        self._eng.backtrack_to(state, 0)
        if state.latched_unsat or not self._flush_units():
            return self._finish(UNSAT)
        return self._search(planted, deadline)

    def _search(self, planted: list[tuple[Variable, int]],
                deadline: Optional[float]) -> SolveResult:
        state = self.state
        eng = self._eng
        nassume = len(planted)
        while True:
            if deadline is not None and monotonic() >= deadline:
                raise SolveTimeout()
            if state.level < nassume:
                var, states = planted[state.level]
                act = var.active & states
                if act == var.active:
                    eng.open_level(state)
                    continue
                if not act:
                    return self._finish(UNSAT_UNDER_ASSUMPTIONS)
                ok = eng.decide(state, var, act)
            else:
                pick = eng.select_literal(state, self.ratio)
                if pick is None:
                    model = [v.active.bit_length() - 1 for v in state.variables]
                    if self.verify_models and not evaluate(self._raw_clauses, model):
                        raise AssertionError("model fails the clause set")
                    return self._finish(SAT, model)
                ok = eng.decide(state, pick[0], pick[1])
            want_restart = False
            while not ok:
                if deadline is not None and monotonic() >= deadline:
                    raise SolveTimeout()
                state.stats.conflicts += 1
                conflict = state.conflict
                state.conflict = None
                result = eng.learn_asserting(state, conflict)
                if self.minimize_learned:
                    result = minimize(state, result)
                lbd = eng.compute_lbd(state, result)
                if self.learn_hook is not None:
                    self.learn_hook(state, result, lbd)
                if on_conflict(state, self.restart_policy, lbd):
                    want_restart = True
                eng.backtrack_to(state, result.assertion_level)
                ok = self._add_learned(result, lbd)
                state.stats.learned += 1
                if not ok and result.assertion_level == 0:
                    state.latched_unsat = True
                    return self._finish(UNSAT)
            if want_restart and self.enable_restarts:
                eng.backtrack_to(state, 0)
                state.stats.restarts += 1
            if self.enable_reduce and state.stats.conflicts >= self.reduce_policy.next_at:
                reduce_db(state, self.reduce_policy)

    def _add_learned(self, result: LearnResult, lbd: int) -> bool:
        """Install the learned clause at the assertion level and assert it."""
        state = self.state
        eng = self._eng
        eng.reseat(state)
        lits = result.literals
        asserting = result.asserting
        if len(lits) == 1:
            ok = eng.assert_literal(state, asserting.var, asserting.states, None)
        else:
            watch_a = lits.index(asserting)
            watch_b = lits.index(result.last_at_level)
            clause = eng.install_clause(state, lits, watch_a, watch_b,
                                        learned=True, lbd=lbd)
            ok = eng.assert_literal(state, asserting.var, asserting.states, clause)
        eng.checkpoint(state)
        return ok

    def _finish(self, status: str, model: Optional[list[int]] = None) -> SolveResult:
        self._status = status
        self._model = model
        return SolveResult(status, None if model is None else list(model),
                           self.state.stats.copy())

    # ------------------------------------------------------------------
    # model access

    def get_value(self, var: int) -> int:
        """State of ``var`` in the model of the last solve; requires SAT."""
        if self._status != SAT or self._model is None:
            raise ValueError("no model available: last solve did not return SAT")
        if not 0 <= var < len(self._model):
            raise ValueError(f"unknown variable {var}")
        return self._model[var]

    def reset(self) -> None:
        """Return to level 0; clauses, scores and learned state survive."""
        self._eng.backtrack_to(self.state, 0)
