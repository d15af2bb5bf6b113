"""Building blocks for CNFs over finite-domain variables.

A variable with cardinality ``k`` ranges over states ``0 .. k-1``.  A set of
states is an int bitmask with bit ``i`` standing for state ``i``; Python ints
give word-parallel set operations at any cardinality.  A literal pins one
variable to a nonempty proper subset of its states, a clause is a disjunction
of literals over distinct variables, and a world maps every variable to a
single state.

Two layers live here:

* plain values: a raw literal is a ``(var, states)`` pair and a raw clause is
  a list of such pairs.  ``complement``, ``resolve``, ``clause_size``,
  ``evaluate`` and ``normalize_clause`` work on these.
* interned engine objects: ``Variable``, ``Literal`` and ``Clause``, shared
  by the propagation, learning and heuristic code.

Variables and states are 0-based throughout the library; the text formats in
:mod:`dsat.formats` are 1-based.
"""

from __future__ import annotations

from typing import Iterable, Iterator, Optional, Sequence

RawLiteral = tuple[int, int]
RawClause = list[RawLiteral]
World = Sequence[int]

# normalize_clause and resolve return this for clauses that are always true
TAUTOLOGY = None


def full_set(card: int) -> int:
    """Bitmask with all ``card`` states present."""
    return (1 << card) - 1


def iter_states(mask: int) -> Iterator[int]:
    """Yield the state ids present in ``mask``, lowest first."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def state_count(mask: int) -> int:
    return mask.bit_count()


def complement(lit: RawLiteral, card: int) -> RawLiteral:
    """Complement a literal's state set within its variable's domain.

    Complementing twice returns the original literal.  Raises ValueError if
    the state set is empty or covers the whole domain, since the complement
    would not be a literal.
    """
    var, states = lit
    full = full_set(card)
    if states <= 0 or states >= full:
        raise ValueError("literal states must be a nonempty proper subset")
    return (var, full ^ states)


def clause_size(clause: Iterable[RawLiteral]) -> int:
    """Total number of states across the clause's literals."""
    return sum(states.bit_count() for _, states in clause)


def normalize_clause(clause: Iterable[RawLiteral], cards: Sequence[int]) -> Optional[RawClause]:
    """Merge duplicate variables by union and validate every literal.

    Returns the merged clause sorted by variable id, the empty list for an
    empty clause, or ``TAUTOLOGY`` (None) when some merged literal covers its
    variable's full domain.  Raises ValueError for an unknown variable, an
    empty state set, or a state outside the domain.
    """
    merged: dict[int, int] = {}
    for var, states in clause:
        if not 0 <= var < len(cards):
            raise ValueError(f"unknown variable {var}")
        if states == 0:
            raise ValueError(f"literal on variable {var} has an empty state set")
        if states & ~full_set(cards[var]):
            raise ValueError(f"literal on variable {var} has states outside the domain")
        merged[var] = merged.get(var, 0) | states
    out: RawClause = []
    for var in sorted(merged):
        states = merged[var]
        if states == full_set(cards[var]):
            return TAUTOLOGY
        out.append((var, states))
    return out


def resolve(a: Sequence[RawLiteral], b: Sequence[RawLiteral], var: int,
            cards: Sequence[int]) -> Optional[RawClause]:
    """Resolve two clauses on ``var``.

    Both clauses must contain a literal on ``var`` and neither of those
    literals may contain the other; ValueError otherwise.  The resolvent
    keeps the intersection of the two ``var`` state sets (dropped when
    empty) and merges every other literal per variable by union.  Returns
    ``TAUTOLOGY`` (None) when a merged literal covers its full domain.
    """
    sa = sb = -1
    rest: dict[int, int] = {}
    for v, states in a:
        if v == var:
            sa = states
        else:
            rest[v] = rest.get(v, 0) | states
    for v, states in b:
        if v == var:
            sb = states
        else:
            rest[v] = rest.get(v, 0) | states
    if sa < 0 or sb < 0:
        raise ValueError("both clauses must mention the resolution variable")
    if sa & sb == sa or sa & sb == sb:
        raise ValueError("one literal on the resolution variable entails the other")
    inter = sa & sb
    if inter:
        rest[var] = rest.get(var, 0) | inter
    out: RawClause = []
    for v in sorted(rest):
        states = rest[v]
        if states == full_set(cards[v]):
            return TAUTOLOGY
        out.append((v, states))
    return out


def evaluate(clauses: Iterable[Iterable[RawLiteral]], world: Sequence) -> bool:
    """Evaluate a CNF under a world (one state id per variable).

    Raises ValueError when the world is missing an assignment for a
    mentioned variable.
    """
    for clause in clauses:
        sat = False
        for var, states in clause:
            if var >= len(world) or world[var] is None:
                raise ValueError(f"world assigns no state to variable {var}")
            if (1 << world[var]) & states:
                sat = True
                break
        if not sat:
            return False
    return True


class Variable:
    """A finite-domain variable and its live solver state.

    ``active`` is the bitmask of not-yet-pruned states; ``level_stack`` holds
    the strictly increasing decision levels at which this variable lost
    states (level 0 prunes are permanent and never pushed).

    ``events`` records the variable's live prunes, newest last, as tuples
    ``(states, level, time, reason)``: the states pruned together by one
    assertion, the decision level and within-level clock of that prune, and
    the clause that forced it (None for decisions and root assertions).  The
    stack is ordered by (level, time), every pruned state sits in exactly one
    event, and backtracking pops the undone levels' events.

    ``state_watchers`` holds the literals watching each state in insertion
    order; ``watched_mask`` keeps the states with a nonempty watcher list so
    propagation can skip the rest.  ``state_score`` is per-state activity.

    ``conflict_states``/``last_conflict_state``/``last_conflict_event`` are
    scratch used only during conflict analysis and are empty between
    analyses.
    """

    __slots__ = ("index", "card", "full", "active", "level_stack", "score",
                 "conflict_states", "last_conflict_state", "last_conflict_event",
                 "events", "watched_mask", "state_watchers", "state_score",
                 "_literals")

    def __init__(self, index: int, card: int) -> None:
        if card < 2:
            raise ValueError(f"variable {index} needs cardinality >= 2, got {card}")
        self.index = index
        self.card = card
        self.full = (1 << card) - 1
        self.active = self.full
        self.level_stack: list[int] = []
        self.score = 0.0
        self.conflict_states = 0
        self.last_conflict_state = -1
        self.last_conflict_event: Optional[tuple[int, int, int, Optional[Clause]]] = None
        self.events: list[tuple[int, int, int, Optional[Clause]]] = []
        self.watched_mask = 0
        self.state_watchers: list[list[Literal]] = [[] for _ in range(card)]
        self.state_score = [0.0] * card
        self._literals: dict[int, Literal] = {}

    def literal(self, states: int) -> "Literal":
        """Intern the literal with this state set, creating it on first use."""
        lit = self._literals.get(states)
        if lit is None:
            if states <= 0 or states >= self.full:
                raise ValueError("literal states must be a nonempty proper subset")
            lit = Literal(self, states)
            self._literals[states] = lit
        return lit

    def __repr__(self) -> str:
        return f"Variable({self.index}, card={self.card})"


class Literal:
    """Interned literal: one object per (variable, state set) pair.

    ``watchers`` lists the clauses watching this literal in insertion order.
    Literal objects are compared by identity, which is what interning makes
    sound.
    """

    __slots__ = ("var", "states", "watchers")

    def __init__(self, var: Variable, states: int) -> None:
        self.var = var
        self.states = states
        self.watchers: list[Clause] = []

    def __repr__(self) -> str:
        return f"Literal(x{self.var.index}:{bin(self.states)})"


class Clause:
    """A disjunction of interned literals over distinct variables.

    ``watch_a``/``watch_b`` are the two watched positions in ``literals``.
    ``tag`` is a creation sequence number used only as a deterministic sort
    tiebreak when trimming the learned-clause database.
    """

    __slots__ = ("literals", "watch_a", "watch_b", "learned", "lbd", "tag")

    def __init__(self, literals: list[Literal], learned: bool = False, lbd: int = 0,
                 tag: int = 0) -> None:
        self.literals = literals
        self.watch_a = 0
        self.watch_b = 1 if len(literals) > 1 else 0
        self.learned = learned
        self.lbd = lbd
        self.tag = tag

    def size(self) -> int:
        return sum(lit.states.bit_count() for lit in self.literals)

    def raw(self) -> RawClause:
        return [(lit.var.index, lit.states) for lit in self.literals]

    def __repr__(self) -> str:
        kind = "learned" if self.learned else "input"
        return f"Clause({kind}, {self.raw()})"
