"""Slow reference procedures the solver is tested against.

Everything here favors obviousness over speed: satisfiability by full world
enumeration, unit-rule closure by repeated clause scans, and clause
implication by enumeration.  Inputs are cardinality lists plus raw clauses
as produced by :func:`dsat.core.normalize_clause` or parsed documents.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .core import RawClause, RawLiteral, full_set

# refuse enumerations beyond this many worlds
WORLD_LIMIT = 10 ** 7


@dataclass
class BruteForceResult:
    status: str                       # "SAT" or "UNSAT"
    model_count: int
    witness: Optional[list[int]]      # first satisfying world in lexicographic order


@dataclass
class ClosureResult:
    active: list[int]                 # per-variable bitmask of surviving states
    contradiction: bool


def _world_count(cards: Sequence[int]) -> int:
    total = 1
    for card in cards:
        total *= card
    return total


def brute_force(cards: Sequence[int], clauses: Iterable[RawClause]) -> BruteForceResult:
    """Enumerate every world and count the satisfying ones.

    Raises ValueError when the world count exceeds ``WORLD_LIMIT``.
    """
    if _world_count(cards) > WORLD_LIMIT:
        raise ValueError("world count exceeds enumeration limit")
    clause_list = [list(clause) for clause in clauses]
    count = 0
    witness: Optional[list[int]] = None
    for world in itertools.product(*[range(card) for card in cards]):
        ok = True
        for clause in clause_list:
            sat = False
            for var, states in clause:
                if (1 << world[var]) & states:
                    sat = True
                    break
            if not sat:
                ok = False
                break
        if ok:
            count += 1
            if witness is None:
                witness = list(world)
    status = "SAT" if count else "UNSAT"
    return BruteForceResult(status, count, witness)


def ur_closure(cards: Sequence[int], clauses: Iterable[RawClause],
               decisions: Iterable[RawLiteral] = ()) -> ClosureResult:
    """Unit-rule fixpoint by naive repeated scans.

    Starts from full domains intersected with the decision literals.  A
    clause whose literals all have empty intersection with the active sets
    signals a contradiction; a clause with exactly one nonempty intersection
    that is a proper subset of its variable's active set prunes that
    variable.  Scans repeat until nothing changes.
    """
    active = [full_set(card) for card in cards]
    for var, states in decisions:
        active[var] &= states
    if any(a == 0 for a in active):
        return ClosureResult(active, True)
    clause_list = [list(clause) for clause in clauses]
    changed = True
    while changed:
        changed = False
        for clause in clause_list:
            surviving: Optional[tuple[int, int]] = None
            count = 0
            for var, states in clause:
                inter = states & active[var]
                if inter:
                    count += 1
                    if count > 1:
                        break
                    surviving = (var, inter)
            if count == 0:
                return ClosureResult(active, True)
            if count == 1 and surviving is not None:
                var, inter = surviving
                if inter != active[var]:
                    active[var] = inter
                    changed = True
    return ClosureResult(active, False)


def check_implied(cards: Sequence[int], clauses: Iterable[RawClause],
                  clause: RawClause) -> bool:
    """True iff every world satisfying the CNF also satisfies ``clause``.

    Checked by enumerating worlds of the CNF conjoined with the complement
    of each of the clause's literals.  Raises ValueError past the world
    limit.
    """
    if _world_count(cards) > WORLD_LIMIT:
        raise ValueError("world count exceeds enumeration limit")
    clause_list = [list(c) for c in clauses]
    blocked = [(var, states) for var, states in clause]
    for world in itertools.product(*[range(card) for card in cards]):
        inside = False
        for var, states in blocked:
            if (1 << world[var]) & states:
                inside = True
                break
        if inside:
            continue
        ok = True
        for cl in clause_list:
            sat = False
            for var, states in cl:
                if (1 << world[var]) & states:
                    sat = True
                    break
            if not sat:
                ok = False
                break
        if ok:
            return False
    return True
