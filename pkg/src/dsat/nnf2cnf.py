"""Compile an NNF circuit into an equivalent CNF, filtering redundant clauses.

Nodes compile bottom-up, one CNF per node, cached by node id so shared
sub-circuits compile once.  TRUE gives the empty CNF, FALSE the CNF holding
the empty clause, a literal node a unit clause.  An AND node inserts its
children's clauses in order; an OR node inserts the per-variable union of
every tuple from the Cartesian product of its children's clauses (children
left to right, clauses in index order), dropping tautologies.

Insertion keeps the node's CNF free of entailed clauses: a node-local
incremental solver holds the clauses kept so far, and a candidate is kept
only when the solver still finds a model under the complements of the
candidate's literals.  Kept clauses join the solver, so later candidates are
checked against everything before them.
"""

from __future__ import annotations

from itertools import product
from typing import Optional, Sequence

from .core import RawClause, full_set
from .formats import DcnfDocument, NnfDocument
from .solver import SAT, Solver

CLAUSE_CAP = 10 ** 6


class CompileLimitError(RuntimeError):
    """The intermediate clause count blew past the configured cap."""


def evaluate_nnf(doc: NnfDocument, world: Sequence[int]) -> bool:
    """Evaluate the circuit under a world, bottom-up."""
    values: list[bool] = []
    for node in doc.nodes:
        if node.kind == "T":
            values.append(True)
        elif node.kind == "F":
            values.append(False)
        elif node.kind == "L":
            values.append(bool((1 << world[node.var]) & node.states))
        elif node.kind == "A":
            values.append(all(values[child] for child in node.children))
        else:
            values.append(any(values[child] for child in node.children))
    return values[-1]


class _Inserter:
    """Node-local CNF accumulator with entailment filtering."""

    def __init__(self, cards: Sequence[int], cap: int) -> None:
        self.cards = cards
        self.cap = cap
        self.solver = Solver(cards)
        self.kept: list[RawClause] = []
        self.steps = 0

    def bump(self) -> None:
        self.steps += 1
        if self.steps > self.cap:
            raise CompileLimitError(f"clause work exceeded the cap of {self.cap}")

    def insert(self, clause: RawClause) -> None:
        self.bump()
        if not clause:
            result = self.solver.solve()
            if result.status == SAT:
                self.solver.add_clause([])
                self.kept.append([])
            return
        assumptions = [(var, full_set(self.cards[var]) ^ states)
                       for var, states in clause]
        result = self.solver.solve_assuming(assumptions)
        if result.status == SAT:
            self.solver.add_clause(clause)
            self.kept.append(clause)
            if len(self.kept) > self.cap:
                raise CompileLimitError(f"clause count exceeded the cap of {self.cap}")


def _merge_tuple(parts) -> Optional[list[tuple[int, int]]]:
    merged: dict[int, int] = {}
    for clause in parts:
        for var, states in clause:
            merged[var] = merged.get(var, 0) | states
    return [(var, merged[var]) for var in sorted(merged)]


def compile_nnf(doc: NnfDocument, cap: int = CLAUSE_CAP) -> DcnfDocument:
    """Compile the circuit's root into a DCNF document over the same variables."""
    cards = doc.cards
    full = [full_set(card) for card in cards]
    cache: list[list[RawClause]] = []
    for node in doc.nodes:
        if node.kind == "T":
            cache.append([])
        elif node.kind == "F":
            cache.append([[]])
        elif node.kind == "L":
            cache.append([[(node.var, node.states)]])
        elif node.kind == "A":
            inserter = _Inserter(cards, cap)
            for child in node.children:
                for clause in cache[child]:
                    inserter.insert(clause)
            cache.append(inserter.kept)
        else:
            inserter = _Inserter(cards, cap)
            for parts in product(*(cache[child] for child in node.children)):
                inserter.bump()
                merged = _merge_tuple(parts)
                if any(states == full[var] for var, states in merged):
                    continue
                inserter.insert(merged)
            cache.append(inserter.kept)
    return DcnfDocument(list(cards), cache[-1])
