"""Text formats: the DCNF clause format, an NNF circuit format, binarization
to plain Boolean CNF, and the result lines the command line prints.

DCNF is line oriented and 1-based::

    c anything after a lowercase c is a comment
    p dcnf <vars> <clauses>
    d <card_1> ... <card_vars>
    1:1,3 2:1,2 0

Each clause is a run of ``var:state,state,...`` tokens ending at a lone
``0``; tokens may spill across lines.  The writer emits the canonical form
(duplicate variables merged, literals sorted by variable, states ascending,
one clause per line), so writing after parsing canonicalizes a document and
parsing a written document gives it back unchanged.

The NNF format lists one node per line after a header and cardinality line::

    nnf <nodes> <vars>
    d <card_1> ... <card_vars>
    T | F | L var:s1,s2,... | A n id... | O n id...

Node ids are 0-based line positions; children must precede their parents and
the last node is the root.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .core import RawClause, full_set, iter_states


class ParseError(ValueError):
    """A format violation, carrying the failure kind and the 1-based line."""

    def __init__(self, kind: str, line: int, message: str) -> None:
        super().__init__(f"line {line}: {message}")
        self.kind = kind
        self.line = line


@dataclass
class DcnfDocument:
    cards: list[int]
    clauses: list[RawClause] = field(default_factory=list)

    @property
    def var_count(self) -> int:
        return len(self.cards)

    @property
    def clause_count(self) -> int:
        return len(self.clauses)


def _content_lines(text: str):
    for number, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("c ") or stripped == "c":
            continue
        yield number, stripped


def _parse_literal_token(token: str, cards: list[int], line: int) -> tuple[int, int]:
    head, sep, tail = token.partition(":")
    if not sep or not tail:
        raise ParseError("malformed-literal", line, f"bad literal token {token!r}")
    try:
        var = int(head)
        states = [int(part) for part in tail.split(",")]
    except ValueError:
        raise ParseError("malformed-literal", line, f"bad literal token {token!r}") from None
    if not 1 <= var <= len(cards):
        raise ParseError("var-out-of-range", line,
                         f"variable {var} outside 1..{len(cards)}")
    mask = 0
    for s in states:
        if not 1 <= s <= cards[var - 1]:
            raise ParseError("state-out-of-range", line,
                             f"state {s} outside 1..{cards[var - 1]} for variable {var}")
        mask |= 1 << (s - 1)
    return var - 1, mask


def parse_dcnf(text: str) -> DcnfDocument:
    """Parse DCNF text; raises ParseError with a line number on bad input."""
    lines = _content_lines(text)
    try:
        line, header = next(lines)
    except StopIteration:
        raise ParseError("malformed-header", 1, "missing 'p dcnf' header") from None
    parts = header.split()
    if len(parts) != 4 or parts[0] != "p" or parts[1] != "dcnf":
        raise ParseError("malformed-header", line, f"bad header {header!r}")
    try:
        var_count = int(parts[2])
        clause_count = int(parts[3])
    except ValueError:
        raise ParseError("malformed-header", line, f"bad header {header!r}") from None
    if var_count < 0 or clause_count < 0:
        raise ParseError("malformed-header", line, "negative counts in header")
    try:
        line, card_line = next(lines)
    except StopIteration:
        raise ParseError("count-mismatch", line, "missing cardinality line") from None
    parts = card_line.split()
    if not parts or parts[0] != "d":
        raise ParseError("malformed-header", line, "expected cardinality line 'd ...'")
    try:
        cards = [int(part) for part in parts[1:]]
    except ValueError:
        raise ParseError("malformed-header", line, "non-numeric cardinality") from None
    if len(cards) != var_count:
        raise ParseError("count-mismatch", line,
                         f"expected {var_count} cardinalities, got {len(cards)}")
    for card in cards:
        if card < 2:
            raise ParseError("cardinality-below-2", line, f"cardinality {card} below 2")
    clauses: list[RawClause] = []
    current: RawClause = []
    last_line = line
    for line, content in lines:
        last_line = line
        for token in content.split():
            if token == "0":
                clauses.append(current)
                current = []
            else:
                current.append(_parse_literal_token(token, cards, line))
    if current:
        raise ParseError("missing-terminator", last_line,
                         "clause not terminated by 0 before end of input")
    if len(clauses) != clause_count:
        raise ParseError("count-mismatch", last_line,
                         f"header declared {clause_count} clauses, found {len(clauses)}")
    return DcnfDocument(cards, clauses)


def _canonical_clause(clause: RawClause) -> RawClause:
    merged: dict[int, int] = {}
    for var, states in clause:
        merged[var] = merged.get(var, 0) | states
    return [(var, merged[var]) for var in sorted(merged)]


def write_dcnf(doc: DcnfDocument) -> str:
    """Render the canonical text for a document."""
    out = [f"p dcnf {doc.var_count} {doc.clause_count}"]
    out.append("d " + " ".join(str(card) for card in doc.cards) if doc.cards else "d")
    for clause in doc.clauses:
        tokens = []
        for var, states in _canonical_clause(clause):
            tokens.append(f"{var + 1}:" + ",".join(str(s + 1) for s in iter_states(states)))
        tokens.append("0")
        out.append(" ".join(tokens))
    return "\n".join(out) + "\n"


def binarize(doc: DcnfDocument) -> DcnfDocument:
    """Encode a document over Boolean variables, one per original state.

    The variable with cardinality k at offset o becomes Booleans o..o+k-1,
    where state 2 of a Boolean means true and state 1 false.  Every literal
    maps to the disjunction of its states' Booleans; each original variable
    adds one at-least-one clause and a pairwise at-most-one clause per state
    pair.
    """
    offsets = []
    total = 0
    for card in doc.cards:
        offsets.append(total)
        total += card
    true_mask = 1 << 1
    false_mask = 1 << 0
    clauses: list[RawClause] = []
    for clause in doc.clauses:
        mapped: RawClause = []
        for var, states in clause:
            base = offsets[var]
            for s in iter_states(states):
                mapped.append((base + s, true_mask))
        clauses.append(mapped)
    for var, card in enumerate(doc.cards):
        base = offsets[var]
        clauses.append([(base + s, true_mask) for s in range(card)])
        for i in range(card):
            for j in range(i + 1, card):
                clauses.append([(base + i, false_mask), (base + j, false_mask)])
    return DcnfDocument([2] * total, clauses)


@dataclass
class NnfNode:
    kind: str                      # "T", "F", "L", "A" or "O"
    var: int = -1
    states: int = 0
    children: list[int] = field(default_factory=list)


@dataclass
class NnfDocument:
    cards: list[int]
    nodes: list[NnfNode]

    @property
    def root(self) -> int:
        return len(self.nodes) - 1


def parse_nnf(text: str) -> NnfDocument:
    """Parse NNF circuit text; raises ParseError on bad input."""
    lines = _content_lines(text)
    try:
        line, header = next(lines)
    except StopIteration:
        raise ParseError("malformed-header", 1, "missing 'nnf' header") from None
    parts = header.split()
    if len(parts) != 3 or parts[0] != "nnf":
        raise ParseError("malformed-header", line, f"bad header {header!r}")
    try:
        node_count = int(parts[1])
        var_count = int(parts[2])
    except ValueError:
        raise ParseError("malformed-header", line, f"bad header {header!r}") from None
    if node_count < 1 or var_count < 0:
        raise ParseError("malformed-header", line, "need at least one node")
    try:
        line, card_line = next(lines)
    except StopIteration:
        raise ParseError("count-mismatch", line, "missing cardinality line") from None
    parts = card_line.split()
    if not parts or parts[0] != "d":
        raise ParseError("malformed-header", line, "expected cardinality line 'd ...'")
    try:
        cards = [int(part) for part in parts[1:]]
    except ValueError:
        raise ParseError("malformed-header", line, "non-numeric cardinality") from None
    if len(cards) != var_count:
        raise ParseError("count-mismatch", line,
                         f"expected {var_count} cardinalities, got {len(cards)}")
    for card in cards:
        if card < 2:
            raise ParseError("cardinality-below-2", line, f"cardinality {card} below 2")
    nodes: list[NnfNode] = []
    last_line = line
    for line, content in lines:
        last_line = line
        parts = content.split()
        kind = parts[0]
        if kind in ("T", "F"):
            if len(parts) != 1:
                raise ParseError("arity-mismatch", line, f"{kind} node takes no arguments")
            nodes.append(NnfNode(kind))
        elif kind == "L":
            if len(parts) != 2:
                raise ParseError("invalid-literal", line, "literal node needs one token")
            var, states = _parse_literal_token(parts[1], cards, line)
            if states >= full_set(cards[var]):
                raise ParseError("invalid-literal", line,
                                 "literal covers the variable's full domain")
            nodes.append(NnfNode("L", var=var, states=states))
        elif kind in ("A", "O"):
            try:
                arity = int(parts[1]) if len(parts) > 1 else -1
                children = [int(part) for part in parts[2:]]
            except ValueError:
                raise ParseError("arity-mismatch", line, "bad node arguments") from None
            if arity < 0 or len(children) != arity:
                raise ParseError("arity-mismatch", line,
                                 f"declared {arity} children, found {len(children)}")
            for child in children:
                if not 0 <= child < len(nodes):
                    raise ParseError("forward-reference", line,
                                     f"child {child} does not precede node {len(nodes)}")
            nodes.append(NnfNode(kind, children=children))
        else:
            raise ParseError("malformed-literal", line, f"unknown node kind {kind!r}")
        if len(nodes) > node_count:
            raise ParseError("count-mismatch", line, "more nodes than the header declared")
    if len(nodes) != node_count:
        raise ParseError("count-mismatch", last_line,
                         f"header declared {node_count} nodes, found {len(nodes)}")
    return NnfDocument(cards, nodes)


def write_model(status: str, model: Optional[list[int]] = None,
                per_line: int = 16) -> str:
    """Result lines: an ``s`` status line plus ``v`` assignment lines on SAT."""
    if status == "SAT":
        out = ["s SATISFIABLE"]
        tokens = [f"{var + 1}={state + 1}" for var, state in enumerate(model or [])]
        tokens.append("0")
        for start in range(0, len(tokens), per_line):
            out.append("v " + " ".join(tokens[start:start + per_line]))
        return "\n".join(out) + "\n"
    if status == "UNSAT":
        return "s UNSATISFIABLE\n"
    if status == "UNSAT_UNDER_ASSUMPTIONS":
        return "s UNSATISFIABLE UNDER ASSUMPTIONS\n"
    return "s UNKNOWN\n"


def parse_model(text: str) -> tuple[str, Optional[dict[int, int]]]:
    """Read result lines back; returns (status, 1-based assignments or None)."""
    status = None
    assignment: dict[int, int] = {}
    saw_values = False
    for line in text.splitlines():
        line = line.strip()
        if line.startswith("s "):
            label = line[2:]
            if label == "SATISFIABLE":
                status = "SAT"
            elif label == "UNSATISFIABLE":
                status = "UNSAT"
            elif label == "UNSATISFIABLE UNDER ASSUMPTIONS":
                status = "UNSAT_UNDER_ASSUMPTIONS"
            else:
                status = "UNKNOWN"
        elif line.startswith("v "):
            saw_values = True
            for token in line[2:].split():
                if token == "0":
                    continue
                var, _, state = token.partition("=")
                assignment[int(var)] = int(state)
    if status is None:
        raise ValueError("no status line found")
    return status, assignment if saw_values else None


def exit_code(status: str) -> int:
    """Process exit code for a solve status: 10 SAT, 20 UNSAT, 0 anything else."""
    if status == "SAT":
        return 10
    if status == "UNSAT":
        return 20
    return 0
