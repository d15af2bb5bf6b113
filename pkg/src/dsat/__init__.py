"""Solver for CNF over finite-domain variables.

A variable ranges over states ``0 .. card-1`` and a literal asserts
membership in a nonempty proper subset of those states, held as an int
bitmask.  The package bundles the search engine, text formats, a random
instance generator, a circuit compiler and brute-force reference checkers.
"""

from .core import (TAUTOLOGY, clause_size, complement, evaluate, full_set,
                   iter_states, normalize_clause, resolve, state_count)
from .formats import (DcnfDocument, NnfDocument, NnfNode, ParseError, binarize,
                      exit_code, parse_dcnf, parse_model, parse_nnf, write_dcnf,
                      write_model)
from .gen import GenSpec, Xoshiro256, generate, transition_ratio
from .nnf2cnf import CompileLimitError, compile_nnf, evaluate_nnf
from .oracle import brute_force, check_implied, ur_closure
from .solver import (SAT, UNSAT, UNSAT_UNDER_ASSUMPTIONS, SolveResult,
                     SolveTimeout, Solver)

__version__ = "0.1.0"

__all__ = [
    "TAUTOLOGY", "clause_size", "complement", "evaluate", "full_set",
    "iter_states", "normalize_clause", "resolve", "state_count",
    "DcnfDocument", "NnfDocument", "NnfNode", "ParseError", "binarize",
    "exit_code", "parse_dcnf", "parse_model", "parse_nnf", "write_dcnf",
    "write_model",
    "GenSpec", "Xoshiro256", "generate", "transition_ratio",
    "CompileLimitError", "compile_nnf", "evaluate_nnf",
    "brute_force", "check_implied", "ur_closure",
    "SAT", "UNSAT", "UNSAT_UNDER_ASSUMPTIONS", "SolveResult", "SolveTimeout",
    "Solver",
    "__version__",
]
