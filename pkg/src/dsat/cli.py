"""Command line front end.

Subcommands: ``solve`` a DCNF file, ``gen`` a random instance, ``binarize``
a DCNF file to Boolean CNF, ``compile-nnf`` a circuit to DCNF, and ``bench``
a sweep description to CSV.  ``solve`` exits 10 on SAT, 20 on UNSAT and 0
otherwise; parse failures exit 1 with a message on stderr.  The
``DSAT_SEED`` environment variable overrides the default seed wherever a
``--seed`` flag is accepted.
"""

from __future__ import annotations

import argparse
import math
import multiprocessing
import os
import sys
from time import perf_counter

from .formats import ParseError, binarize, exit_code, parse_dcnf, parse_nnf, write_dcnf, write_model
from .gen import GenSpec, generate, transition_ratio
from .heuristics import BUMP_SCALE, DECISION_RATIO, RESTART_MARGIN
from .nnf2cnf import CLAUSE_CAP, CompileLimitError, compile_nnf
from .solver import SolveTimeout, Solver

BENCH_COLUMNS = ("instance_id", "C", "N", "M", "seed", "status", "time_ms",
                 "decisions", "conflicts", "propagations", "learned", "restarts")


def _default_seed() -> int:
    try:
        return int(os.environ.get("DSAT_SEED", "1"))
    except ValueError:
        return 1


def _add_solver_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=None,
                        help="seed recorded with the run (default: DSAT_SEED or 1)")
    parser.add_argument("--threshold", type=float, default=DECISION_RATIO,
                        help="decision state-selection score fraction")
    parser.add_argument("--bump-inc", type=float, default=BUMP_SCALE,
                        help="per-conflict score bump growth factor")
    parser.add_argument("--restart-margin", type=float, default=RESTART_MARGIN,
                        help="recent/global LBD mean margin that triggers restarts")
    parser.add_argument("--no-restarts", action="store_true", help="disable restarts")
    parser.add_argument("--no-reduce", action="store_true",
                        help="disable learned-clause deletion")
    parser.add_argument("--minimize", action="store_true",
                        help="self-subsume learned clauses before installing them")
    parser.add_argument("--timeout-s", type=float, default=None,
                        help="wall-clock budget per solve in seconds")


def _build_solver(doc, args) -> Solver:
    return Solver.from_document(
        doc,
        ratio=args.threshold,
        bump_scale=args.bump_inc,
        restart_margin=args.restart_margin,
        enable_restarts=not args.no_restarts,
        enable_reduce=not args.no_reduce,
        minimize_learned=args.minimize,
    )


def cmd_solve(args) -> int:
    try:
        with open(args.file, encoding="utf-8") as handle:
            doc = parse_dcnf(handle.read())
    except (OSError, ParseError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    seed = args.seed if args.seed is not None else _default_seed()
    solver = _build_solver(doc, args)
    if args.stats:
        for key, value in (("file", args.file), ("seed", seed),
                           ("threshold", args.threshold), ("bump_inc", args.bump_inc),
                           ("restart_margin", args.restart_margin),
                           ("restarts", str(not args.no_restarts).lower()),
                           ("reduce", str(not args.no_reduce).lower()),
                           ("minimize", str(args.minimize).lower()),
                           ("timeout_s", args.timeout_s)):
            print(f"c config {key}={value}")
    start = perf_counter()
    try:
        result = solver.solve(timeout_s=args.timeout_s)
        status, model = result.status, result.model
    except SolveTimeout:
        status, model = "UNKNOWN", None
    elapsed_ms = (perf_counter() - start) * 1000.0
    if args.stats:
        stats = solver.state.stats
        print(f"c time_ms={elapsed_ms:.3f}")
        for key in ("decisions", "conflicts", "propagations", "learned",
                    "restarts", "deleted"):
            print(f"c {key}={getattr(stats, key)}")
    print(write_model(status, model), end="")
    return exit_code(status)


def cmd_gen(args) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    if (args.clauses is None) == (args.ratio is None):
        print("error: give exactly one of -M/--clauses or --ratio", file=sys.stderr)
        return 1
    try:
        if args.clauses is not None:
            clause_count = args.clauses
        else:
            ratio = transition_ratio(args.card) if args.ratio == "auto" else float(args.ratio)
            clause_count = round(ratio * args.vars)
        doc = generate(GenSpec(args.vars, clause_count, args.card, seed))
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    sys.stdout.write(write_dcnf(doc))
    return 0


def cmd_binarize(args) -> int:
    try:
        with open(args.file, encoding="utf-8") as handle:
            doc = parse_dcnf(handle.read())
    except (OSError, ParseError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    sys.stdout.write(write_dcnf(binarize(doc)))
    return 0


def cmd_compile_nnf(args) -> int:
    try:
        with open(args.file, encoding="utf-8") as handle:
            doc = parse_nnf(handle.read())
        compiled = compile_nnf(doc, cap=args.cap)
    except (OSError, ParseError, CompileLimitError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    sys.stdout.write(write_dcnf(compiled))
    return 0


def _parse_bench_spec(text: str) -> list[tuple[int, int, int, int, int]]:
    rows = []
    for number, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        parts = stripped.replace(",", " ").split()
        if len(parts) != 5:
            raise ValueError(f"line {number}: expected 'C N M count seed_base'")
        try:
            rows.append(tuple(int(part) for part in parts))
        except ValueError:
            raise ValueError(f"line {number}: non-integer field") from None
    return rows


def _bench_instance(task) -> dict:
    instance_id, card, var_count, clause_count, seed, timeout_s = task
    doc = generate(GenSpec(var_count, clause_count, card, seed))
    solver = Solver.from_document(doc)
    start = perf_counter()
    try:
        result = solver.solve(timeout_s=timeout_s)
        status = result.status
    except SolveTimeout:
        status = "TIMEOUT"
    elapsed_ms = (perf_counter() - start) * 1000.0
    stats = solver.state.stats
    return {
        "instance_id": instance_id, "C": card, "N": var_count, "M": clause_count,
        "seed": seed, "status": status, "time_ms": f"{elapsed_ms:.3f}",
        "decisions": stats.decisions, "conflicts": stats.conflicts,
        "propagations": stats.propagations, "learned": stats.learned,
        "restarts": stats.restarts,
    }


def _geomean(values) -> str:
    positive = [v for v in values if v > 0]
    if not positive:
        return ""
    return f"{math.exp(sum(math.log(v) for v in positive) / len(positive)):.3f}"


def cmd_bench(args) -> int:
    try:
        with open(args.file, encoding="utf-8") as handle:
            rows = _parse_bench_spec(handle.read())
    except (OSError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    tasks = []
    instance_id = 0
    for card, var_count, clause_count, count, seed_base in rows:
        for i in range(count):
            tasks.append((instance_id, card, var_count, clause_count,
                          seed_base + i, args.timeout_s))
            instance_id += 1
    if args.jobs > 1:
        with multiprocessing.Pool(args.jobs) as pool:
            records = list(pool.imap(_bench_instance, tasks))
    else:
        records = [_bench_instance(task) for task in tasks]
    out = sys.stdout
    out.write(",".join(BENCH_COLUMNS) + "\n")
    for record in records:
        out.write(",".join(str(record[col]) for col in BENCH_COLUMNS) + "\n")
    solved = [r for r in records if r["status"] in ("SAT", "UNSAT")]
    sat_fraction = (sum(1 for r in records if r["status"] == "SAT") / len(solved)
                    if solved else 0.0)
    fraction_cells = ["sat_fraction", "", "", "", "", "ALL",
                      f"{sat_fraction:.4f}", "", "", "", "", ""]
    out.write(",".join(fraction_cells) + "\n")
    for status in ("SAT", "UNSAT", "TIMEOUT"):
        group = [r for r in records if r["status"] == status]
        if not group:
            continue
        cells = ["geomean", "", "", "", "", status,
                 _geomean([float(r["time_ms"]) for r in group]),
                 _geomean([r["decisions"] for r in group]),
                 _geomean([r["conflicts"] for r in group]),
                 _geomean([r["propagations"] for r in group]),
                 _geomean([r["learned"] for r in group]),
                 _geomean([r["restarts"] for r in group])]
        out.write(",".join(cells) + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dsat",
                                     description="finite-domain CNF solver and tools")
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="solve a DCNF file")
    p_solve.add_argument("file")
    p_solve.add_argument("--stats", action="store_true",
                         help="print config and counters as c lines")
    _add_solver_flags(p_solve)
    p_solve.set_defaults(func=cmd_solve)

    p_gen = sub.add_parser("gen", help="generate a random instance")
    p_gen.add_argument("-N", "--vars", type=int, required=True)
    p_gen.add_argument("-M", "--clauses", type=int, default=None)
    p_gen.add_argument("--ratio", default=None,
                       help="clause/variable ratio, or 'auto' for the transition ratio")
    p_gen.add_argument("-C", "--card", type=int, required=True)
    p_gen.add_argument("--seed", type=int, default=None)
    p_gen.set_defaults(func=cmd_gen)

    p_bin = sub.add_parser("binarize", help="encode a DCNF file over Boolean variables")
    p_bin.add_argument("file")
    p_bin.set_defaults(func=cmd_binarize)

    p_nnf = sub.add_parser("compile-nnf", help="compile an NNF circuit to DCNF")
    p_nnf.add_argument("file")
    p_nnf.add_argument("--cap", type=int, default=CLAUSE_CAP,
                       help="intermediate clause cap")
    p_nnf.set_defaults(func=cmd_compile_nnf)

    p_bench = sub.add_parser("bench", help="run a benchmark sweep to CSV")
    p_bench.add_argument("file", help="rows of 'C N M count seed_base'")
    p_bench.add_argument("--timeout-s", type=float, default=None)
    p_bench.add_argument("--jobs", type=int, default=1)
    p_bench.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
