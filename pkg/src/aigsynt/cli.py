"""Command-line front end: solve, synth, verify, run, score, select.

Verdicts go to stdout (one token on the first line), diagnostics to
stderr.  ``solve``/``synth`` exit with 10 (realizable), 20 (unrealizable)
or 0 (unknown/timeout); ``verify`` exits 0/1/2 for safe/unsafe/timeout.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

from . import __version__, aiger, game, harness, synth, verify

EXIT_REALIZABLE = 10
EXIT_UNREALIZABLE = 20
EXIT_UNKNOWN = 0

NODE_BUDGET_ENV = "AIGSYNT_NODE_BUDGET"


def _node_budget() -> int:
    value = os.environ.get(NODE_BUDGET_ENV)
    if value is None:
        return game.DEFAULT_NODE_BUDGET
    try:
        return int(value)
    except ValueError:
        raise SystemExit(f"error: {NODE_BUDGET_ENV} must be an integer, got {value!r}")


def _load_spec(path: str) -> tuple[aiger.AigerCircuit, aiger.InputPartition]:
    circuit = aiger.normalize(aiger.load(path))
    return circuit, aiger.classify_inputs(circuit)


def _solve_game(args) -> tuple[game.GameResult | None, game.SafetyGame | None,
                               aiger.AigerCircuit]:
    from .bdd import NodeBudgetExceeded

    circuit, partition = _load_spec(args.spec)
    deadline = args.timeout if args.timeout > 0 else None
    try:
        safety_game = game.build_game(circuit, partition, node_budget=_node_budget())
        if args.mode == "seq":
            # sequential-mode convention: the deadline is CPU time
            safety_game.manager.clock = time.process_time
        result = game.solve(safety_game, deadline_s=deadline,
                            early_exit=args.early_exit)
    except NodeBudgetExceeded as exc:
        print(f"gave up: {exc}", file=sys.stderr)
        return None, None, circuit
    except game.SolveLimitReached as exc:
        print(f"gave up: {exc}", file=sys.stderr)
        return None, safety_game, circuit
    return result, safety_game, circuit


def _cmd_solve(args) -> int:
    result, safety_game, _ = _solve_game(args)
    if result is None:
        print("UNKNOWN")
        return EXIT_UNKNOWN
    if args.dump_bdd:
        dot = safety_game.manager.to_dot(result.winning_region, name="winning_region")
        Path(args.dump_bdd).write_text(dot)
    print("REALIZABLE" if result.realizable else "UNREALIZABLE")
    print(f"iterations: {result.iterations}  peak nodes: {result.stats.peak_nodes}  "
          f"time: {result.stats.solve_time_s:.3f}s", file=sys.stderr)
    return EXIT_REALIZABLE if result.realizable else EXIT_UNREALIZABLE


def _cmd_synth(args) -> int:
    args.early_exit = False  # synthesis needs the exact winning region
    result, safety_game, circuit = _solve_game(args)
    if result is None:
        print("UNKNOWN")
        return EXIT_UNKNOWN
    if not result.realizable:
        print("UNREALIZABLE")
        return EXIT_UNREALIZABLE
    strategy = synth.extract_strategy(safety_game, result.winning_region)
    solution = synth.encode_solution(safety_game.circuit, strategy)
    if args.emit_invariant:
        solution = synth.emit_invariant(strategy, solution)
    if args.dump_bdd:
        dot = safety_game.manager.to_dot(result.winning_region, name="winning_region")
        Path(args.dump_bdd).write_text(dot)
    print("REALIZABLE")
    print(f"solution size: {len(solution.ands)} gates", file=sys.stderr)
    if args.output == "-":
        sys.stdout.write(aiger.write_ascii(solution))
    else:
        aiger.save(solution, args.output, binary=False)
    return EXIT_REALIZABLE


def _cmd_verify(args) -> int:
    spec = aiger.load(args.spec)
    solution = aiger.load(args.solution)
    try:
        outcome = verify.verify_solution(spec, solution, deadline_s=args.timeout)
    except verify.CombineError as exc:
        print("REJECT")
        print(f"invalid solution: {exc}", file=sys.stderr)
        return 1
    if isinstance(outcome, verify.Accept):
        print("ACCEPT")
        return 0
    if isinstance(outcome, verify.Safe):
        print("SAFE")
        return 0
    if isinstance(outcome, verify.Unsafe):
        print("UNSAFE")
        print(verify.format_trace(outcome.trace))
        return 1
    print("TIMEOUT")
    return 2


def _cmd_run(args) -> int:
    configs = harness.load_configs(args.configs)
    instances = harness.load_suite(args.suite)
    results = harness.run_suite(configs, instances, track=args.track,
                                out_dir=args.out, jobs=args.jobs,
                                verify_deadline_s=args.verify_timeout)
    ranking = harness.compute_ranking(results, instances, args.track)
    print(harness.format_ranking(ranking))
    return 0


def _cmd_score(args) -> int:
    results = harness.load_results(args.results)
    if not results:
        print("no results found", file=sys.stderr)
        return 1
    references_path = Path(args.results) / "references.json"
    references = {}
    if references_path.exists():
        references = json.loads(references_path.read_text())
    harness.write_csv(results, references, Path(args.results) / "results.csv")
    library = [harness.BenchmarkInstance(id=instance_id, path=Path(instance_id),
                                         category=instance_id.split("/")[0],
                                         reference_size=references.get(instance_id))
               for instance_id in sorted({r.instance for r in results})]
    ranking = harness.compute_ranking(results, library, args.track)
    print(harness.format_ranking(ranking))
    return 0


def _cmd_select(args) -> int:
    library = harness.load_suite(args.suite)
    selected = harness.select_benchmarks(library, args.per_class, args.seed)
    for instance in selected:
        print(instance.id)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aigsynt",
        description="Safety-game realizability, synthesis and verification "
                    "for AIGER monitor circuits")
    parser.add_argument("--version", action="version", version=f"aigsynt {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_solver_flags(p):
        p.add_argument("--timeout", type=float, default=0.0,
                       help="solver deadline in seconds (0 = none)")
        p.add_argument("--mode", choices=("seq", "par"), default="seq",
                       help="execution mode, for time accounting conventions")
        p.add_argument("--dump-bdd", metavar="FILE",
                       help="write the winning region as a GraphViz file")

    p_solve = sub.add_parser("solve", help="decide realizability")
    p_solve.add_argument("spec")
    add_solver_flags(p_solve)
    p_solve.add_argument("--early-exit", action="store_true",
                         help="stop as soon as the initial state is losing")
    p_solve.set_defaults(func=_cmd_solve)

    p_synth = sub.add_parser("synth", help="synthesize a solution circuit")
    p_synth.add_argument("spec")
    p_synth.add_argument("-o", "--output", default="-",
                         help="solution path (default: stdout)")
    p_synth.add_argument("--emit-invariant", action="store_true",
                         help="append the winning region as an 'invariant' output")
    add_solver_flags(p_synth)
    p_synth.set_defaults(func=_cmd_synth)

    p_verify = sub.add_parser("verify", help="check a solution against its spec")
    p_verify.add_argument("spec")
    p_verify.add_argument("solution")
    p_verify.add_argument("--timeout", type=float,
                          default=verify.DEFAULT_MC_DEADLINE_S,
                          help="model-checking deadline in seconds")
    p_verify.set_defaults(func=_cmd_verify)

    p_run = sub.add_parser("run", help="run configurations over a benchmark suite")
    p_run.add_argument("--suite", required=True)
    p_run.add_argument("--configs", required=True)
    p_run.add_argument("--out", required=True)
    p_run.add_argument("--track", choices=("realizability", "synthesis"),
                       default="realizability")
    p_run.add_argument("--jobs", type=int, default=1)
    p_run.add_argument("--verify-timeout", type=float,
                       default=harness.DEFAULT_TIMEOUT_S)
    p_run.set_defaults(func=_cmd_run)

    p_score = sub.add_parser("score", help="recompute rankings from saved results")
    p_score.add_argument("--results", required=True)
    p_score.add_argument("--track", choices=("realizability", "synthesis"),
                         default="realizability")
    p_score.set_defaults(func=_cmd_score)

    p_select = sub.add_parser("select", help="pick a stratified benchmark sample")
    p_select.add_argument("--suite", required=True)
    p_select.add_argument("--per-class", type=int, required=True)
    p_select.add_argument("--seed", type=int, required=True)
    p_select.set_defaults(func=_cmd_select)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (aiger.AigerError, game.GameError, synth.SynthError,
            harness.HarnessError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
