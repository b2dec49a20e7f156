"""From winning region to circuit: strategy extraction and verification.

Run from the repository root:  python3 demos/04_synthesize_and_verify.py
"""

from pathlib import Path

from aigsynt import aiger
from aigsynt.game import build_game, solve
from aigsynt.oracle import simulate
from aigsynt.synth import emit_invariant, encode_solution, extract_strategy
from aigsynt.verify import check_invariant, combine, find_invariant_output, \
    model_check

BENCH = Path(__file__).resolve().parent.parent / "benchmarks"

spec = aiger.load(BENCH / "arbiter/req_grant.aag")
partition = aiger.classify_inputs(spec)
game = build_game(spec, partition)
result = solve(game)
assert result.realizable

strategy = extract_strategy(game, result.winning_region)
m = game.manager
for pos, fn in sorted(strategy.decision.items()):
    support = sorted(m.var_name(v) for v in m.support(fn))
    print(f"decision for input {pos} depends on {support}")

solution = encode_solution(game.circuit, strategy)
print(f"\nsolution circuit: {len(solution.inputs)} free input(s), "
      f"{len(solution.ands)} AND gates "
      f"(spec had {len(game.circuit.ands)}; the extras are the strategy cone)")

certified = emit_invariant(strategy, solution)
print(f"with certificate: {len(certified.ands)} gates, output 1 is the "
      f"'{certified.symbols[('o', 1)]}' signal")
print()
print(aiger.write_ascii(certified))

combined = combine(spec, certified)
inv = find_invariant_output(combined)
print("fast inductive check:", check_invariant(combined, inv))
print("full model checking: ", model_check(combined))

print("\nbounded replay: request storms never raise the monitor")
storm = [(1,)] * 8
outputs = simulate(certified, storm)
print("  monitor bits over 8 request cycles:", [o[0] for o in outputs])
