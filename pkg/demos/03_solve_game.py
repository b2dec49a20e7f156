"""Deciding realizability: the backward fixpoint on the losing region.

Run from the repository root:  python3 demos/03_solve_game.py
"""

from pathlib import Path

from aigsynt import aiger
from aigsynt.game import build_game, solve, upre
from aigsynt.oracle import enumerate_solve

BENCH = Path(__file__).resolve().parent.parent / "benchmarks"

for name in ("arbiter/req_grant", "arbiter/starve", "counter/saturate2"):
    circuit = aiger.load(BENCH / f"{name}.aag")
    partition = aiger.classify_inputs(circuit)
    game = build_game(circuit, partition)
    result = solve(game)
    verdict = "REALIZABLE" if result.realizable else "UNREALIZABLE"
    print(f"{name:22} {verdict:13} "
          f"({result.iterations} fixpoint iterations, "
          f"{result.stats.solve_time_s * 1000:.1f} ms)")

    # cross-check against brute-force enumeration of the full state space
    oracle_verdict, oracle_winning = enumerate_solve(circuit, partition)
    assert oracle_verdict == result.realizable
    print(f"{'':22} explicit-state oracle agrees; "
          f"|winning| = {len(oracle_winning)} of "
          f"{2 ** len(circuit.latches)} states")

print("\nThe solver iterates L -> L | upre(L): states from which the")
print("environment can force the monitor to raise.  One step on the")
print("starving arbiter (monitor = primed & (req | grant)):")
circuit = aiger.load(BENCH / "arbiter/starve.aag")
game = build_game(circuit, aiger.classify_inputs(circuit))
m = game.manager
forced = upre(game, m.false)
cube = m.pick_cube(forced)
print("  upre(empty) cube:",
      {m.var_name(v): int(b) for v, b in sorted((cube or {}).items())})
print("  (primed=1 loses outright: the environment raises req and the")
print("   monitor fires no matter which grant the controller picks)")
