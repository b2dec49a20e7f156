"""Running configurations under competition rules and scoring them.

Spawns real solver subprocesses; takes a few seconds.
Run from the repository root:  python3 demos/05_competition_harness.py
"""

import tempfile
from pathlib import Path

from aigsynt.harness import (
    RunConfig, compute_ranking, eligible_for_synthesis, format_ranking,
    load_suite, quality_score, run_suite, select_benchmarks,
)

BENCH = Path(__file__).resolve().parent.parent / "benchmarks"

library = load_suite(BENCH)
print(f"benchmark library: {len(library)} instances in "
      f"{len({i.category for i in library})} classes")

print("\nstratified selection, 2 per class, fixed seed:")
for instance in select_benchmarks(library, per_class=2, seed=7):
    print(f"  {instance.id}")

configs = [
    RunConfig(name="bdd-seq", builtin="bdd", mode="sequential", timeout_s=60.0),
]

with tempfile.TemporaryDirectory() as out:
    print("\nrealizability track (sequential, CPU-time accounting):")
    results = run_suite(configs, library, track="realizability", out_dir=out)
    for r in results:
        print(f"  {r.instance:24} {r.answer.value:13} {r.time_s:7.3f}s")
    eligible = eligible_for_synthesis(results)
    print(f"\neligible for synthesis: {len(eligible)} of {len(library)}")

    print("\nsynthesis track on the eligible instances:")
    chosen = [i for i in library if i.id in eligible]
    results = run_suite(configs, chosen, track="synthesis", out_dir=out)
    for r in results:
        size = "-" if r.solution_size is None else r.solution_size
        print(f"  {r.instance:24} {r.answer.value:13} size={size:>3} "
              f"verified={r.verified.value}")

    ranking = compute_ranking(results, chosen, "synthesis")
    print("\n" + format_ranking(ranking))

print("\nquality anchor: a solution matching the reference size scores",
      quality_score(10, 10))
