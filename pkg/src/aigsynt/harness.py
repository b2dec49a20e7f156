"""Run solver configurations over benchmark suites under competition rules.

Sequential configurations are charged CPU time (user+system over the whole
process tree) against the timeout; parallel configurations are charged wall
time.  Results are persisted one JSON record per run plus a CSV summary,
and rankings are derived from the persisted records only, so re-scoring is
reproducible byte for byte.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import random
import signal
import subprocess
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from threading import Lock

import psutil

from . import aiger, verify

DEFAULT_TIMEOUT_S = 3600.0
MAX_PARALLEL_CORES = 4
MAX_CONFIGS_PER_TOOL = 3
_POLL_INTERVAL_S = 0.01


class HarnessError(Exception):
    pass


class Answer(str, Enum):
    REALIZABLE = "realizable"
    UNREALIZABLE = "unrealizable"
    UNKNOWN = "unknown"
    TIMEOUT = "timeout"
    ERROR = "error"


class Verified(str, Enum):
    PENDING = "pending"
    CONFIRMED = "confirmed"
    REFUTED = "refuted"
    MC_TIMEOUT = "mc-timeout"


@dataclass(frozen=True)
class BenchmarkInstance:
    id: str
    path: Path
    category: str
    reference_size: int | None = None

    def __post_init__(self):
        if self.reference_size is not None and self.reference_size <= 0:
            raise HarnessError(f"{self.id}: reference size must be positive")


@dataclass(frozen=True)
class RunConfig:
    """One competition entry: a command template or a builtin solver.

    Command templates take ``{input}`` and, for synthesis, ``{output}``
    placeholders.  Exit codes follow the solver convention: 10 realizable,
    20 unrealizable, 0 gave up in time.
    """

    name: str
    mode: str = "sequential"
    command: tuple[str, ...] | None = None
    builtin: str | None = None
    timeout_s: float = DEFAULT_TIMEOUT_S
    cores: int = 1
    tool: str | None = None

    def __post_init__(self):
        if self.mode not in ("sequential", "parallel"):
            raise HarnessError(f"{self.name}: mode must be sequential or parallel")
        if (self.command is None) == (self.builtin is None):
            raise HarnessError(f"{self.name}: exactly one of command/builtin required")
        if self.mode == "sequential" and self.cores != 1:
            raise HarnessError(f"{self.name}: sequential mode runs on one core")
        if self.mode == "parallel" and not 1 <= self.cores <= MAX_PARALLEL_CORES:
            raise HarnessError(f"{self.name}: parallel mode allows up to "
                               f"{MAX_PARALLEL_CORES} cores")
        if self.timeout_s <= 0:
            raise HarnessError(f"{self.name}: timeout must be positive")

    @property
    def tool_name(self) -> str:
        return self.tool if self.tool is not None else self.name


@dataclass(frozen=True)
class RunResult:
    config: str
    instance: str
    category: str
    answer: Answer
    time_s: float
    solution_size: int | None = None
    verified: Verified = Verified.PENDING

    def to_json(self) -> dict:
        return {
            "config": self.config,
            "instance": self.instance,
            "category": self.category,
            "answer": self.answer.value,
            "time_s": self.time_s,
            "solution_size": self.solution_size,
            "verified": self.verified.value,
        }

    @classmethod
    def from_json(cls, record: dict) -> "RunResult":
        return cls(
            config=record["config"],
            instance=record["instance"],
            category=record["category"],
            answer=Answer(record["answer"]),
            time_s=record["time_s"],
            solution_size=record.get("solution_size"),
            verified=Verified(record.get("verified", "pending")),
        )


@dataclass
class RankingRow:
    solved: int = 0
    unique: int = 0
    mc_timeout: int = 0
    quality_total: float = 0.0
    quality_avg: float = 0.0
    new_reference: int = 0


@dataclass
class Ranking:
    track: str
    rows: dict[str, RankingRow] = field(default_factory=dict)
    missing_reference: tuple[str, ...] = ()


def is_solved(result: RunResult, track: str) -> bool:
    """Definite answer, and for synthesis a confirmed solution."""
    if result.answer not in (Answer.REALIZABLE, Answer.UNREALIZABLE):
        return False
    if track == "synthesis" and result.answer is Answer.REALIZABLE:
        return result.verified is Verified.CONFIRMED
    return True


# ---------------------------------------------------------------------------
# benchmark libraries and configuration files

def load_suite(suite_dir: str | Path) -> list[BenchmarkInstance]:
    """Scan a directory tree for .aag/.aig files.

    The first path component is the benchmark class; files at the top level
    fall into class "default".  ``references.json`` at the root maps
    instance ids to reference solution sizes.
    """
    suite_dir = Path(suite_dir)
    if not suite_dir.is_dir():
        raise HarnessError(f"benchmark suite {suite_dir} is not a directory")
    references = {}
    ref_path = suite_dir / "references.json"
    if ref_path.exists():
        references = json.loads(ref_path.read_text())
    instances = []
    seen = set()
    for path in sorted(suite_dir.rglob("*")):
        if path.suffix not in (".aag", ".aig") or not path.is_file():
            continue
        rel = path.relative_to(suite_dir)
        instance_id = rel.with_suffix("").as_posix()
        if instance_id in seen:
            raise HarnessError(f"duplicate instance id {instance_id}")
        seen.add(instance_id)
        category = rel.parts[0] if len(rel.parts) > 1 else "default"
        instances.append(BenchmarkInstance(
            id=instance_id, path=path, category=category,
            reference_size=references.get(instance_id)))
    return instances


def load_configs(path: str | Path) -> list[RunConfig]:
    """Read a JSON list of configuration entries."""
    entries = json.loads(Path(path).read_text())
    if not isinstance(entries, list):
        raise HarnessError("config file must hold a list of configurations")
    configs = []
    for entry in entries:
        command = entry.get("command")
        if isinstance(command, str):
            command = tuple(command.split())
        elif command is not None:
            command = tuple(command)
        configs.append(RunConfig(
            name=entry["name"],
            mode=entry.get("mode", "sequential"),
            command=command,
            builtin=entry.get("builtin"),
            timeout_s=float(entry.get("timeout_s", DEFAULT_TIMEOUT_S)),
            cores=int(entry.get("cores", 1)),
            tool=entry.get("tool"),
        ))
    names = [c.name for c in configs]
    if len(set(names)) != len(names):
        raise HarnessError("configuration names must be unique")
    per_tool_mode: dict[tuple[str, str], int] = {}
    for c in configs:
        key = (c.tool_name, c.mode)
        per_tool_mode[key] = per_tool_mode.get(key, 0) + 1
        if per_tool_mode[key] > MAX_CONFIGS_PER_TOOL:
            raise HarnessError(f"more than {MAX_CONFIGS_PER_TOOL} configurations "
                               f"for tool {c.tool_name} in {c.mode} mode")
    return configs


# ---------------------------------------------------------------------------
# measured execution

def _tree_cpu_seconds(proc: psutil.Process) -> float:
    """User+system seconds of a process and its (live) descendants."""
    total = 0.0
    try:
        times = proc.cpu_times()
        total += times.user + times.system
        total += getattr(times, "children_user", 0.0)
        total += getattr(times, "children_system", 0.0)
        for child in proc.children(recursive=True):
            try:
                child_times = child.cpu_times()
                total += child_times.user + child_times.system
            except psutil.NoSuchProcess:
                pass
    except psutil.NoSuchProcess:
        pass
    return total


def run_measured(argv: list[str], mode: str, timeout_s: float,
                 log_path: Path | None = None) -> tuple[int | None, float]:
    """Run a command, enforcing and measuring its time budget.

    Sequential mode counts CPU time of the process tree; parallel mode
    counts wall time.  Returns (returncode, seconds), with returncode None
    when the run was killed on timeout.
    """
    log = open(log_path, "wb") if log_path is not None else subprocess.DEVNULL
    try:
        proc = subprocess.Popen(argv, stdout=log, stderr=subprocess.STDOUT,
                                start_new_session=True)
    finally:
        if log_path is not None:
            log.close()
    start = time.monotonic()
    ps_handle = psutil.Process(proc.pid)
    used = 0.0
    while True:
        try:
            wpid, status, rusage = os.wait4(proc.pid, os.WNOHANG)
        except ChildProcessError:
            # reaped elsewhere; treat as a crashed run
            proc.returncode = -1
            return -1, used
        if wpid == proc.pid:
            proc.returncode = os.waitstatus_to_exitcode(status)
            if mode == "sequential":
                used = rusage.ru_utime + rusage.ru_stime
            else:
                used = time.monotonic() - start
            return proc.returncode, used
        if mode == "sequential":
            used = _tree_cpu_seconds(ps_handle)
        else:
            used = time.monotonic() - start
        if used >= timeout_s:
            _kill_tree(proc.pid)
            _, status, rusage = os.wait4(proc.pid, 0)
            proc.returncode = os.waitstatus_to_exitcode(status)
            if mode == "sequential":
                # prefer the final accounting if the sample lagged behind
                used = max(used, rusage.ru_utime + rusage.ru_stime)
            return None, used
        time.sleep(_POLL_INTERVAL_S)


def _kill_tree(pid: int) -> None:
    try:
        os.killpg(os.getpgid(pid), signal.SIGKILL)
    except (ProcessLookupError, PermissionError):
        try:
            os.kill(pid, signal.SIGKILL)
        except ProcessLookupError:
            pass


def _builtin_argv(variant: str, task: str, instance_path: Path,
                  solution_path: Path | None) -> list[str]:
    if variant != "bdd":
        raise HarnessError(f"unknown builtin solver variant {variant!r}")
    argv = [sys.executable, "-m", "aigsynt", task, str(instance_path)]
    if task == "synth" and solution_path is not None:
        argv += ["-o", str(solution_path), "--emit-invariant"]
    return argv


def _command_argv(template: tuple[str, ...], instance_path: Path,
                  solution_path: Path | None) -> list[str]:
    argv = []
    for token in template:
        token = token.replace("{input}", str(instance_path))
        if solution_path is not None:
            token = token.replace("{output}", str(solution_path))
        argv.append(token)
    return argv


def run_one(config: RunConfig, instance: BenchmarkInstance, track: str,
            out_dir: Path | None, verify_deadline_s: float) -> RunResult:
    """Execute one (configuration, instance) pair and verify if needed."""
    solution_path = None
    log_path = None
    if out_dir is not None:
        record_dir = out_dir / "results" / config.name
        record_dir.mkdir(parents=True, exist_ok=True)
        safe_id = instance.id.replace("/", "__")
        log_path = record_dir / f"{safe_id}.log"
        solution_path = record_dir / f"{safe_id}.solution.aag"
    elif track == "synthesis":
        raise HarnessError("synthesis runs need an output directory for solutions")

    task = "synth" if track == "synthesis" else "solve"
    if config.builtin is not None:
        argv = _builtin_argv(config.builtin, task, instance.path, solution_path)
    else:
        argv = _command_argv(config.command, instance.path, solution_path)

    try:
        returncode, used = run_measured(argv, config.mode, config.timeout_s, log_path)
    except (OSError, psutil.Error):
        return RunResult(config=config.name, instance=instance.id,
                         category=instance.category, answer=Answer.ERROR,
                         time_s=0.0)

    if returncode is None:
        return RunResult(config=config.name, instance=instance.id,
                         category=instance.category, answer=Answer.TIMEOUT,
                         time_s=used)
    answer = {10: Answer.REALIZABLE, 20: Answer.UNREALIZABLE,
              0: Answer.UNKNOWN}.get(returncode, Answer.ERROR)

    size = None
    verified = Verified.PENDING
    if track == "synthesis" and answer is Answer.REALIZABLE:
        try:
            spec = aiger.load(instance.path)
            solution = aiger.load(solution_path)
            size = len(solution.ands)
            outcome = verify.verify_solution(spec, solution,
                                             deadline_s=verify_deadline_s)
        except (OSError, aiger.AigerError, verify.CombineError):
            return RunResult(config=config.name, instance=instance.id,
                             category=instance.category, answer=Answer.ERROR,
                             time_s=used)
        if isinstance(outcome, (verify.Accept, verify.Safe)):
            verified = Verified.CONFIRMED
        elif isinstance(outcome, verify.Timeout):
            verified = Verified.MC_TIMEOUT
        else:
            verified = Verified.REFUTED
    return RunResult(config=config.name, instance=instance.id,
                     category=instance.category, answer=answer, time_s=used,
                     solution_size=size, verified=verified)


def run_suite(configs: list[RunConfig], instances: list[BenchmarkInstance], *,
              track: str = "realizability", out_dir: str | Path | None = None,
              verify_deadline_s: float = DEFAULT_TIMEOUT_S,
              jobs: int = 1) -> list[RunResult]:
    """Every (configuration, instance) pair yields exactly one result.

    Solver crashes are recorded as Error and never abort the suite; every
    record is persisted before any ranking is derived.
    """
    if track not in ("realizability", "synthesis"):
        raise HarnessError(f"unknown track {track!r}")
    out_path = Path(out_dir) if out_dir is not None else None
    write_lock = Lock()

    def persist(result: RunResult) -> None:
        if out_path is None:
            return
        record_dir = out_path / "results" / result.config
        with write_lock:
            record_dir.mkdir(parents=True, exist_ok=True)
            safe_id = result.instance.replace("/", "__")
            record = json.dumps(result.to_json(), indent=2, sort_keys=True)
            (record_dir / f"{safe_id}.json").write_text(record + "\n")

    jobs_list = [(config, instance) for config in configs for instance in instances]

    def work(pair) -> RunResult:
        config, instance = pair
        try:
            result = run_one(config, instance, track, out_path, verify_deadline_s)
        except Exception:
            result = RunResult(config=config.name, instance=instance.id,
                               category=instance.category, answer=Answer.ERROR,
                               time_s=0.0)
        persist(result)
        return result

    if jobs <= 1:
        results = [work(pair) for pair in jobs_list]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(work, jobs_list))
    results.sort(key=lambda r: (r.config, r.instance))
    if out_path is not None:
        references = {i.id: i.reference_size for i in instances
                      if i.reference_size is not None}
        (out_path / "references.json").write_text(
            json.dumps(references, indent=2, sort_keys=True) + "\n")
        write_csv(results, {i.id: i.reference_size for i in instances},
                  out_path / "results.csv")
    return results


def load_results(out_dir: str | Path) -> list[RunResult]:
    """Re-read every persisted JSON record under ``out_dir``."""
    out_path = Path(out_dir)
    results = []
    for path in sorted((out_path / "results").rglob("*.json")):
        results.append(RunResult.from_json(json.loads(path.read_text())))
    results.sort(key=lambda r: (r.config, r.instance))
    return results


# ---------------------------------------------------------------------------
# scoring

def quality_score(size: int, ref: int) -> float:
    """2 - log10((size+1)/(ref+1)), clamped to [0, 3].

    Matching the reference size earns exactly 2 points; smaller solutions
    earn more, larger ones less.
    """
    if size < 0 or ref < 1:
        raise HarnessError("quality_score needs size >= 0 and ref >= 1")
    points = 2.0 - math.log10((size + 1) / (ref + 1))
    return min(3.0, max(0.0, points))


def _effective_references(results: list[RunResult],
                          references: dict[str, int | None]) -> tuple[dict[str, int], list[str]]:
    """Fill in missing references with the best confirmed size of this run."""
    effective: dict[str, int] = {}
    flagged: list[str] = []
    for result in results:
        if result.verified is not Verified.CONFIRMED or result.solution_size is None:
            continue
        ref = references.get(result.instance)
        if ref is not None:
            effective[result.instance] = ref
        else:
            best = effective.get(result.instance)
            if best is None or result.solution_size < best:
                effective[result.instance] = result.solution_size
            if result.instance not in flagged:
                flagged.append(result.instance)
    return effective, sorted(flagged)


def result_quality(result: RunResult, effective_refs: dict[str, int]) -> float | None:
    if result.verified is not Verified.CONFIRMED or result.solution_size is None:
        return None
    ref = effective_refs.get(result.instance)
    if ref is None:
        return None
    return quality_score(result.solution_size, max(1, ref))


def score_solved(results: list[RunResult], track: str = "realizability") -> Ranking:
    """Solved and unique columns; unique counts against all configurations.

    An instance is uniquely solved by a configuration iff no other
    configuration in the result set (either execution mode) solved it.
    """
    ranking = Ranking(track=track)
    solvers: dict[str, set[str]] = {}
    for result in results:
        row = ranking.rows.setdefault(result.config, RankingRow())
        if is_solved(result, track):
            row.solved += 1
            solvers.setdefault(result.instance, set()).add(result.config)
        if result.verified is Verified.MC_TIMEOUT:
            row.mc_timeout += 1
    for configs_solving in solvers.values():
        if len(configs_solving) == 1:
            (config,) = configs_solving
            ranking.rows[config].unique += 1
    return ranking


def add_quality(ranking: Ranking, results: list[RunResult],
                references: dict[str, int | None]) -> Ranking:
    effective, flagged = _effective_references(results, references)
    totals: dict[str, float] = {}
    counts: dict[str, int] = {}
    for result in results:
        quality = result_quality(result, effective)
        if quality is None:
            continue
        totals[result.config] = totals.get(result.config, 0.0) + quality
        counts[result.config] = counts.get(result.config, 0) + 1
    for config, row in ranking.rows.items():
        row.quality_total = totals.get(config, 0.0)
        solved_with_solution = counts.get(config, 0)
        row.quality_avg = (row.quality_total / solved_with_solution
                           if solved_with_solution else 0.0)
    ranking.missing_reference = tuple(flagged)
    return ranking


def update_reference(results: list[RunResult],
                     library: list[BenchmarkInstance]) -> tuple[list[BenchmarkInstance], dict[str, int]]:
    """Adopt strictly smaller confirmed solutions as new references.

    Returns the updated library and the per-configuration count of new
    reference solutions; ties at the new best size credit every tying
    configuration.  Reference sizes never increase.
    """
    best: dict[str, int] = {}
    for result in results:
        if result.verified is not Verified.CONFIRMED or result.solution_size is None:
            continue
        current = best.get(result.instance)
        if current is None or result.solution_size < current:
            best[result.instance] = result.solution_size
    credits: dict[str, int] = {}
    updated = []
    for instance in library:
        new_best = best.get(instance.id)
        improved = new_best is not None and (
            instance.reference_size is None or new_best < instance.reference_size)
        if improved:
            updated.append(replace(instance, reference_size=max(1, new_best)))
            for result in results:
                if (result.instance == instance.id
                        and result.verified is Verified.CONFIRMED
                        and result.solution_size == new_best):
                    credits[result.config] = credits.get(result.config, 0) + 1
        else:
            updated.append(instance)
    return updated, credits


def compute_ranking(results: list[RunResult], library: list[BenchmarkInstance],
                    track: str) -> Ranking:
    """Full ranking: solved, unique, mc-timeouts, quality, new references."""
    ranking = score_solved(results, track)
    references = {i.id: i.reference_size for i in library}
    if track == "synthesis":
        add_quality(ranking, results, references)
        _, credits = update_reference(results, library)
        for config, count in credits.items():
            if config in ranking.rows:
                ranking.rows[config].new_reference = count
    return ranking


# ---------------------------------------------------------------------------
# selection and eligibility

def select_benchmarks(library: list[BenchmarkInstance], per_class: int,
                      seed: int) -> list[BenchmarkInstance]:
    """Same number of benchmarks per class, seed-deterministic.

    Classes at or below the quota are taken whole; larger classes
    contribute a uniform sample of exactly ``per_class`` instances.
    """
    if per_class < 1:
        raise HarnessError("per_class must be at least 1")
    if not library:
        raise HarnessError("cannot select from an empty benchmark library")
    by_class: dict[str, list[BenchmarkInstance]] = {}
    for instance in library:
        by_class.setdefault(instance.category, []).append(instance)
    selected = []
    for category in sorted(by_class):
        members = sorted(by_class[category], key=lambda i: i.id)
        if len(members) <= per_class:
            selected.extend(members)
        else:
            rng = random.Random(f"{seed}/{category}")
            selected.extend(rng.sample(members, per_class))
    selected.sort(key=lambda i: (i.category, i.id))
    return selected


def eligible_for_synthesis(realizability_results: list[RunResult]) -> list[str]:
    """Instances solved by at least one configuration in realizability."""
    eligible = {r.instance for r in realizability_results
                if is_solved(r, "realizability")}
    return sorted(eligible)


# ---------------------------------------------------------------------------
# persistence

def write_csv(results: list[RunResult], references: dict[str, int | None],
              path: str | Path) -> None:
    """Summary table, one row per (configuration, instance), sorted."""
    effective, _ = _effective_references(results, references)
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["config", "instance", "class", "answer", "time_s",
                     "size", "verified", "quality"])
    for result in sorted(results, key=lambda r: (r.config, r.instance)):
        quality = result_quality(result, effective)
        writer.writerow([
            result.config,
            result.instance,
            result.category,
            result.answer.value,
            f"{result.time_s:.3f}",
            "" if result.solution_size is None else result.solution_size,
            result.verified.value,
            "" if quality is None else f"{quality:.3f}",
        ])
    Path(path).write_text(buffer.getvalue())


def format_ranking(ranking: Ranking) -> str:
    """Human-readable ranking table, best configuration first."""
    rows = sorted(ranking.rows.items(),
                  key=lambda item: (-item[1].solved, item[0]))
    lines = [f"{'config':<24} {'solved':>6} {'unique':>6} {'mc-to':>5} "
             f"{'quality':>8} {'avg':>6} {'new-ref':>7}"]
    for name, row in rows:
        lines.append(f"{name:<24} {row.solved:>6} {row.unique:>6} {row.mc_timeout:>5} "
                     f"{row.quality_total:>8.3f} {row.quality_avg:>6.3f} "
                     f"{row.new_reference:>7}")
    return "\n".join(lines)
