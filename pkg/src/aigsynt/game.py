"""Symbolic safety games over AIGER monitor circuits.

The controller owns the inputs marked controllable and must keep the monitor
output low forever.  Controller moves may depend on the same step's
uncontrollable inputs, so the one-step forcing operator for the environment
quantifies exists-uncontrollable / forall-controllable, in that order.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

from .aiger import AigerCircuit, InputPartition, classify_inputs, is_normalized, normalize
from .bdd import BddManager, DeadlineExceeded, NodeBudgetExceeded, Ref

DEFAULT_NODE_BUDGET = 50_000_000


class GameError(Exception):
    pass


class SolveLimitReached(Exception):
    """Node budget or deadline hit: the verdict is unknown, not unrealizable."""

    def __init__(self, reason: str, iterations: int):
        super().__init__(f"solve gave up ({reason}) after {iterations} iterations")
        self.reason = reason
        self.iterations = iterations


@dataclass
class SafetyGame:
    """Per-latch transition functions plus the monitor condition as BDDs.

    ``u_vars``/``c_vars`` follow the input declaration order restricted to
    each side of the partition; ``state_vars[i]`` and ``next_vars[i]`` are
    the plain and primed variables of latch i (allocated interleaved).
    """

    manager: BddManager
    circuit: AigerCircuit
    partition: InputPartition
    u_positions: tuple[int, ...]
    c_positions: tuple[int, ...]
    u_vars: tuple[int, ...]
    c_vars: tuple[int, ...]
    state_vars: tuple[int, ...]
    next_vars: tuple[int, ...]
    next_fn: tuple[Ref, ...]
    error: Ref
    init: Ref


@dataclass(frozen=True)
class SolveStats:
    peak_nodes: int
    solve_time_s: float


@dataclass(frozen=True)
class GameResult:
    realizable: bool
    winning_region: Ref
    iterations: int
    stats: SolveStats


def build_game(circuit: AigerCircuit, partition: InputPartition | None = None, *,
               node_budget: int | None = DEFAULT_NODE_BUDGET) -> SafetyGame:
    """Translate a monitor circuit into a symbolic safety game.

    The circuit is normalized first if needed.  Exactly one output (the
    monitor) is required; the initial state is the all-zero latch
    assignment per the AIGER reset convention.
    """
    if len(circuit.outputs) != 1:
        raise GameError(f"expected exactly one monitor output, got {len(circuit.outputs)}")
    if partition is None:
        partition = classify_inputs(circuit)
    if not is_normalized(circuit):
        circuit = normalize(circuit)

    manager = BddManager(node_budget=node_budget)
    u_positions = tuple(sorted(partition.uncontrollable))
    c_positions = tuple(sorted(partition.controllable))

    def input_name(pos: int) -> str:
        return circuit.symbols.get(("i", pos), f"i{pos}")

    u_vars = tuple(manager.add_var(f"u:{input_name(p)}") for p in u_positions)
    c_vars = tuple(manager.add_var(f"c:{input_name(p)}") for p in c_positions)
    state_vars = []
    next_vars = []
    for i in range(len(circuit.latches)):
        name = circuit.symbols.get(("l", i), f"l{i}")
        state_vars.append(manager.add_var(f"s:{name}"))
        next_vars.append(manager.add_var(f"s':{name}"))

    # translate AND cones; memoized per gate, in topological (normalized) order
    table: dict[int, Ref] = {0: manager.false}
    for pos, var in zip(u_positions, u_vars):
        table[circuit.inputs[pos]] = manager.var(var)
    for pos, var in zip(c_positions, c_vars):
        table[circuit.inputs[pos]] = manager.var(var)
    for (state, _), var in zip(circuit.latches, state_vars):
        table[state] = manager.var(var)

    def deref(lit: int) -> Ref:
        ref = table[lit & ~1]
        return ~ref if lit & 1 else ref

    for lhs, rhs0, rhs1 in circuit.ands:
        table[lhs] = deref(rhs0) & deref(rhs1)

    init = manager.true
    for var in state_vars:
        init = init & ~manager.var(var)

    return SafetyGame(
        manager=manager,
        circuit=circuit,
        partition=partition,
        u_positions=u_positions,
        c_positions=c_positions,
        u_vars=u_vars,
        c_vars=c_vars,
        state_vars=tuple(state_vars),
        next_vars=tuple(next_vars),
        next_fn=tuple(deref(nxt) for _, nxt in circuit.latches),
        error=deref(circuit.outputs[0]),
        init=init,
    )


def _next_substitution(game: SafetyGame) -> dict[int, Ref]:
    return dict(zip(game.state_vars, game.next_fn))


def upre(game: SafetyGame, states: Ref) -> Ref:
    """Uncontrollable predecessors of ``states``.

    { x | exists u, forall c:  error(x,u,c) or next(x,u,c) in states } --
    the set from which the environment forces error-or-states in one step.
    """
    m = game.manager
    step = m.compose(states, _next_substitution(game)) | game.error
    step = m.forall(step, game.c_vars)
    return m.exists(step, game.u_vars)


def cpre(game: SafetyGame, states: Ref) -> Ref:
    """Controllable predecessors: forall u, exists c staying safe in states."""
    m = game.manager
    step = m.compose(states, _next_substitution(game)) & ~game.error
    step = m.exists(step, game.c_vars)
    return m.forall(step, game.u_vars)


def solve(game: SafetyGame, *, deadline_s: float | None = None,
          early_exit: bool = False) -> GameResult:
    """Decide the game by the backward fixpoint on the losing side.

    The losing set is the least fixpoint of L -> L | upre(L); the winning
    region is its complement.  With ``early_exit`` the iteration stops as
    soon as the initial state becomes losing (the verdict is unchanged but
    the reported region may then overapproximate the true winning set).

    Raises SolveLimitReached on node-budget or deadline exhaustion; that is
    an unknown verdict, distinct from unrealizable.
    """
    m = game.manager
    start = m.clock()
    wall_start = time.monotonic()
    if deadline_s is not None:
        m.deadline = start + deadline_s
    zero_state = {var: False for var in game.state_vars}
    losing = m.false
    iterations = 0
    retried = False
    try:
        while True:
            if m.deadline is not None and m.clock() > m.deadline:
                raise SolveLimitReached("deadline", iterations)
            try:
                new = losing | upre(game, losing)
            except NodeBudgetExceeded:
                if retried:
                    raise SolveLimitReached("node-budget", iterations) from None
                retried = True
                roots = [losing, game.error, game.init, *game.next_fn]
                m.collect(roots)
                continue
            except DeadlineExceeded:
                raise SolveLimitReached("deadline", iterations) from None
            retried = False
            iterations += 1
            if new == losing:
                break
            losing = new
            if early_exit and m.eval(losing, zero_state):
                break
    finally:
        m.deadline = None

    realizable = not m.eval(losing, zero_state)
    stats = SolveStats(peak_nodes=m.peak_nodes,
                       solve_time_s=time.monotonic() - wall_start)
    return GameResult(realizable=realizable, winning_region=~losing,
                      iterations=iterations, stats=stats)
