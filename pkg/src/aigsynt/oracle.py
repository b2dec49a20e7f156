"""Brute-force reference implementations for tests and acceptance checks.

Everything here enumerates states and input assignments explicitly (with
numpy doing the heavy lifting) and shares nothing with the BDD engine or
the solver beyond the circuit data type.
"""

from __future__ import annotations

import numpy as np

from .aiger import AigerCircuit, InputPartition

MAX_STATE_BITS = 16
_MAX_TABLE_BITS = 26


class OracleLimitError(Exception):
    """State space too large for explicit enumeration."""


def _gate_order(circuit: AigerCircuit) -> list[tuple[int, int, int]]:
    """ANDs in dependency order; raises on a combinational cycle."""
    gates = {lhs: (rhs0, rhs1) for lhs, rhs0, rhs1 in circuit.ands}
    order: list[tuple[int, int, int]] = []
    GRAY, BLACK = 1, 2
    color: dict[int, int] = {}
    for root in gates:
        stack = [root]
        while stack:
            lhs = stack[-1]
            if color.get(lhs) == BLACK:
                stack.pop()
                continue
            rhs0, rhs1 = gates[lhs]
            pending = [d for d in (rhs0 & ~1, rhs1 & ~1)
                       if d in gates and color.get(d) != BLACK]
            if color.get(lhs) == GRAY or not pending:
                color[lhs] = BLACK
                order.append((lhs, rhs0, rhs1))
                stack.pop()
            else:
                color[lhs] = GRAY
                if any(color.get(d) == GRAY for d in pending):
                    raise OracleLimitError("combinational cycle through AND gates")
                stack.extend(pending)
    return order


def step(circuit: AigerCircuit, state: tuple[int, ...],
         inputs: tuple[int, ...]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """One cycle of gate-level simulation: (outputs, next_state)."""
    if len(inputs) != len(circuit.inputs):
        raise ValueError(f"expected {len(circuit.inputs)} input bits, got {len(inputs)}")
    values = {0: 0}
    for lit, bit in zip(circuit.inputs, inputs):
        values[lit] = int(bool(bit))
    for (lit, _), bit in zip(circuit.latches, state):
        values[lit] = int(bool(bit))

    def deref(lit: int) -> int:
        return values[lit & ~1] ^ (lit & 1)

    for lhs, rhs0, rhs1 in _gate_order(circuit):
        values[lhs] = deref(rhs0) & deref(rhs1)
    outputs = tuple(deref(lit) for lit in circuit.outputs)
    next_state = tuple(deref(nxt) for _, nxt in circuit.latches)
    return outputs, next_state


def simulate(circuit: AigerCircuit,
             input_sequence) -> list[tuple[int, ...]]:
    """Cycle-accurate simulation from the all-zero reset state.

    Each element of ``input_sequence`` assigns one bit per input position;
    the result holds one tuple of output bits per step.
    """
    state = tuple(0 for _ in circuit.latches)
    outputs = []
    for assignment in input_sequence:
        outs, state = step(circuit, state, tuple(assignment))
        outputs.append(outs)
    return outputs


def _tables(circuit: AigerCircuit, shifts: dict[int, int],
            total_bits: int) -> dict[int, np.ndarray]:
    """Evaluate every literal over the full assignment grid.

    ``shifts`` places each input/latch-state literal at a bit position of
    the grid index; returned arrays are uint8 over 2**total_bits entries.
    """
    index = np.arange(1 << total_bits, dtype=np.uint32)
    tables: dict[int, np.ndarray] = {
        0: np.zeros(1 << total_bits, dtype=np.uint8)
    }
    for lit, shift in shifts.items():
        tables[lit] = ((index >> shift) & 1).astype(np.uint8)

    def deref(lit: int) -> np.ndarray:
        table = tables[lit & ~1]
        return table ^ 1 if lit & 1 else table

    for lhs, rhs0, rhs1 in _gate_order(circuit):
        tables[lhs] = deref(rhs0) & deref(rhs1)
    tables[1] = tables[0] ^ 1
    return {lit: deref(lit) for lit in
            set(circuit.outputs) | {nxt for _, nxt in circuit.latches}}


def enumerate_solve(circuit: AigerCircuit, partition: InputPartition,
                    max_state_bits: int = MAX_STATE_BITS) -> tuple[bool, frozenset[int]]:
    """Explicit-state attractor computation over all states and inputs.

    Iterates the environment's one-step forcing relation to a fixpoint and
    returns (realizable, winning state codes), where state code bit i is
    latch i.  The controller may react to the current uncontrollable
    inputs, matching the solver's semantics.
    """
    n_latch = len(circuit.latches)
    if n_latch > max_state_bits:
        raise OracleLimitError(f"{n_latch} latches exceed the {max_state_bits}-bit limit")
    if len(circuit.outputs) != 1:
        raise OracleLimitError("explicit solver needs exactly one monitor output")
    u_positions = sorted(partition.uncontrollable)
    c_positions = sorted(partition.controllable)
    n_u, n_c = len(u_positions), len(c_positions)
    total_bits = n_latch + n_u + n_c
    if total_bits > _MAX_TABLE_BITS:
        raise OracleLimitError(f"{total_bits} combined bits exceed the table limit")

    # grid index layout: [latch bits | uncontrollable bits | controllable bits]
    shifts = {}
    for i, (state, _) in enumerate(circuit.latches):
        shifts[state] = n_u + n_c + i
    for j, pos in enumerate(u_positions):
        shifts[circuit.inputs[pos]] = n_c + j
    for j, pos in enumerate(c_positions):
        shifts[circuit.inputs[pos]] = j

    tables = _tables(circuit, shifts, total_bits)
    error = tables[circuit.outputs[0]].astype(bool)
    next_code = np.zeros(1 << total_bits, dtype=np.int64)
    for i, (_, nxt) in enumerate(circuit.latches):
        next_code |= tables[nxt].astype(np.int64) << i

    shape = (1 << n_latch, 1 << n_u, 1 << n_c)
    losing = np.zeros(1 << n_latch, dtype=bool)
    while True:
        forced = error | losing[next_code]
        new = forced.reshape(shape).all(axis=2).any(axis=1) | losing
        if np.array_equal(new, losing):
            break
        losing = new
    winning = ~losing
    return bool(winning[0]), frozenset(np.flatnonzero(winning).tolist())


def explicit_reach(circuit: AigerCircuit,
                   max_state_bits: int = MAX_STATE_BITS) -> tuple[bool, int | None]:
    """Breadth-first reachability from reset over a closed circuit.

    Returns (safe, depth): safe is False iff some reachable state admits an
    input raising the monitor, and depth is the first BFS layer where that
    happens (0 for the reset state itself).
    """
    n_latch = len(circuit.latches)
    n_in = len(circuit.inputs)
    if n_latch > max_state_bits or n_latch + n_in > _MAX_TABLE_BITS:
        raise OracleLimitError("state space too large for explicit reachability")

    shifts = {state: n_in + i for i, (state, _) in enumerate(circuit.latches)}
    shifts.update({lit: j for j, lit in enumerate(circuit.inputs)})
    tables = _tables(circuit, shifts, n_latch + n_in)
    shape = (1 << n_latch, 1 << n_in)
    error = tables[circuit.outputs[0]].astype(bool).reshape(shape)
    next_code = np.zeros(1 << (n_latch + n_in), dtype=np.int64)
    for i, (_, nxt) in enumerate(circuit.latches):
        next_code |= tables[nxt].astype(np.int64) << i
    next_code = next_code.reshape(shape)

    seen = np.zeros(1 << n_latch, dtype=bool)
    frontier = np.zeros(1 << n_latch, dtype=bool)
    frontier[0] = seen[0] = True
    depth = 0
    while frontier.any():
        if error[frontier].any():
            return False, depth
        successors = next_code[frontier].ravel()
        new = np.zeros(1 << n_latch, dtype=bool)
        new[successors] = True
        new &= ~seen
        seen |= new
        frontier = new
        depth += 1
    return True, None
