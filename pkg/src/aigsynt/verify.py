"""Independent confirmation of synthesized solutions.

Solutions carrying an inductive-invariant output get a fast three-condition
check; otherwise the combined closed circuit is model checked by forward
BDD reachability.  The verifier builds its own manager and its own
circuit-to-BDD translation, sharing no state with the solver.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from .aiger import AigerCircuit, classify_inputs, normalize
from .bdd import BddManager, DeadlineExceeded, Ref
from .synth import INVARIANT_SYMBOL

DEFAULT_MC_DEADLINE_S = 3600.0


class CombineError(Exception):
    pass


@dataclass(frozen=True)
class Accept:
    """All three invariant conditions hold."""


@dataclass(frozen=True)
class Reject:
    reason: str
    state: dict[int, bool] = field(default_factory=dict)
    inputs: dict[int, bool] = field(default_factory=dict)


@dataclass(frozen=True)
class Safe:
    iterations: int


@dataclass(frozen=True)
class Unsafe:
    trace: tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class Timeout:
    elapsed_s: float


def combine(spec: AigerCircuit, solution: AigerCircuit) -> AigerCircuit:
    """Check that the solution closes the spec and return the closed circuit.

    The solution must contain every spec gate and latch unchanged, keep the
    monitor at output 0, expose exactly the spec's uncontrollable inputs,
    and define every controllable input internally.  Containment is checked
    against the spec's canonical (normalized) numbering, which is what
    solutions are built on.
    """
    spec = normalize(spec)
    partition = classify_inputs(spec)
    unc_lits = {spec.inputs[p] for p in partition.uncontrollable}
    if set(solution.inputs) != unc_lits:
        raise CombineError(
            "input-set mismatch: solution inputs must be exactly the spec's "
            f"uncontrollable inputs {sorted(unc_lits)}, got {sorted(solution.inputs)}")
    missing_gates = set(spec.ands) - set(solution.ands)
    if missing_gates:
        raise CombineError(f"solution omits spec gate {sorted(missing_gates)[0]}")
    missing_latches = set(spec.latches) - set(solution.latches)
    if missing_latches:
        raise CombineError(f"solution omits spec latch {sorted(missing_latches)[0]}")
    if not solution.outputs or not spec.outputs or solution.outputs[0] != spec.outputs[0]:
        raise CombineError("missing monitor output at index 0")
    defined = {lhs for lhs, _, _ in solution.ands} | {s for s, _ in solution.latches}
    for pos in sorted(partition.controllable):
        if spec.inputs[pos] not in defined:
            raise CombineError(
                f"controllable input {spec.inputs[pos]} is left undefined in the solution")
    solution.validate()
    return solution


def _translate(circuit: AigerCircuit, leaves: dict[int, Ref],
               manager: BddManager) -> dict[int, Ref]:
    """Cone-of-influence translation of every defined literal to a BDD.

    Works on any acyclic gate order (solutions are not normalized).
    """
    table = dict(leaves)
    table[0] = manager.false
    gates = {lhs: (rhs0, rhs1) for lhs, rhs0, rhs1 in circuit.ands}

    def deref(lit: int) -> Ref:
        ref = table[lit & ~1]
        return ~ref if lit & 1 else ref

    expanding: set[int] = set()
    for root in gates:
        stack = [root]
        while stack:
            lhs = stack[-1]
            if lhs in table:
                stack.pop()
                continue
            rhs0, rhs1 = gates[lhs]
            pending = []
            for r in (rhs0, rhs1):
                dep = r & ~1
                if dep in table:
                    continue
                if dep not in gates:
                    raise CombineError(f"literal {dep} is undefined")
                pending.append(dep)
            if lhs in expanding or not pending:
                table[lhs] = deref(rhs0) & deref(rhs1)
                expanding.discard(lhs)
                stack.pop()
            else:
                expanding.add(lhs)
                if any(d in expanding for d in pending):
                    raise CombineError("combinational cycle through AND gates")
                stack.extend(pending)
    return table


def _setup(circuit: AigerCircuit, manager: BddManager, with_primed: bool):
    """Allocate inputs then (state, primed) pairs; translate all cones."""
    input_vars = tuple(manager.add_var(f"i{pos}") for pos in range(len(circuit.inputs)))
    state_vars = []
    next_vars = []
    for i in range(len(circuit.latches)):
        state_vars.append(manager.add_var(f"l{i}"))
        if with_primed:
            next_vars.append(manager.add_var(f"l{i}'"))
    leaves = {lit: manager.var(v) for lit, v in zip(circuit.inputs, input_vars)}
    leaves.update({state: manager.var(v)
                   for (state, _), v in zip(circuit.latches, state_vars)})
    table = _translate(circuit, leaves, manager)

    def deref(lit: int) -> Ref:
        ref = table[lit & ~1]
        return ~ref if lit & 1 else ref

    return input_vars, tuple(state_vars), tuple(next_vars), deref


def find_invariant_output(circuit: AigerCircuit) -> int | None:
    for pos in range(1, len(circuit.outputs)):
        if circuit.symbols.get(("o", pos)) == INVARIANT_SYMBOL:
            return pos
    return None


def check_invariant(combined: AigerCircuit, inv_output: int) -> Accept | Reject:
    """Three-condition inductive check of a supplied invariant output.

    Accept iff the invariant (a) holds at reset, (b) rules out raising the
    monitor under any input, and (c) is closed under the transition.  A
    Reject carries the failed condition and a counterexample cube over
    latch positions and input positions (missing entries are don't-cares).
    """
    manager = BddManager()
    input_vars, state_vars, _, deref = _setup(combined, manager, with_primed=False)
    error = deref(combined.outputs[0])
    invariant = deref(combined.outputs[inv_output])

    input_set = set(input_vars)
    if manager.support(invariant) & input_set:
        return Reject(reason="invariant depends on inputs")

    state_pos = {v: i for i, v in enumerate(state_vars)}
    input_pos = {v: i for i, v in enumerate(input_vars)}

    def cube_of(ref: Ref) -> tuple[dict[int, bool], dict[int, bool]]:
        cube = manager.pick_cube(ref) or {}
        state = {state_pos[v]: b for v, b in cube.items() if v in state_pos}
        inp = {input_pos[v]: b for v, b in cube.items() if v in input_pos}
        return state, inp

    zero = {v: False for v in state_vars}
    if not manager.eval(invariant, zero):
        return Reject(reason="reset state outside invariant")

    overlap = invariant & error
    if overlap != manager.false:
        state, inp = cube_of(overlap)
        return Reject(reason="error reachable inside invariant", state=state, inputs=inp)

    next_fns = {v: deref(nxt) for v, (_, nxt) in zip(state_vars, combined.latches)}
    escape = invariant & ~manager.compose(invariant, next_fns)
    if escape != manager.false:
        state, inp = cube_of(escape)
        return Reject(reason="invariant not inductive", state=state, inputs=inp)
    return Accept()


def model_check(combined: AigerCircuit, *,
                deadline_s: float = DEFAULT_MC_DEADLINE_S) -> Safe | Unsafe | Timeout:
    """Forward BDD reachability from reset on a closed circuit.

    Safe iff no reachable state/input pair raises the monitor; Unsafe comes
    with a shortest-by-iteration input trace, one assignment per step.
    """
    start = time.monotonic()
    manager = BddManager()
    manager.deadline = start + deadline_s
    try:
        input_vars, state_vars, next_vars, deref = _setup(combined, manager,
                                                          with_primed=True)
        error = deref(combined.outputs[0])
        next_fns = [deref(nxt) for _, nxt in combined.latches]

        transition = manager.true
        for primed, fn in zip(next_vars, next_fns):
            transition = transition & manager.var(primed).equiv(fn)
        unprime = {p: manager.var(s) for p, s in zip(next_vars, state_vars)}
        quantified = list(state_vars) + list(input_vars)

        init = manager.true
        for v in state_vars:
            init = init & ~manager.var(v)
        layers = [init]
        reached = init
        while True:
            if time.monotonic() > manager.deadline:
                return Timeout(elapsed_s=time.monotonic() - start)
            frontier = layers[-1]
            if frontier & error != manager.false:
                trace = _extract_trace(manager, layers, error, next_fns,
                                       state_vars, input_vars)
                return Unsafe(trace=trace)
            image = manager.exists(frontier & transition, quantified)
            image = manager.compose(image, unprime)
            new = image & ~reached
            if new == manager.false:
                return Safe(iterations=len(layers))
            reached = reached | new
            layers.append(new)
    except DeadlineExceeded:
        return Timeout(elapsed_s=time.monotonic() - start)
    finally:
        manager.deadline = None


def _extract_trace(manager: BddManager, layers: list[Ref], error: Ref,
                   next_fns: list[Ref], state_vars: tuple[int, ...],
                   input_vars: tuple[int, ...]) -> tuple[tuple[int, ...], ...]:
    """Walk the onion rings backwards; unassigned cube bits default to 0."""
    def split(cube: dict[int, bool]) -> tuple[tuple[int, ...], tuple[int, ...]]:
        state = tuple(int(cube.get(v, False)) for v in state_vars)
        inputs = tuple(int(cube.get(v, False)) for v in input_vars)
        return state, inputs

    k = len(layers) - 1
    state, inputs = split(manager.pick_cube(layers[k] & error) or {})
    steps = [inputs]
    for j in range(k - 1, -1, -1):
        hit = manager.true
        for bit, fn in zip(state, next_fns):
            hit = hit & (fn if bit else ~fn)
        state, inputs = split(manager.pick_cube(layers[j] & hit) or {})
        steps.append(inputs)
    steps.reverse()
    return tuple(steps)


def verify_solution(spec: AigerCircuit, solution: AigerCircuit, *,
                    deadline_s: float = DEFAULT_MC_DEADLINE_S):
    """Full verification pipeline for one (spec, solution) pair.

    Runs the fast invariant check when the solution supplies one; a Reject
    is not authoritative, so it falls back to full model checking.  Returns
    Accept, Safe, Unsafe or Timeout; combine() errors propagate.
    """
    combined = combine(spec, solution)
    inv_output = find_invariant_output(combined)
    if inv_output is not None:
        result = check_invariant(combined, inv_output)
        if isinstance(result, Accept):
            return result
    return model_check(combined, deadline_s=deadline_s)


def format_trace(trace: tuple[tuple[int, ...], ...]) -> str:
    """One line of input bits per step, reset state implied."""
    return "\n".join("".join(str(bit) for bit in step) for step in trace)
