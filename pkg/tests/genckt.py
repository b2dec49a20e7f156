"""Seeded random circuit and game generators shared by the test suite."""

from __future__ import annotations

import random

from aigsynt.aiger import AigerCircuit, InputPartition


def random_circuit(rng: random.Random, n_inputs: int, n_latches: int,
                   n_ands: int, n_outputs: int = 1,
                   controllable: tuple[int, ...] = ()) -> AigerCircuit:
    """A structurally valid, normalized circuit with random cones."""
    available = [1]
    inputs = tuple(2 * (i + 1) for i in range(n_inputs))
    available += list(inputs)
    states = tuple(2 * (n_inputs + i + 1) for i in range(n_latches))
    available += list(states)

    def pick() -> int:
        return rng.choice(available) ^ rng.randint(0, 1)

    ands = []
    base = n_inputs + n_latches
    for i in range(n_ands):
        lhs = 2 * (base + i + 1)
        rhs0, rhs1 = pick(), pick()
        if rhs0 < rhs1:
            rhs0, rhs1 = rhs1, rhs0
        ands.append((lhs, rhs0, rhs1))
        available.append(lhs)

    latches = tuple((state, pick()) for state in states)
    outputs = tuple(pick() for _ in range(n_outputs))
    symbols = {}
    for pos in range(n_inputs):
        if pos in controllable:
            symbols[("i", pos)] = f"controllable_x{pos}"
        elif rng.random() < 0.5:
            symbols[("i", pos)] = f"in{pos}"
    for pos in range(n_latches):
        if rng.random() < 0.3:
            symbols[("l", pos)] = f"reg{pos}"
    circuit = AigerCircuit(
        max_var=base + n_ands,
        inputs=inputs,
        latches=latches,
        outputs=outputs,
        ands=tuple(ands),
        symbols=symbols,
    )
    circuit.validate()
    return circuit


def scramble(rng: random.Random, circuit: AigerCircuit) -> AigerCircuit:
    """Remap variables to random codes and shuffle gate order.

    The result is semantically identical but (almost surely) not
    normalized; feed it to normalize() and the parsers.
    """
    n_vars = len(circuit.inputs) + len(circuit.latches) + len(circuit.ands)
    codes = rng.sample(range(1, 3 * n_vars + 2), n_vars)
    mapping = {0: 0}
    old_vars = ([lit >> 1 for lit in circuit.inputs]
                + [state >> 1 for state, _ in circuit.latches]
                + [lhs >> 1 for lhs, _, _ in circuit.ands])
    for old, new in zip(old_vars, codes):
        mapping[old] = new

    def relit(lit: int) -> int:
        return 2 * mapping[lit >> 1] + (lit & 1)

    ands = [(relit(lhs), relit(rhs0), relit(rhs1))
            for lhs, rhs0, rhs1 in circuit.ands]
    rng.shuffle(ands)
    scrambled = AigerCircuit(
        max_var=max(codes, default=0),
        inputs=tuple(relit(lit) for lit in circuit.inputs),
        latches=tuple((relit(s), relit(n)) for s, n in circuit.latches),
        outputs=tuple(relit(lit) for lit in circuit.outputs),
        ands=tuple(ands),
        symbols=dict(circuit.symbols),
        comments=circuit.comments,
    )
    scrambled.validate()
    return scrambled


def random_closed_circuit(rng: random.Random, safe_bias: bool = False,
                          max_inputs: int = 3, max_latches: int = 5,
                          max_ands: int = 12) -> AigerCircuit:
    """A monitor circuit for reachability checks; no controllable inputs.

    With ``safe_bias`` the monitor is conjoined with one more random
    literal, which makes unreachable-error instances much more common.
    """
    from dataclasses import replace

    c = random_circuit(rng, rng.randint(1, max_inputs),
                       rng.randint(0, max_latches), rng.randint(1, max_ands))
    if safe_bias:
        extra = rng.choice([lhs for lhs, _, _ in c.ands] or [1]) ^ rng.randint(0, 1)
        lhs = 2 * (c.max_var + 1)
        a, b = max(c.outputs[0], extra), min(c.outputs[0], extra)
        c = replace(c, max_var=c.max_var + 1,
                    ands=c.ands + ((lhs, a, b),), outputs=(lhs,))
    return c


def random_game(rng: random.Random, max_latches: int = 6,
                max_inputs: int = 4) -> tuple[AigerCircuit, InputPartition]:
    """A random monitor circuit with a controllable/uncontrollable split."""
    n_inputs = rng.randint(1, max_inputs)
    n_latches = rng.randint(0, max_latches)
    n_ands = rng.randint(1, 3 * (n_inputs + n_latches) + 2)
    k = rng.randint(0, n_inputs)
    controllable = tuple(rng.sample(range(n_inputs), k))
    circuit = random_circuit(rng, n_inputs, n_latches, n_ands,
                             n_outputs=1, controllable=controllable)
    uncontrollable = frozenset(range(n_inputs)) - frozenset(controllable)
    return circuit, InputPartition(uncontrollable, frozenset(controllable))
