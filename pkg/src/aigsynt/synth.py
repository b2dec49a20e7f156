"""Winning-strategy extraction and encoding as an AIGER solution circuit.

The solution contains the full specification circuit unchanged; every
controllable input is re-defined as an AND cone computing its decision
function over latch states and uncontrollable inputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .aiger import TRUE, AigerCircuit, CircuitBuilder, negate
from .bdd import Ref
from .game import SafetyGame

INVARIANT_SYMBOL = "invariant"


class SynthError(Exception):
    pass


@dataclass
class Strategy:
    """Deterministic decision function per controllable input.

    ``decision`` maps the input position to a function over state and
    uncontrollable-input variables; ``invariant`` is the winning region,
    an inductive certificate for the encoded solution.
    """

    game: SafetyGame
    decision: dict[int, Ref]
    invariant: Ref


def extract_strategy(game: SafetyGame, winning: Ref) -> Strategy:
    """Determinize the safe-move relation, one controllable input at a time.

    The relation M(x,u,c) holds where the move avoids the error and stays in
    the winning region.  For each controllable input, in declaration order,
    the decision is the set of (x,u) where setting it is forced (possible
    positively, impossible negatively); everywhere else the don't-care
    resolves to constant 0.  The chosen function is substituted back into M
    before the next input is processed.
    """
    m = game.manager
    if not m.eval(winning, {var: False for var in game.state_vars}):
        raise SynthError("cannot extract a strategy from an unrealizable game")

    moves = ~game.error & m.compose(winning, dict(zip(game.state_vars, game.next_fn)))
    decision: dict[int, Ref] = {}
    for i, (pos, var) in enumerate(zip(game.c_positions, game.c_vars)):
        rest = game.c_vars[i + 1:]
        can_set = m.exists(m.cofactor(moves, {var: True}), rest)
        can_clear = m.exists(m.cofactor(moves, {var: False}), rest)
        chosen = can_set & ~can_clear
        decision[pos] = chosen
        moves = m.compose(moves, {var: chosen})
    return Strategy(game=game, decision=decision, invariant=winning)


def bdd_to_aig(function: Ref, builder: CircuitBuilder,
               var_to_lit: Mapping[int, int]) -> int:
    """Expand a BDD into AND gates, one multiplexer per decision node.

    Shared BDD nodes yield shared gates; the builder's peephole removes
    the multiplexer entirely for terminal and single-variable shapes.
    Every support variable must be mapped to an existing literal.
    """
    m = function.manager
    memo: dict[int, int] = {}

    def convert(ref: Ref) -> int:
        u = ref.node
        if abs(u) == 1:
            lit = TRUE
        else:
            lit = memo.get(abs(u))
            if lit is None:
                var, low, high = m.destructure(ref)
                try:
                    var_lit = var_to_lit[var]
                except KeyError:
                    raise SynthError(
                        f"strategy references unmapped variable {m.var_name(var)}"
                    ) from None
                low_lit = convert(low)
                high_lit = convert(high)
                hi_and = builder.and_(var_lit, high_lit)
                lo_and = builder.and_(negate(var_lit), low_lit)
                lit = negate(builder.and_(negate(hi_and), negate(lo_and)))
                memo[abs(u)] = lit
        return negate(lit) if u < 0 else lit

    return convert(function)


def _spec_var_map(spec: AigerCircuit, game: SafetyGame) -> dict[int, int]:
    if len(spec.inputs) != len(game.circuit.inputs) or \
            len(spec.latches) != len(game.circuit.latches):
        raise SynthError("strategy references variables absent from the spec")
    var_to_lit = {var: spec.inputs[pos]
                  for pos, var in zip(game.u_positions, game.u_vars)}
    for (state, _), var in zip(spec.latches, game.state_vars):
        var_to_lit[var] = state
    return var_to_lit


def encode_solution(spec: AigerCircuit, strategy: Strategy) -> AigerCircuit:
    """Embed the strategy into the spec as a solution circuit.

    The result keeps every gate, latch, symbol and the monitor output of the
    spec; controllable inputs disappear from the input list and are defined
    by one wiring gate each on top of the decision cones.  The solution's
    size for quality ranking is its AND-gate count.
    """
    game = strategy.game
    partition = game.partition
    if set(strategy.decision) != set(partition.controllable):
        raise SynthError("strategy does not cover every controllable input")
    var_to_lit = _spec_var_map(spec, game)

    builder = CircuitBuilder(spec)
    for pos in sorted(strategy.decision):
        fn_lit = bdd_to_aig(strategy.decision[pos], builder, var_to_lit)
        builder.define(spec.inputs[pos], fn_lit)

    kept = sorted(partition.uncontrollable)
    symbols = {key: name for key, name in spec.symbols.items() if key[0] != "i"}
    for new_pos, old_pos in enumerate(kept):
        name = spec.symbols.get(("i", old_pos))
        if name is not None:
            symbols[("i", new_pos)] = name

    return builder.build(
        inputs=tuple(spec.inputs[p] for p in kept),
        latches=spec.latches,
        outputs=(spec.outputs[0],),
        symbols=symbols,
        comments=spec.comments,
    )


def emit_invariant(strategy: Strategy, solution: AigerCircuit) -> AigerCircuit:
    """Append the winning region as an extra output named ``invariant``.

    The monitor stays at output index 0; the certificate lands at index 1
    and enables the verifier's fast inductive check.
    """
    game = strategy.game
    builder = CircuitBuilder(solution)
    var_to_lit = {var: state
                  for (state, _), var in zip(solution.latches, game.state_vars)}
    inv_lit = bdd_to_aig(strategy.invariant, builder, var_to_lit)
    symbols = dict(solution.symbols)
    symbols[("o", len(solution.outputs))] = INVARIANT_SYMBOL
    return builder.build(
        inputs=solution.inputs,
        latches=solution.latches,
        outputs=solution.outputs + (inv_lit,),
        symbols=symbols,
        comments=solution.comments,
    )


def solution_size(solution: AigerCircuit) -> int:
    """Gate count used by the quality ranking."""
    return len(solution.ands)
