"""Safety-game realizability, synthesis, verification and benchmarking
for AIGER monitor circuits."""

__version__ = "0.1.0"

from .aiger import (  # noqa: F401
    AigerCircuit,
    AigerError,
    AigerParseError,
    InputPartition,
    classify_inputs,
    load,
    normalize,
    parse_ascii,
    parse_binary,
    save,
    write_ascii,
    write_binary,
)
from .bdd import BddManager, Ref  # noqa: F401
from .game import GameResult, SafetyGame, build_game, cpre, solve, upre  # noqa: F401
from .synth import Strategy, bdd_to_aig, encode_solution, emit_invariant, extract_strategy  # noqa: F401
from .verify import check_invariant, combine, model_check, verify_solution  # noqa: F401
