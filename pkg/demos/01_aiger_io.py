"""Reading, writing and normalizing AIGER monitor circuits.

Run from the repository root:  python3 demos/01_aiger_io.py
"""

from aigsynt import aiger

TEXT = """\
aag 4 2 1 1 1
2
4
6 8
6
8 2 5
i0 request
i1 controllable_grant
l0 pending
o0 monitor
"""

print("A tiny monitor circuit in the ascii profile:")
print(TEXT)

circuit = aiger.parse_ascii(TEXT)
print(f"max_var={circuit.max_var}, {len(circuit.inputs)} inputs, "
      f"{len(circuit.latches)} latches, {len(circuit.ands)} AND gates")

partition = aiger.classify_inputs(circuit)
print(f"uncontrollable input positions: {sorted(partition.uncontrollable)}")
print(f"controllable input positions:   {sorted(partition.controllable)}")
print("(the controllable_ symbol prefix decides; unnamed inputs belong to "
      "the environment)")

# The gate (8, 2, 5) has its operands out of canonical order; normalization
# renumbers variables and sorts operands so the binary profile can be used.
normalized = aiger.normalize(circuit)
print("\nnormalized gate list:", normalized.ands)

binary = aiger.write_binary(normalized)
print(f"binary encoding: {len(binary)} bytes, header {binary[:14]!r}")
assert aiger.parse_binary(binary) == normalized
assert aiger.parse_ascii(aiger.write_ascii(normalized)) == normalized
print("round-trips through both profiles reproduce the circuit exactly")
