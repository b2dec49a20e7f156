"""Reading, writing and normalizing AIGER circuits (ascii and binary).

Literals follow the AIGER convention: a non-negative integer ``2*var + sign``
where 0 is constant false and 1 constant true.  Circuits are immutable; every
function here returns a new circuit and never mutates its argument.
"""

from __future__ import annotations

import heapq
import warnings
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Mapping

FALSE = 0
TRUE = 1

#: Case-sensitive symbol-name prefix marking an input as controllable.
CONTROLLABLE_PREFIX = "controllable_"


def negate(lit: int) -> int:
    """Negation flips the least significant bit."""
    return lit ^ 1


def is_negated(lit: int) -> bool:
    return bool(lit & 1)


def var_of(lit: int) -> int:
    return lit >> 1


def lit_of(var: int, sign: bool = False) -> int:
    return 2 * var + int(sign)


class AigerError(Exception):
    """Malformed circuit or unsupported feature."""


class AigerParseError(AigerError):
    """Syntax or range error in an AIGER file, with a 1-based line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class AigerCircuit:
    """An and-inverter graph with latches, outputs, symbols and comments.

    ``symbols`` maps ``(kind, position)`` to a name, where kind is one of
    ``'i'``, ``'l'``, ``'o'`` and position indexes the respective section.
    """

    max_var: int
    inputs: tuple[int, ...] = ()
    latches: tuple[tuple[int, int], ...] = ()
    outputs: tuple[int, ...] = ()
    ands: tuple[tuple[int, int, int], ...] = ()
    symbols: Mapping[tuple[str, int], str] = field(default_factory=dict)
    comments: tuple[str, ...] = ()

    def validate(self) -> None:
        """Raise AigerError unless the structural invariants hold."""
        defined: dict[int, str] = {}
        for lit in self.inputs:
            _check_definition(lit, "input", defined, self.max_var)
        for state, _ in self.latches:
            _check_definition(state, "latch", defined, self.max_var)
        for lhs, _, _ in self.ands:
            _check_definition(lhs, "and", defined, self.max_var)
        for _, nxt in self.latches:
            self._check_ref(nxt, defined)
        for lit in self.outputs:
            self._check_ref(lit, defined)
        for _, rhs0, rhs1 in self.ands:
            self._check_ref(rhs0, defined)
            self._check_ref(rhs1, defined)
        counts = {"i": len(self.inputs), "l": len(self.latches), "o": len(self.outputs)}
        for (kind, pos) in self.symbols:
            if kind not in counts or not 0 <= pos < counts[kind]:
                raise AigerError(f"symbol {kind}{pos} does not match any {kind!r} entry")

    def _check_ref(self, lit: int, defined: Mapping[int, str]) -> None:
        if lit < 0 or lit > 2 * self.max_var + 1:
            raise AigerError(f"literal {lit} out of range (max_var={self.max_var})")
        var = var_of(lit)
        if var != 0 and 2 * var not in defined:
            raise AigerError(f"literal {lit} references undefined variable {var}")


def _check_definition(lit: int, kind: str, defined: dict[int, str], max_var: int) -> None:
    if lit <= 1 or lit & 1:
        raise AigerError(f"{kind} literal {lit} must be an even positive integer")
    if lit > 2 * max_var + 1:
        raise AigerError(f"{kind} literal {lit} out of range (max_var={max_var})")
    if lit in defined:
        raise AigerError(f"variable {var_of(lit)} defined twice ({defined[lit]} and {kind})")
    defined[lit] = kind


@dataclass(frozen=True)
class InputPartition:
    """Disjoint split of input positions into environment and controller."""

    uncontrollable: frozenset[int]
    controllable: frozenset[int]


def classify_inputs(circuit: AigerCircuit) -> InputPartition:
    """Partition inputs by the controllable_ symbol-name prefix.

    Inputs without a symbol entry default to uncontrollable; the prefix
    match is case-sensitive.
    """
    controllable = set()
    for pos in range(len(circuit.inputs)):
        name = circuit.symbols.get(("i", pos))
        if name is not None and name.startswith(CONTROLLABLE_PREFIX):
            controllable.add(pos)
    uncontrollable = set(range(len(circuit.inputs))) - controllable
    return InputPartition(frozenset(uncontrollable), frozenset(controllable))


# ---------------------------------------------------------------------------
# parsing

def parse_ascii(text: str) -> AigerCircuit:
    """Parse the ascii (``aag``) profile."""
    return _parse_lines(text.encode("utf-8"), binary=False)


def parse_binary(data: bytes) -> AigerCircuit:
    """Parse the binary (``aig``) profile with varint-delta AND encoding."""
    return _parse_lines(data, binary=True)


def parse(data: bytes) -> AigerCircuit:
    """Parse either profile, dispatching on the header token."""
    if data.startswith(b"aig "):
        return parse_binary(data)
    return _parse_lines(data, binary=False)


def load(path: str | Path) -> AigerCircuit:
    return parse(Path(path).read_bytes())


class _Reader:
    """Cursor over raw bytes, tracking line numbers for diagnostics."""

    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0
        self.line = 0

    def next_line(self, what: str) -> str:
        if self.pos >= len(self.data):
            raise AigerParseError(f"truncated file: expected {what}", self.line + 1)
        end = self.data.find(b"\n", self.pos)
        if end < 0:
            end = len(self.data)
        raw = self.data[self.pos:end]
        self.pos = end + 1
        self.line += 1
        try:
            return raw.decode("utf-8")
        except UnicodeDecodeError:
            raise AigerParseError(f"non-UTF-8 bytes in {what}", self.line) from None

    def next_varint(self) -> int:
        value = 0
        shift = 0
        while True:
            if self.pos >= len(self.data):
                raise AigerParseError("truncated varint in AND section", self.line + 1)
            byte = self.data[self.pos]
            self.pos += 1
            value |= (byte & 0x7F) << shift
            if not byte & 0x80:
                return value
            shift += 7

    def rest_lines(self) -> list[str]:
        out = []
        while self.pos < len(self.data):
            out.append(self.next_line("symbol or comment"))
        return out


def _parse_ints(reader: _Reader, what: str, expected: tuple[int, ...]) -> list[int]:
    lineno = reader.line + 1
    tokens = reader.next_line(what).split()
    if len(tokens) not in expected:
        raise AigerParseError(f"{what}: expected {' or '.join(map(str, expected))} fields, "
                              f"got {len(tokens)}", lineno)
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise AigerParseError(f"{what}: non-integer field", lineno) from None


def _parse_lines(data: bytes, binary: bool) -> AigerCircuit:
    reader = _Reader(data)
    header = reader.next_line("header").split()
    magic = "aig" if binary else "aag"
    if len(header) < 6 or header[0] != magic:
        raise AigerParseError(f"malformed header, expected '{magic} M I L O A'", 1)
    try:
        counts = [int(t) for t in header[1:]]
    except ValueError:
        raise AigerParseError("malformed header: non-integer field", 1) from None
    if len(counts) > 9 or any(n < 0 for n in counts):
        raise AigerParseError("malformed header", 1)
    counts += [0] * (9 - len(counts))
    m, n_in, n_latch, n_out, n_and, n_bad, n_con, n_just, n_fair = counts
    if n_just or n_fair:
        raise AigerParseError("justice/fairness sections are not supported", 1)
    if binary and m != n_in + n_latch + n_and:
        raise AigerParseError(f"binary header requires M = I+L+A, got M={m}", 1)

    def check_lit(lit: int, lineno: int) -> int:
        if lit < 0 or lit > 2 * m + 1:
            raise AigerParseError(f"literal {lit} out of range (max_var={m})", lineno)
        return lit

    inputs = []
    for i in range(n_in):
        if binary:
            inputs.append(2 * (i + 1))
        else:
            lineno = reader.line + 1
            (lit,) = _parse_ints(reader, f"input {i}", (1,))
            inputs.append(check_lit(lit, lineno))

    latches = []
    for i in range(n_latch):
        lineno = reader.line + 1
        fields = _parse_ints(reader, f"latch {i}", (2, 3) if not binary else (1, 2))
        if binary:
            state = 2 * (n_in + i + 1)
            nxt, reset = fields[0], (fields[1] if len(fields) > 1 else 0)
        else:
            state, nxt = fields[0], fields[1]
            reset = fields[2] if len(fields) > 2 else 0
        if reset != 0:
            raise AigerParseError("only all-zero latch resets are supported", lineno)
        latches.append((check_lit(state, lineno), check_lit(nxt, lineno)))

    outputs = []
    for i in range(n_out):
        lineno = reader.line + 1
        (lit,) = _parse_ints(reader, f"output {i}", (1,))
        outputs.append(check_lit(lit, lineno))

    if n_bad or n_con:
        warnings.warn(f"ignoring {n_bad} bad and {n_con} constraint properties", stacklevel=3)
        for i in range(n_bad + n_con):
            _parse_ints(reader, "bad/constraint", (1,))

    ands = []
    if binary:
        for i in range(n_and):
            lhs = 2 * (n_in + n_latch + i + 1)
            delta0 = reader.next_varint()
            delta1 = reader.next_varint()
            rhs0 = lhs - delta0
            rhs1 = rhs0 - delta1
            if delta0 == 0 or rhs1 < 0:
                raise AigerParseError(
                    f"AND {lhs}: delta underflow (rhs0={rhs0}, rhs1={rhs1})", reader.line + 1)
            ands.append((lhs, rhs0, rhs1))
    else:
        seen = set()
        for i in range(n_and):
            lineno = reader.line + 1
            lhs, rhs0, rhs1 = (check_lit(x, lineno)
                               for x in _parse_ints(reader, f"AND {i}", (3,)))
            if lhs <= 1 or lhs & 1:
                raise AigerParseError(f"AND lhs {lhs} must be even and positive", lineno)
            if lhs in seen:
                raise AigerParseError(f"duplicate AND definition for literal {lhs}", lineno)
            seen.add(lhs)
            ands.append((lhs, rhs0, rhs1))

    symbols: dict[tuple[str, int], str] = {}
    comments: list[str] = []
    in_comments = False
    first_tail_line = reader.line + 1
    for offset, line in enumerate(reader.rest_lines()):
        if in_comments:
            comments.append(line)
            continue
        if line == "c":
            in_comments = True
            continue
        kind, rest = line[:1], line[1:]
        pos_str, _, name = rest.partition(" ")
        if kind in "ilobc" and pos_str.isdigit():
            if kind in "bc":
                continue  # symbol for a skipped section
            symbols[(kind, int(pos_str))] = name
        else:
            raise AigerParseError(f"malformed symbol line {line!r}", first_tail_line + offset)

    circuit = AigerCircuit(
        max_var=m,
        inputs=tuple(inputs),
        latches=tuple(latches),
        outputs=tuple(outputs),
        ands=tuple(ands),
        symbols=symbols,
        comments=tuple(comments),
    )
    try:
        circuit.validate()
    except AigerError as exc:
        raise AigerParseError(str(exc), reader.line) from None
    return circuit


# ---------------------------------------------------------------------------
# writing

def _symbol_lines(circuit: AigerCircuit) -> Iterable[str]:
    for kind, count in (("i", len(circuit.inputs)),
                        ("l", len(circuit.latches)),
                        ("o", len(circuit.outputs))):
        for pos in range(count):
            name = circuit.symbols.get((kind, pos))
            if name is not None:
                yield f"{kind}{pos} {name}"


def write_ascii(circuit: AigerCircuit) -> str:
    """Serialize to the ascii profile; deterministic byte-for-byte."""
    circuit.validate()
    lines = [f"aag {circuit.max_var} {len(circuit.inputs)} {len(circuit.latches)}"
             f" {len(circuit.outputs)} {len(circuit.ands)}"]
    lines.extend(str(lit) for lit in circuit.inputs)
    lines.extend(f"{state} {nxt}" for state, nxt in circuit.latches)
    lines.extend(str(lit) for lit in circuit.outputs)
    lines.extend(f"{lhs} {rhs0} {rhs1}" for lhs, rhs0, rhs1 in circuit.ands)
    lines.extend(_symbol_lines(circuit))
    if circuit.comments:
        lines.append("c")
        lines.extend(circuit.comments)
    return "\n".join(lines) + "\n"


def write_binary(circuit: AigerCircuit) -> bytes:
    """Serialize to the binary profile; requires a normalized circuit."""
    circuit.validate()
    if not is_normalized(circuit):
        raise AigerError("write_binary requires a normalized circuit")
    out = bytearray()
    out += (f"aig {circuit.max_var} {len(circuit.inputs)} {len(circuit.latches)}"
            f" {len(circuit.outputs)} {len(circuit.ands)}\n").encode()
    for _, nxt in circuit.latches:
        out += f"{nxt}\n".encode()
    for lit in circuit.outputs:
        out += f"{lit}\n".encode()
    for lhs, rhs0, rhs1 in circuit.ands:
        for delta in (lhs - rhs0, rhs0 - rhs1):
            while delta & ~0x7F:
                out.append((delta & 0x7F) | 0x80)
                delta >>= 7
            out.append(delta)
    for line in _symbol_lines(circuit):
        out += line.encode() + b"\n"
    if circuit.comments:
        out += b"c\n"
        for line in circuit.comments:
            out += line.encode() + b"\n"
    return bytes(out)


def save(circuit: AigerCircuit, path: str | Path, binary: bool | None = None) -> None:
    """Write a circuit to disk; ``.aig`` paths default to the binary profile."""
    path = Path(path)
    if binary is None:
        binary = path.suffix == ".aig"
    if binary:
        path.write_bytes(write_binary(circuit))
    else:
        path.write_text(write_ascii(circuit))


# ---------------------------------------------------------------------------
# normalization

def is_normalized(circuit: AigerCircuit) -> bool:
    """True iff variables are consecutive (inputs, latches, ANDs) and each
    AND has lhs > rhs0 >= rhs1."""
    n_in, n_latch = len(circuit.inputs), len(circuit.latches)
    if circuit.max_var != n_in + n_latch + len(circuit.ands):
        return False
    if any(lit != 2 * (i + 1) for i, lit in enumerate(circuit.inputs)):
        return False
    if any(state != 2 * (n_in + i + 1) for i, (state, _) in enumerate(circuit.latches)):
        return False
    base = n_in + n_latch
    for i, (lhs, rhs0, rhs1) in enumerate(circuit.ands):
        if lhs != 2 * (base + i + 1) or not lhs > rhs0 >= rhs1:
            return False
    return True


def normalize(circuit: AigerCircuit) -> AigerCircuit:
    """Renumber variables into canonical consecutive order.

    Inputs come first, then latches, then AND gates in topological order
    (ties broken by the original numbering, so normalization is idempotent).
    Gate operands are swapped where needed so rhs0 >= rhs1.  Raises
    AigerError on a combinational cycle.
    """
    circuit.validate()
    mapping = {0: 0}
    for i, lit in enumerate(circuit.inputs):
        mapping[var_of(lit)] = i + 1
    n_in = len(circuit.inputs)
    for i, (state, _) in enumerate(circuit.latches):
        mapping[var_of(state)] = n_in + i + 1

    # Kahn's algorithm over AND-to-AND dependencies, min-heap on the old lhs.
    gate_of = {var_of(lhs): (lhs, rhs0, rhs1) for lhs, rhs0, rhs1 in circuit.ands}
    pending: dict[int, int] = {}
    dependents: dict[int, list[int]] = {}
    ready: list[int] = []
    for var, (_, rhs0, rhs1) in gate_of.items():
        deps = {var_of(r) for r in (rhs0, rhs1) if var_of(r) in gate_of}
        pending[var] = len(deps)
        for d in deps:
            dependents.setdefault(d, []).append(var)
        if not deps:
            heapq.heappush(ready, var)
    order = []
    while ready:
        var = heapq.heappop(ready)
        order.append(var)
        for d in dependents.get(var, ()):
            pending[d] -= 1
            if pending[d] == 0:
                heapq.heappush(ready, d)
    if len(order) != len(gate_of):
        raise AigerError("combinational cycle through AND gates")

    base = n_in + len(circuit.latches)
    for i, var in enumerate(order):
        mapping[var] = base + i + 1

    def relit(lit: int) -> int:
        return 2 * mapping[var_of(lit)] + (lit & 1)

    new_ands = []
    for var in order:
        lhs, rhs0, rhs1 = gate_of[var]
        a, b = relit(rhs0), relit(rhs1)
        if a < b:
            a, b = b, a
        new_ands.append((relit(lhs), a, b))

    return replace(
        circuit,
        max_var=base + len(order),
        inputs=tuple(2 * (i + 1) for i in range(n_in)),
        latches=tuple((2 * (n_in + i + 1), relit(nxt))
                      for i, (_, nxt) in enumerate(circuit.latches)),
        outputs=tuple(relit(lit) for lit in circuit.outputs),
        ands=tuple(new_ands),
        symbols=dict(circuit.symbols),
    )


class CircuitBuilder:
    """Grow an AND graph on top of an existing circuit.

    New gates get fresh variables above ``max_var``.  ``and_`` applies a
    local peephole: constant propagation, operand-order canonicalization and
    duplicate-gate hashing (existing gates are reused when an identical one
    is requested).
    """

    def __init__(self, base: AigerCircuit):
        self.base = base
        self.ands: list[tuple[int, int, int]] = list(base.ands)
        self.next_var = base.max_var + 1
        self._hash: dict[tuple[int, int], int] = {}
        for lhs, rhs0, rhs1 in base.ands:
            self._hash.setdefault((max(rhs0, rhs1), min(rhs0, rhs1)), lhs)

    def and_(self, a: int, b: int) -> int:
        if a < b:
            a, b = b, a
        # now a >= b
        if b == FALSE or a == negate(b):
            return FALSE
        if b == TRUE or a == b:
            return a
        cached = self._hash.get((a, b))
        if cached is not None:
            return cached
        lhs = 2 * self.next_var
        self.next_var += 1
        self.ands.append((lhs, a, b))
        self._hash[(a, b)] = lhs
        return lhs

    def define(self, lhs: int, value: int) -> None:
        """Pin an existing variable to a function with one wiring gate."""
        self.ands.append((lhs, value, TRUE))

    def build(self, *, inputs: tuple[int, ...], latches: tuple[tuple[int, int], ...],
              outputs: tuple[int, ...], symbols: Mapping[tuple[str, int], str],
              comments: tuple[str, ...] = ()) -> AigerCircuit:
        circuit = AigerCircuit(
            max_var=self.next_var - 1,
            inputs=inputs,
            latches=latches,
            outputs=outputs,
            ands=tuple(self.ands),
            symbols=dict(symbols),
            comments=comments,
        )
        circuit.validate()
        return circuit
