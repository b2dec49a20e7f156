"""A reduced ordered binary decision diagram engine.

Nodes live in one :class:`BddManager` and are addressed by signed integers:
``1`` is the true terminal, negation flips the sign (complement edges).
Canonicity is kept by the unique table, the redundant-node rule and one
polarity rule: the low child of a stored node is never complemented.

A manager is confined to a single task at a time; refs must not be mixed
across managers.
"""

from __future__ import annotations

import time
from typing import Iterable, Mapping

_TERMINAL_LEVEL = 1 << 60
_DEADLINE_CHECK_MASK = 0x1FFF


class BddError(Exception):
    pass


class NodeBudgetExceeded(BddError):
    """Raised when a manager would grow past its configured node budget."""


class DeadlineExceeded(BddError):
    """Raised from inside an operation once the manager's deadline passed."""


class Ref:
    """Handle to a BDD node; valid only within its manager.

    Two refs of one manager are equal iff they denote the same Boolean
    function (canonical-form equality).
    """

    __slots__ = ("manager", "node")

    def __init__(self, manager: "BddManager", node: int):
        self.manager = manager
        self.node = node

    def _peer(self, other: "Ref") -> int:
        if not isinstance(other, Ref):
            raise TypeError(f"expected a Ref, got {type(other).__name__}")
        if other.manager is not self.manager:
            raise BddError("refs from different managers cannot be combined")
        return other.node

    def __invert__(self) -> "Ref":
        return Ref(self.manager, -self.node)

    def __and__(self, other: "Ref") -> "Ref":
        m = self.manager
        return Ref(m, m._ite(self.node, self._peer(other), -1))

    def __or__(self, other: "Ref") -> "Ref":
        m = self.manager
        return Ref(m, m._ite(self.node, 1, self._peer(other)))

    def __xor__(self, other: "Ref") -> "Ref":
        m = self.manager
        o = self._peer(other)
        return Ref(m, m._ite(self.node, -o, o))

    def implies(self, other: "Ref") -> "Ref":
        m = self.manager
        return Ref(m, m._ite(self.node, self._peer(other), 1))

    def equiv(self, other: "Ref") -> "Ref":
        m = self.manager
        o = self._peer(other)
        return Ref(m, m._ite(self.node, o, -o))

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, Ref) and other.manager is self.manager
                and other.node == self.node)

    def __hash__(self) -> int:
        return hash((id(self.manager), self.node))

    def __bool__(self) -> bool:
        raise TypeError("a Ref has no truth value; compare against manager.true/false")

    def __repr__(self) -> str:
        return f"Ref({self.node})"


class BddManager:
    """Unique table, operation cache and node store for one variable order.

    Variable ids double as levels: variables are compared by allocation
    order and there is no dynamic reordering.
    """

    def __init__(self, node_budget: int | None = None):
        # node id -> (level, low, high); low is always a regular (positive) ref
        self._succ: dict[int, tuple[int, int, int]] = {1: (_TERMINAL_LEVEL, 0, 0)}
        self._unique: dict[tuple[int, int, int], int] = {}
        self._cache: dict[tuple, int] = {}
        self._names: list[str] = []
        self._next_id = 2
        self.node_budget = node_budget
        # deadline is compared against clock(); swap in time.process_time
        # for CPU-time budgets
        self.clock = time.monotonic
        self.deadline: float | None = None
        self.peak_nodes = 1
        self.generation = 0
        self.true = Ref(self, 1)
        self.false = Ref(self, -1)

    # -- variables ---------------------------------------------------------

    def add_var(self, name: str | None = None) -> int:
        var = len(self._names)
        self._names.append(name if name is not None else f"v{var}")
        return var

    def add_vars(self, count: int, prefix: str = "v") -> list[int]:
        return [self.add_var(f"{prefix}{i}") for i in range(count)]

    @property
    def var_order(self) -> list[int]:
        return list(range(len(self._names)))

    def var_name(self, var: int) -> str:
        return self._names[var]

    def var(self, var: int) -> Ref:
        if not 0 <= var < len(self._names):
            raise BddError(f"variable {var} is not in this manager's order")
        return Ref(self, self._mk(var, -1, 1))

    # -- node construction -------------------------------------------------

    def _mk(self, level: int, low: int, high: int) -> int:
        if low == high:
            return low
        if low < 0:
            return -self._mk_raw(level, -low, -high)
        return self._mk_raw(level, low, high)

    def _mk_raw(self, level: int, low: int, high: int) -> int:
        key = (level, low, high)
        node = self._unique.get(key)
        if node is not None:
            return node
        node = self._next_id
        if self.node_budget is not None and len(self._succ) >= self.node_budget:
            raise NodeBudgetExceeded(f"node budget of {self.node_budget} exhausted")
        if self.deadline is not None and not node & _DEADLINE_CHECK_MASK:
            if self.clock() > self.deadline:
                raise DeadlineExceeded("deadline passed during BDD operation")
        self._next_id += 1
        self._succ[node] = key
        self._unique[key] = node
        if len(self._succ) > self.peak_nodes:
            self.peak_nodes = len(self._succ)
        return node

    def _level(self, ref: int) -> int:
        return self._succ[abs(ref)][0]

    def _cofactors(self, ref: int, level: int) -> tuple[int, int]:
        node_level, low, high = self._succ[abs(ref)]
        if node_level != level:
            return ref, ref
        if ref < 0:
            return -low, -high
        return low, high

    # -- core algebra ------------------------------------------------------

    def ite(self, f: Ref, g: Ref, h: Ref) -> Ref:
        """If-then-else: (f and g) or (not f and h)."""
        self._check(f)
        return Ref(self, self._ite(f.node, f._peer(g), f._peer(h)))

    def not_(self, f: Ref) -> Ref:
        self._check(f)
        return Ref(self, -f.node)

    def and_(self, f: Ref, g: Ref) -> Ref:
        return f & g

    def or_(self, f: Ref, g: Ref) -> Ref:
        return f | g

    def xor(self, f: Ref, g: Ref) -> Ref:
        return f ^ g

    def implies(self, f: Ref, g: Ref) -> Ref:
        return f.implies(g)

    def _ite(self, f: int, g: int, h: int) -> int:
        if f == 1:
            return g
        if f == -1:
            return h
        if g == h:
            return g
        if f == g:
            g = 1
        elif f == -g:
            g = -1
        if f == h:
            h = -1
        elif f == -h:
            h = 1
        if g == 1 and h == -1:
            return f
        if g == -1 and h == 1:
            return -f
        if g == h:
            return g
        if f < 0:
            f, g, h = -f, h, g
        negated = g < 0
        if negated:
            g, h = -g, -h
        key = (f, g, h)
        result = self._cache.get(key)
        if result is None:
            level = min(self._level(f), self._level(g), self._level(h))
            f0, f1 = self._cofactors(f, level)
            g0, g1 = self._cofactors(g, level)
            h0, h1 = self._cofactors(h, level)
            r0 = self._ite(f0, g0, h0)
            r1 = self._ite(f1, g1, h1)
            result = self._mk(level, r0, r1)
            self._cache[key] = result
        return -result if negated else result

    # -- quantification ----------------------------------------------------

    def exists(self, f: Ref, variables: Iterable[int]) -> Ref:
        """Existential projection of the given variables."""
        self._check(f)
        levels = frozenset(variables)
        if not levels:
            return f
        return Ref(self, self._exists(f.node, levels, max(levels), {}))

    def forall(self, f: Ref, variables: Iterable[int]) -> Ref:
        """Universal projection: forall(f, V) = not exists(not f, V)."""
        self._check(f)
        levels = frozenset(variables)
        if not levels:
            return f
        return Ref(self, -self._exists(-f.node, levels, max(levels), {}))

    def _exists(self, u: int, levels: frozenset[int], top: int, memo: dict[int, int]) -> int:
        if abs(u) == 1:
            return u
        level = self._level(u)
        if level > top:
            return u
        cached = memo.get(u)
        if cached is not None:
            return cached
        low, high = self._cofactors(u, level)
        r0 = self._exists(low, levels, top, memo)
        r1 = self._exists(high, levels, top, memo)
        if level in levels:
            result = self._ite(r0, 1, r1)
        else:
            result = self._mk(level, r0, r1)
        memo[u] = result
        return result

    # -- substitution ------------------------------------------------------

    def compose(self, f: Ref, substitution: Mapping[int, Ref]) -> Ref:
        """Simultaneous substitution of variables by functions."""
        self._check(f)
        sub = {}
        for var, g in substitution.items():
            if not 0 <= var < len(self._names):
                raise BddError(f"variable {var} is not in this manager's order")
            sub[var] = f._peer(g)
        if not sub:
            return f
        return Ref(self, self._compose(f.node, sub, max(sub), {}))

    def _compose(self, u: int, sub: dict[int, int], top: int, memo: dict[int, int]) -> int:
        if abs(u) == 1:
            return u
        level = self._level(u)
        if level > top:
            return u
        cached = memo.get(u)
        if cached is not None:
            return cached
        low, high = self._cofactors(u, level)
        r0 = self._compose(low, sub, top, memo)
        r1 = self._compose(high, sub, top, memo)
        g = sub.get(level)
        if g is None:
            g = self._mk(level, -1, 1)
        # substituted functions may reach above this level, so rebuild with ite
        result = self._ite(g, r1, r0)
        memo[u] = result
        return result

    def cofactor(self, f: Ref, values: Mapping[int, bool]) -> Ref:
        """Restrict variables to constants."""
        return self.compose(f, {v: (self.true if b else self.false)
                                for v, b in values.items()})

    # -- inspection --------------------------------------------------------

    def eval(self, f: Ref, assignment: Mapping[int, bool]) -> bool:
        """Evaluate under an assignment; it must cover f's whole support."""
        self._check(f)
        missing = self.support(f) - set(assignment)
        if missing:
            raise BddError(f"partial assignment: missing variables {sorted(missing)}")
        u = f.node
        while abs(u) != 1:
            level, low, high = self._succ[abs(u)]
            branch = high if assignment[level] else low
            u = -branch if u < 0 else branch
        return u == 1

    def support(self, f: Ref) -> set[int]:
        self._check(f)
        seen: set[int] = set()
        levels: set[int] = set()
        stack = [abs(f.node)]
        while stack:
            node = stack.pop()
            if node == 1 or node in seen:
                continue
            seen.add(node)
            level, low, high = self._succ[node]
            levels.add(level)
            stack.append(abs(low))
            stack.append(abs(high))
        return levels

    def pick_cube(self, f: Ref) -> dict[int, bool] | None:
        """A satisfying partial assignment, or None iff f is false.

        Every completion of the returned cube satisfies f.  Deterministic:
        prefers the low branch.
        """
        self._check(f)
        if f.node == -1:
            return None
        cube: dict[int, bool] = {}
        u = f.node
        while u != 1:
            level, low, high = self._succ[abs(u)]
            if u < 0:
                low, high = -low, -high
            if low != -1:
                cube[level] = False
                u = low
            else:
                cube[level] = True
                u = high
        return cube

    def destructure(self, f: Ref) -> tuple[int, "Ref", "Ref"]:
        """Decompose |f| into (variable, low, high); f must not be constant.

        The children are those of the regular (uncomplemented) node; apply
        f's own complement bit separately when needed.
        """
        node = abs(f.node)
        if node == 1:
            raise BddError("constants have no decision variable")
        level, low, high = self._succ[node]
        return level, Ref(self, low), Ref(self, high)

    def node_count(self, f: Ref) -> int:
        """Number of decision nodes reachable from f (terminals excluded)."""
        self._check(f)
        seen: set[int] = set()
        stack = [abs(f.node)]
        while stack:
            node = stack.pop()
            if node == 1 or node in seen:
                continue
            seen.add(node)
            _, low, high = self._succ[node]
            stack.append(abs(low))
            stack.append(abs(high))
        return len(seen)

    def __len__(self) -> int:
        return len(self._succ)

    # -- maintenance -------------------------------------------------------

    def collect(self, roots: Iterable[Ref]) -> int:
        """Drop nodes unreachable from roots; returns the number removed.

        Invalidates every ref that is not reachable from ``roots`` and
        clears the operation cache (generation-based clearing).
        """
        keep: set[int] = {1}
        stack = [abs(r.node) for r in roots]
        for node in stack:
            if node not in self._succ:
                raise BddError("stale ref passed to collect()")
        while stack:
            node = stack.pop()
            if node in keep:
                continue
            keep.add(node)
            _, low, high = self._succ[node]
            stack.append(abs(low))
            stack.append(abs(high))
        dead = [n for n in self._succ if n not in keep]
        for node in dead:
            del self._unique[self._succ.pop(node)]
        self._cache.clear()
        self.generation += 1
        return len(dead)

    def _check(self, f: Ref) -> None:
        if f.manager is not self:
            raise BddError("ref belongs to a different manager")

    # -- export ------------------------------------------------------------

    def to_dot(self, f: Ref, name: str = "bdd") -> str:
        """GraphViz rendering; dotted edges are complemented."""
        self._check(f)
        lines = [f"digraph {name} {{", '  node [shape=circle];',
                 '  t1 [shape=box, label="1"];']
        seen: set[int] = set()
        stack = [abs(f.node)]
        while stack:
            node = stack.pop()
            if node == 1 or node in seen:
                continue
            seen.add(node)
            level, low, high = self._succ[node]
            lines.append(f'  n{node} [label="{self._names[level]}"];')
            for child, style in ((low, "dashed"), (high, "solid")):
                target = "t1" if abs(child) == 1 else f"n{abs(child)}"
                extra = ", arrowhead=odot" if child < 0 else ""
                lines.append(f'  n{node} -> {target} [style={style}{extra}];')
                stack.append(abs(child))
        root = "t1" if abs(f.node) == 1 else f"n{abs(f.node)}"
        root_style = " [style=dotted]" if f.node < 0 else ""
        lines.append('  root [shape=none, label=""];')
        lines.append(f"  root -> {root}{root_style};")
        lines.append("}")
        return "\n".join(lines) + "\n"
