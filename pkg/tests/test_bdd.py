import random

import pytest
from hypothesis import given, settings, strategies as st

from aigsynt.bdd import BddManager, BddError, NodeBudgetExceeded


def fresh(n_vars=8):
    m = BddManager()
    variables = m.add_vars(n_vars, prefix="x")
    return m, variables


def tt_of(m, f, variables):
    """Truth table of a ref as a bitmask over all assignments."""
    mask = 0
    for code in range(1 << len(variables)):
        assignment = {v: bool((code >> i) & 1) for i, v in enumerate(variables)}
        assignment.update({v: False for v in m.support(f) - set(assignment)})
        if m.eval(f, assignment):
            mask |= 1 << code
    return mask


def bdd_of_tt(m, mask, variables):
    """Build a ref from a truth-table bitmask (Shannon expansion).

    Assignment ``code`` sets variables[i] to bit i of code; bit ``code`` of
    the mask is the function value.
    """
    def rec(i, offset):
        if i == len(variables):
            return m.true if (mask >> offset) & 1 else m.false
        low = rec(i + 1, offset)
        high = rec(i + 1, offset + (1 << i))
        return m.ite(m.var(variables[i]), high, low)
    return rec(0, 0)


class TestBasics:
    def test_ite_identity(self):
        m, v = fresh(2)
        x = m.var(v[0])
        assert m.ite(x, m.true, m.false) == x

    def test_double_negation(self):
        m, v = fresh(2)
        x = m.var(v[0])
        assert ~~x == x
        assert m.not_(m.not_(x)) == x

    def test_constants(self):
        m, _ = fresh(1)
        assert ~m.true == m.false
        assert (m.true & m.false) == m.false
        assert (m.true | m.false) == m.true

    def test_node_count_single_variable(self):
        m, v = fresh(3)
        assert m.node_count(m.var(v[1])) == 1
        assert m.node_count(m.true) == 0

    def test_cross_manager_mixing_rejected(self):
        m1, v1 = fresh(2)
        m2, v2 = fresh(2)
        with pytest.raises(BddError, match="manager"):
            m1.var(v1[0]) & m2.var(v2[0])
        with pytest.raises(BddError, match="manager"):
            m1.exists(m2.var(v2[0]), [v1[0]])

    def test_ref_has_no_truth_value(self):
        m, v = fresh(1)
        with pytest.raises(TypeError):
            bool(m.var(v[0]))


class TestAgainstTruthTables:
    N = 5

    def random_tt(self, rng):
        return rng.getrandbits(1 << self.N)

    def test_ite_matches_oracle(self):
        rng = random.Random(10)
        m, v = fresh(self.N)
        univ = (1 << (1 << self.N)) - 1
        for _ in range(150):
            f, g, h = (self.random_tt(rng) for _ in range(3))
            rf, rg, rh = (bdd_of_tt(m, t, v) for t in (f, g, h))
            expect = (f & g) | (univ & ~f & h)
            assert tt_of(m, m.ite(rf, rg, rh), v) == expect

    def test_binary_ops_match_oracle(self):
        rng = random.Random(11)
        m, v = fresh(self.N)
        univ = (1 << (1 << self.N)) - 1
        for _ in range(100):
            f, g = self.random_tt(rng), self.random_tt(rng)
            rf, rg = bdd_of_tt(m, f, v), bdd_of_tt(m, g, v)
            assert tt_of(m, rf & rg, v) == f & g
            assert tt_of(m, rf | rg, v) == f | g
            assert tt_of(m, rf ^ rg, v) == f ^ g
            assert tt_of(m, ~rf, v) == univ & ~f
            assert tt_of(m, rf.implies(rg), v) == (univ & ~f) | g
            assert tt_of(m, rf.equiv(rg), v) == univ & ~(f ^ g)

    def test_quantifiers_match_enumeration(self):
        rng = random.Random(12)
        m, v = fresh(self.N)
        for _ in range(60):
            f = self.random_tt(rng)
            rf = bdd_of_tt(m, f, v)
            qvars = rng.sample(v, rng.randint(1, self.N))
            ex = m.exists(rf, qvars)
            fa = m.forall(rf, qvars)
            for code in range(1 << self.N):
                base = {var: bool((code >> i) & 1) for i, var in enumerate(v)}
                values = []
                for sub in range(1 << len(qvars)):
                    a = dict(base)
                    for j, var in enumerate(qvars):
                        a[var] = bool((sub >> j) & 1)
                    point = sum(int(a[var]) << i for i, var in enumerate(v))
                    values.append(bool((f >> point) & 1))
                full = {var: base[var] for var in v}
                assert m.eval(ex, full) == any(values)
                assert m.eval(fa, full) == all(values)

    def test_quantifier_duality(self):
        rng = random.Random(13)
        m, v = fresh(self.N)
        for _ in range(40):
            rf = bdd_of_tt(m, self.random_tt(rng), v)
            qvars = rng.sample(v, rng.randint(1, self.N))
            assert m.forall(rf, qvars) == ~m.exists(~rf, qvars)

    def test_compose_matches_substitution(self):
        rng = random.Random(14)
        m, v = fresh(self.N)
        for _ in range(50):
            f = self.random_tt(rng)
            rf = bdd_of_tt(m, f, v)
            sub_vars = rng.sample(v, rng.randint(0, 3))
            sub_tts = {var: self.random_tt(rng) for var in sub_vars}
            sub_refs = {var: bdd_of_tt(m, t, v) for var, t in sub_tts.items()}
            composed = m.compose(rf, sub_refs)
            for code in range(1 << self.N):
                a = {var: bool((code >> i) & 1) for i, var in enumerate(v)}
                subbed = dict(a)
                for var, t in sub_tts.items():
                    subbed[var] = bool((t >> code) & 1)
                point = sum(int(subbed[var]) << i for i, var in enumerate(v))
                assert m.eval(composed, a) == bool((f >> point) & 1)

    def test_canonicity_two_constructions(self):
        rng = random.Random(15)
        m, v = fresh(self.N)
        for _ in range(80):
            f = self.random_tt(rng)
            direct = bdd_of_tt(m, f, v)
            # rebuild through a different expression shape
            g = self.random_tt(rng)
            mixed = (bdd_of_tt(m, f & g, v) | bdd_of_tt(m, f & ~g & ((1 << 32) - 1), v))
            expect = (f & g) | (f & ~g & ((1 << 32) - 1))
            assert mixed == bdd_of_tt(m, expect, v)
            assert direct == bdd_of_tt(m, f, v)


class TestLaws:
    def test_de_morgan_and_absorption(self):
        rng = random.Random(16)
        m, v = fresh(6)
        for _ in range(60):
            f = bdd_of_tt(m, rng.getrandbits(64), v)
            g = bdd_of_tt(m, rng.getrandbits(64), v)
            assert ~(f & g) == (~f | ~g)
            assert ~(f | g) == (~f & ~g)
            assert (f & (f | g)) == f
            assert (f | (f & g)) == f

    def test_trivial_quantifier_examples(self):
        m, v = fresh(2)
        x, y = m.var(v[0]), m.var(v[1])
        assert m.exists(x & y, [v[1]]) == x
        assert m.forall(x | y, [v[1]]) == x

    def test_compose_trivia(self):
        m, v = fresh(3)
        x, y = m.var(v[0]), m.var(v[1])
        g = y & m.var(v[2])
        assert m.compose(x, {v[0]: g}) == g
        assert m.compose(x & y, {}) == (x & y)


class TestEvalAndCubes:
    def test_eval_example(self):
        m, v = fresh(2)
        f = m.var(v[0]) & ~m.var(v[1])
        assert m.eval(f, {v[0]: True, v[1]: False}) is True
        assert m.eval(f, {v[0]: True, v[1]: True}) is False

    def test_eval_partial_assignment_rejected(self):
        m, v = fresh(2)
        f = m.var(v[0]) & m.var(v[1])
        with pytest.raises(BddError, match="partial"):
            m.eval(f, {v[0]: True})

    def test_pick_cube_none_on_false(self):
        m, _ = fresh(1)
        assert m.pick_cube(m.false) is None

    def test_pick_cube_satisfies(self):
        rng = random.Random(17)
        m, v = fresh(6)
        for _ in range(50):
            f = bdd_of_tt(m, rng.getrandbits(64), v)
            cube = m.pick_cube(f)
            if f == m.false:
                assert cube is None
                continue
            a = {var: cube.get(var, False) for var in v}
            assert m.eval(f, a)

    def test_support(self):
        m, v = fresh(4)
        f = (m.var(v[0]) & m.var(v[2])) | m.var(v[3])
        assert m.support(f) == {v[0], v[2], v[3]}


class TestResources:
    def test_node_budget_enforced(self):
        m = BddManager(node_budget=8)
        v = m.add_vars(10)
        with pytest.raises(NodeBudgetExceeded):
            f = m.true
            for var in v:
                f = f ^ m.var(var)

    def test_collect_keeps_roots(self):
        m, v = fresh(6)
        keep = m.var(v[0]) & m.var(v[1])
        junk = [m.var(a) ^ m.var(b) for a in v for b in v]
        before = len(m)
        removed = m.collect([keep])
        assert removed > 0
        assert len(m) < before
        assert m.eval(keep, {v[0]: True, v[1]: True})
        # rebuilt expression is identical to the kept root
        assert (m.var(v[0]) & m.var(v[1])) == keep

    def test_generation_bumped(self):
        m, v = fresh(2)
        gen = m.generation
        m.collect([m.var(v[0])])
        assert m.generation == gen + 1


def test_to_dot_mentions_variables():
    m, v = fresh(2)
    f = m.var(v[0]) & ~m.var(v[1])
    dot = m.to_dot(f)
    assert "digraph" in dot and "x0" in dot and "x1" in dot


@st.composite
def expressions(draw, depth=4):
    """Random expression trees over 5 variables, as (build, semantics)."""
    n = 5
    univ = (1 << (1 << n)) - 1
    var_tts = [0] * n
    for i in range(n):
        for code in range(1 << n):
            if (code >> i) & 1:
                var_tts[i] |= 1 << code

    def node(d):
        if d == 0 or draw(st.integers(0, 3)) == 0:
            i = draw(st.integers(0, n - 1))
            return ("var", i)
        op = draw(st.sampled_from(["and", "or", "xor", "not"]))
        if op == "not":
            return ("not", node(d - 1))
        return (op, node(d - 1), node(d - 1))

    return node(depth)


def _eval_tree(tree, m, variables, var_tts, univ):
    kind = tree[0]
    if kind == "var":
        return m.var(variables[tree[1]]), var_tts[tree[1]]
    if kind == "not":
        r, t = _eval_tree(tree[1], m, variables, var_tts, univ)
        return ~r, univ & ~t
    a, ta = _eval_tree(tree[1], m, variables, var_tts, univ)
    b, tb = _eval_tree(tree[2], m, variables, var_tts, univ)
    if kind == "and":
        return a & b, ta & tb
    if kind == "or":
        return a | b, ta | tb
    return a ^ b, ta ^ tb


@settings(max_examples=80, deadline=None)
@given(expressions())
def test_expression_canonicity_property(tree):
    n = 5
    univ = (1 << (1 << n)) - 1
    m = BddManager()
    variables = m.add_vars(n)
    var_tts = [0] * n
    for i in range(n):
        for code in range(1 << n):
            if (code >> i) & 1:
                var_tts[i] |= 1 << code
    ref, tt = _eval_tree(tree, m, variables, var_tts, univ)
    assert tt_of(m, ref, variables) == tt
    assert ref == bdd_of_tt(m, tt, variables)
