"""The BDD engine: canonical refs, Boolean algebra, quantifiers.

Run from the repository root:  python3 demos/02_bdd_engine.py
"""

from aigsynt.bdd import BddManager

m = BddManager()
x, y, z = (m.var(v) for v in m.add_vars(3, prefix="v"))

print("Canonicity: equal functions are the *same* ref, however built.")
lhs = ~(x & y)
rhs = ~x | ~y
print(f"  ~(x & y) == ~x | ~y  ->  {lhs == rhs}")

print("\nIf-then-else is the core operation; derived ops reduce to it.")
mux = m.ite(x, y, z)
print(f"  ite(x, y, z) has {m.node_count(mux)} decision nodes")

print("\nQuantifiers project variables away:")
f = (x & y) | (~x & z)
print(f"  support(f)        = {sorted(m.var_name(v) for v in m.support(f))}")
ex = m.exists(f, [0])
fa = m.forall(f, [0])
print(f"  exists v0: f      = y | z   ->  {ex == (y | z)}")
print(f"  forall v0: f      = y & z   ->  {fa == (y & z)}")
print(f"  duality forall = ~exists~   ->  {fa == ~m.exists(~f, [0])}")

print("\nSubstitution composes functions (used for symbolic preimages):")
g = m.compose(f, {0: y.equiv(z)})
print(f"  f[v0 := (y<=>z)] evaluated at y=1,z=1: "
      f"{m.eval(g, {1: True, 2: True})}")

print("\npick_cube returns a partial satisfying assignment:")
cube = m.pick_cube(f & ~y)
print(f"  cube of f & ~y: "
      f"{ {m.var_name(v): int(b) for v, b in sorted(cube.items())} }")

print("\nDOT export (first lines):")
print("\n".join(m.to_dot(f).splitlines()[:5]))
