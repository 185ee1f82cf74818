"""A conjugation orbit whose boundary drops two dimensions at once.

GL_2 acts on itself by conjugation.  The orbit of the Jordan block
[[1,1],[0,1]] has q^2 - 1 points over F_q -- dimension 2 -- while the
only extra point in its closure is the identity, of dimension 0.  The
boundary therefore sits in codimension 2 inside the closure: closures of
these orbits are not glued one step at a time, unlike the stratum
closures elsewhere in this package.
"""

from zipstrata.grouplab import counterexample_gl2

print("q   |orbit|  q^2-1   dim  ambient  fiber  boundary drop")
for q in (2, 3, 4, 5):
    c = counterexample_gl2(q)
    print(f"{c.q:<4d}{c.orbit_sizes[0]:<9d}{c.q * c.q - 1:<8d}"
          f"{c.orbit_dimension:<5d}{c.ambient_dimension:<9d}"
          f"{c.fiber_size:<7d}{c.boundary_drop}")

c = counterexample_gl2(2)
print(f"\nJordan type on the orbit: {c.jordan_of_orbit},"
      f" at the limit point: {c.jordan_of_limit}")
print("the identity is in the closure of the orbit but not in the orbit;")
print(f"it sits {c.boundary_drop} dimensions below, inside an ambient of"
      f" dimension {c.ambient_dimension}")
