"""Display orbits over Z/4 and their reduction to the residue field.

The length-two Witt ring of F_2 is Z/4.  The 2x2 display group over Z/4
has 64 elements and acts by twisted conjugation z -> iota(x) z sigma(x)^-1
on the 96 invertible matrices.  This script sweeps the orbits at level
two, reduces every orbit modulo 2, and shows that each one lands inside a
single level-one orbit -- the level-one picture is exactly the zip-orbit
partition of GL_2(F_2).
"""

from zipstrata.witt import (
    check_reduction,
    display_group_points,
    make_ring,
    orbit_census_level,
)

ring = make_ring(2, 1, 2)
print(f"ring: {ring.size} elements, characteristic {ring.char}")
print(f"display group: {len(display_group_points(ring, 2, 1))} points")

census = orbit_census_level(2, 2, 1, 2)
print(f"\nlevel-2 orbits of the {census.group_order} invertible matrices:")
for rec in census.orbits:
    flat = tuple(v.coeffs[0] for row in rec.rep for v in row)
    print(f"  size {rec.size:3d}  stabilizer {rec.stabilizer_order:2d}  rep {flat}")

report = check_reduction(2, 2, 1, 2)
print(f"\nreduction mod 2: {report['orbits_m']} level-2 orbits"
      f" -> {report['orbits_1']} level-1 orbits")
print(f"orbits split by reduction: {len(report['violations'])}")

base = orbit_census_level(2, 2, 1, 1)
print(f"\nlevel-1 census (= the zip census of GL_2(F_2)):"
      f" sizes {[r.size for r in base.orbits]} out of {base.group_order}")
