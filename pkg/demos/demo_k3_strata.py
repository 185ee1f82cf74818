"""The weight pattern (1, 20, 1) on twenty-two lines: 462 strata.

A polarized middle-cohomology lattice of rank 22 with Hodge numbers
1, 20, 1 singles out the block pattern (1, 20, 1) on GL_22.  The minimal
coset representatives for that pattern label 462 = 22 * 21 strata.  This
script builds the poset, confirms the count against the index formula,
and prints the bottom and top of the hierarchy with dimensions.

The closure order itself is not tabulated at this size (the Levi has 20!
elements, so the interval tests are skipped by design); lengths, dims and
the count are exact regardless.
"""

from math import factorial

from zipstrata.coxeter import create_weyl, word_string
from zipstrata.zipdatum import stratum_poset, zip_from_cocharacter

n = 22
blocks = (1, 20, 1)
cuts = {1, 21}
I = tuple(i for i in range(1, n) if i not in cuts)

group = create_weyl("A", n - 1)
datum = zip_from_cocharacter(group, I, gl_center=True)
poset = stratum_poset(datum)

count = len(poset.carrier)
expected = factorial(22) // (factorial(1) * factorial(20) * factorial(1))
print(f"blocks {blocks} on GL_{n}: {count} strata (index formula gives {expected})")
assert count == expected == 462

by_length = sorted(
    zip(poset.length_of, poset.dim_of, poset.carrier),
    key=lambda t: (t[0], t[1], t[2].reduced_word()),
)
print("\nfive lowest strata:")
for length, dim, w in by_length[:5]:
    print(f"  length {length:2d}  dim {dim}  {word_string(w)}")
print("\nfive highest strata:")
for length, dim, w in by_length[-5:]:
    print(f"  length {length:2d}  dim {dim}  {word_string(w)}")

spread = by_length[-1][0] - by_length[0][0]
print(f"\nlength range 0..{by_length[-1][0]} (span {spread}),"
      f" dimensions {by_length[0][1]}..{by_length[-1][1]}")
