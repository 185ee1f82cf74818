"""Tour of a small twisted stratum poset, ending in a graphviz export.

Builds the rank-3 hyperoctahedral Weyl group, takes the parabolic type
I = {1, 2}, derives the mirrored type from the longest element, and walks
the resulting stratum poset: carrier size, lengths, dimensions, covers.
The poset is printed as DOT; render it with

    python3 demos/demo_weyl_poset.py > strata.gv
    dot -Tpng -O strata.gv
"""

import sys

from zipstrata.coxeter import create_weyl, longest_element, word_string
from zipstrata.zipdatum import export_poset, purity_check, stratum_poset, zip_from_cocharacter

group = create_weyl("B", 3)
print(f"group: {group.family}{group.rank}, order {group.order}", file=sys.stderr)
print(f"longest element: {word_string(longest_element(group))}", file=sys.stderr)

datum = zip_from_cocharacter(group, (1, 2))
print(f"I = {sorted(datum.I.indices)}, mirrored J = {sorted(datum.J.indices)}", file=sys.stderr)

poset = stratum_poset(datum)
print(f"strata: {len(poset.carrier)} = {group.order} / |W_I|", file=sys.stderr)
for w in poset.carrier:
    covers = [word_string(v) for v in poset.carrier if (poset.index_of(v), poset.index_of(w)) in poset.covers]
    print(
        f"  {word_string(w):16s} length {poset.length_of[poset.index_of(w)]}"
        f"  dim {poset.dim_of[poset.index_of(w)]}  covers {covers}",
        file=sys.stderr,
    )

report = purity_check(datum)
print(f"one-step closures everywhere: {report.passed}", file=sys.stderr)

sys.stdout.write(export_poset(poset, "dot"))
