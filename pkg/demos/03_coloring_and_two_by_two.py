"""
Involutions from edge colourings
================================

A symmetric relation containing the diagonal splits into at most ``2d - 1``
involutions whose graphs cover it.  Partial translations become honest
involutions on two copies of the space.
"""

from coarsekit import Entourage, PartialTranslation, edge_color_decompose, is_involution, two_by_two
from coarsekit.generators import cycle_graph

# the 7-cycle with its diagonal has row degree 3, so at most 5 colours
s = cycle_graph(7).entourage() | Entourage.diagonal(7)
parts = edge_color_decompose(s)
print(f"{len(parts)} involutions cover the 7-cycle relation:")
for p in parts:
    print("  ", p.mapping)
covered = frozenset().union(*(p.graph().pairs for p in parts))
print("cover is exact:", covered == s.pairs)

# a shift that falls off the end is a partial translation, not an involution
shift = PartialTranslation((1, 2, 3, None))
print("\nshift on 4 points:", shift.mapping, "involution:", is_involution(shift))
u = two_by_two(shift)
print("on two copies:", u.mapping, "involution:", is_involution(u))
