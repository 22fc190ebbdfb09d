"""
Ghosts in a box space of complete graphs
========================================

The projection onto functions constant on each block has entries ``1/|V_i|``
that die out along the box space.  Lazy random walk polynomials of the
adjacency approximate it with finite propagation.
"""

import numpy as np

from coarsekit import block_constant_ghost, block_constant_projection, box_space, compress, ghost_profile
from coarsekit.generators import complete_graph, cycle_graph

sizes = [2, 4, 8, 16, 32]
b = box_space([complete_graph(m) for m in sizes])
p = block_constant_projection(b)
profile = ghost_profile(p)
starts = np.cumsum([0] + sizes[:-1])
print("ghost profile at the start of each block:", [float(profile[s]) for s in starts])

# the error of ((1 + A) / 2) ** k is governed by the second eigenvalue
for k in (1, 2, 4):
    t, bounds = block_constant_ghost(b, k)
    errors = [np.linalg.norm(t.entries[np.ix_(idx, idx)] - p.entries[np.ix_(idx, idx)], 2) for idx in b.blocks()]
    print(f"k={k}: propagation {t.prop}, errors", np.round(errors, 4), "bounds", np.round(bounds, 4))

# compressing an operator to balls of radius S keeps only local entries
g = cycle_graph(8)
comp = compress(g.adjacency(), 1, g.metric)
print("\nball of radius 1 around 0 in C8:", comp.balls[0].tolist())
print(comp.blocks[0])
