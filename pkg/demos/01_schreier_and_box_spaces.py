"""
Schreier graphs and box spaces
==============================

A group acting on a finite set gives a graph: join ``x`` to ``s x`` for every
generator ``s``.  Stacking a sequence of such graphs with growing gaps
between them gives a box space.
"""

import numpy as np

from coarsekit import ActionGenerators, PartialTranslation, box_space, schreier_graph
from coarsekit.generators import cycle_graph

# Z/6 acting on itself by +1 and -1 gives the 6-cycle
action = ActionGenerators.cyclic(6)
g = schreier_graph(action)
print("edges of the Schreier graph of Z/6:", sorted(g.edges))
print("same as the cycle graph:", g == cycle_graph(6))

# the symmetric group S3 acting on {0, 1, 2} by two transpositions;
# the fixed points show up as loops
a = PartialTranslation.from_cycles(3, (0, 1))
b = PartialTranslation.from_cycles(3, (1, 2))
print("S3 on three points:", sorted(schreier_graph(ActionGenerators(3, (a, b))).edges))

# a box space of cycles: component i (counted from 1) sits at distance
# i + diam from the basepoint, so cross distances grow without bound
b = box_space([cycle_graph(n) for n in (3, 5, 8, 13)])
print("\nbox space of C3, C5, C8, C13 has", b.n, "points")
for i, j, dist in b.to_json()["separations"]:
    print(f"  distance between components {i} and {j}: {dist}")

# inside a component the metric is the graph metric
blocks = b.blocks()
inner = b.metric.table[np.ix_(blocks[2], blocks[2])]
print("diameter of the C8 block:", int(inner.max()))
