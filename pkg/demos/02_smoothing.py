"""
Smoothing a probability measure
===============================

On a graph of degree at most ``M`` any finitely supported probability
measure has an l1-close replacement that changes by at most a factor ``L``
across each edge.  Its mass also decays geometrically away from the
original support.
"""

import numpy as np

from coarsekit import ProbMeasure, smooth
from coarsekit.generators import path_graph, random_bounded_degree_graph

# a point mass at the end of a path
g = path_graph(8)
eta = ProbMeasure.point_mass(8, 0)
for eps in (0.5, 0.2, 0.1):
    out, L, report = smooth(eta, eps, g)
    print(f"eps={eps}: L={L:g}, l1 distance {report.l1_distance:.4f}, "
          f"worst edge ratio {report.worst_edge_ratio:.2f}, pass={report.passed}")
    print("   ", np.array2string(out.weights, precision=4, suppress_small=True))

# the same holds on random graphs, with the l1 error well under eps
rng = np.random.default_rng(0)
for _ in range(5):
    g = random_bounded_degree_graph(rng, 40, 4)
    w = np.zeros(40)
    w[rng.choice(40, 3, replace=False)] = 1 / 3
    out, L, report = smooth(ProbMeasure(w), 0.2, g)
    print(f"random graph, max degree {g.max_degree}: l1 {report.l1_distance:.4f}, "
          f"tail margin {report.worst_tail_margin:.2e}, pass={report.passed}")
