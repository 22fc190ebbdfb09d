"""
Left-right representation identities
====================================

Replacing a vector-valued matrix by its entrywise norms can only increase
translated inner products, and leaves norms and diagonal states unchanged.
A positive top eigenvector gives weights that make the translation fix it.
"""

import numpy as np

from coarsekit import h_gamma, lemma_inequalities, nonneg_top_eigenvector, translate
from coarsekit.generators import random_permutation

rng = np.random.default_rng(3)
n, k = 6, 2
zeta = rng.standard_normal((n, n, k)) + 1j * rng.standard_normal((n, n, k))
h = rng.random(n) + 0.5
gamma = random_permutation(rng, n)
f = rng.standard_normal(n)
for name, rep in lemma_inequalities(zeta, h, gamma, f).items():
    print(f"{name:20s} residual {rep.residual:.1e}  slack {rep.slack:.3f}  pass={rep.passed}")

# a positive operator whose top eigenvector has mixed signs
v = np.array([1.0, -2.0, 0.5, 1.0])
v /= np.linalg.norm(v)
t = np.outer(v, v) + 0.1 * np.eye(4)
t /= np.linalg.norm(t, 2)
top = nonneg_top_eigenvector(t)
print("\nnonnegative top eigenvector:", np.round(top.xi, 4), "phases:", top.phases.real)

# the weights h make h gamma diag(xi) gamma^-1 equal diag(xi)
xi = top.xi
gamma = random_permutation(rng, 4)
h, _ = h_gamma(xi, gamma)
moved = translate(np.diag(xi), h, gamma)
print("fixed-point error:", float(np.abs(moved - np.diag(xi)).max()))
