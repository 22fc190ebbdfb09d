"""Standard graphs and seeded random instances."""

from __future__ import annotations

import numpy as np

from .actions import PartialTranslation
from .coarse import Entourage, UlfGraph

__all__ = [
    "cycle_graph",
    "path_graph",
    "complete_graph",
    "random_bounded_degree_graph",
    "random_connected_graph",
    "random_regular_graph",
    "random_symmetric_relation",
    "random_partial_injection",
    "random_permutation",
]


def cycle_graph(n: int) -> UlfGraph:
    if n == 1:
        return UlfGraph(1)
    return UlfGraph(n, [(i, (i + 1) % n) for i in range(n)])


def path_graph(n: int) -> UlfGraph:
    return UlfGraph(n, [(i, i + 1) for i in range(n - 1)])


def complete_graph(n: int) -> UlfGraph:
    return UlfGraph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def random_bounded_degree_graph(rng: np.random.Generator, n: int, max_degree: int, attempts: int | None = None) -> UlfGraph:
    """Random loopless graph whose degrees never exceed ``max_degree``."""
    deg = np.zeros(n, dtype=int)
    edges = set()
    attempts = attempts if attempts is not None else 2 * n * max_degree
    for _ in range(attempts):
        u, v = (int(t) for t in rng.integers(0, n, size=2))
        if u == v or (min(u, v), max(u, v)) in edges:
            continue
        if deg[u] >= max_degree or deg[v] >= max_degree:
            continue
        edges.add((min(u, v), max(u, v)))
        deg[u] += 1
        deg[v] += 1
    return UlfGraph(n, edges)


def random_connected_graph(rng: np.random.Generator, n: int, extra_edges: int = 0) -> UlfGraph:
    """Random spanning tree plus ``extra_edges`` random chords."""
    order = rng.permutation(n)
    edges = set()
    for i in range(1, n):
        parent = order[int(rng.integers(0, i))]
        u, v = int(order[i]), int(parent)
        edges.add((min(u, v), max(u, v)))
    for _ in range(extra_edges):
        u, v = (int(t) for t in rng.integers(0, n, size=2))
        if u != v:
            edges.add((min(u, v), max(u, v)))
    return UlfGraph(n, edges)


def random_regular_graph(rng: np.random.Generator, n: int, r: int, max_tries: int = 10_000) -> UlfGraph:
    """Connected simple ``r``-regular graph from the pairing model.

    Pairings with loops or repeated edges, and disconnected results, are
    rejected and redrawn.
    """
    if n * r % 2 or r >= n:
        raise ValueError(f"no simple {r}-regular graph on {n} vertices")
    stubs = np.repeat(np.arange(n), r)
    for _ in range(max_tries):
        pairs = rng.permutation(stubs).reshape(-1, 2)
        if np.any(pairs[:, 0] == pairs[:, 1]):
            continue
        edges = {(int(min(u, v)), int(max(u, v))) for u, v in pairs}
        if len(edges) != len(pairs):
            continue
        g = UlfGraph(n, edges)
        if np.isfinite(g.metric.diameter()):
            return g
    raise RuntimeError(f"pairing model failed to produce a connected {r}-regular graph on {n} vertices")


def random_symmetric_relation(rng: np.random.Generator, n: int, d: int, density: float = 0.5) -> Entourage:
    """Diagonal plus random symmetric pairs, every row count at most ``d``."""
    if d < 1:
        raise ValueError("a relation containing the diagonal has row count at least 1")
    counts = np.ones(n, dtype=int)
    pairs = {(x, x) for x in range(n)}
    candidates = [(x, y) for x in range(n) for y in range(x + 1, n)]
    for i in rng.permutation(len(candidates)):
        x, y = candidates[i]
        if rng.random() < density and counts[x] < d and counts[y] < d:
            pairs.add((x, y))
            pairs.add((y, x))
            counts[x] += 1
            counts[y] += 1
    return Entourage(n, frozenset(pairs))


def random_partial_injection(rng: np.random.Generator, n: int, density: float | None = None) -> PartialTranslation:
    """Injective map from a random subset of ``0..n-1`` into ``0..n-1``."""
    density = rng.random() if density is None else density
    domain = np.flatnonzero(rng.random(n) < density)
    images = rng.permutation(n)[: len(domain)]
    mapping = [None] * n
    for x, v in zip(domain, images):
        mapping[int(x)] = int(v)
    return PartialTranslation(tuple(mapping))


def random_permutation(rng: np.random.Generator, n: int) -> PartialTranslation:
    return PartialTranslation(tuple(int(v) for v in rng.permutation(n)))
