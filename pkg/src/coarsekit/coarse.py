"""Finite ulf graphs, entourages, filtrations and extended metrics.

Ground sets are always the dense range ``0..n-1``.  Distances live in the
nonnegative integers extended by :data:`INF`, stored in float arrays so that
``INF`` is a genuine array value and finite distances stay exact.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

__all__ = [
    "INF",
    "UlfGraph",
    "Entourage",
    "Filtration",
    "ExtendedMetric",
    "graph_metric",
    "compose_entourages",
    "inverse_entourage",
    "filtration_from_generators",
    "metric_from_filtration",
    "check_ulf",
]

#: Distance between points in different components.
INF = math.inf


def _encode_distance(value: float) -> int | str:
    return "inf" if math.isinf(value) else int(value)


def _decode_distance(value) -> float:
    if value == "inf":
        return INF
    return float(int(value))


@dataclass(frozen=True, eq=False)
class ExtendedMetric:
    """Table of distances with values in ``{0, 1, 2, ...} U {INF}``."""

    table: np.ndarray

    def __post_init__(self):
        table = np.asarray(self.table, dtype=float)
        if table.ndim != 2 or table.shape[0] != table.shape[1]:
            raise ValueError(f"metric table must be square, got shape {table.shape}")
        table.setflags(write=False)
        object.__setattr__(self, "table", table)

    @property
    def n(self) -> int:
        return self.table.shape[0]

    def __call__(self, x: int, y: int) -> float:
        return float(self.table[x, y])

    def __eq__(self, other) -> bool:
        if not isinstance(other, ExtendedMetric):
            return NotImplemented
        return self.table.shape == other.table.shape and bool(np.array_equal(self.table, other.table))

    def ball(self, x: int, radius: float) -> np.ndarray:
        """Sorted vertex indices within ``radius`` of ``x``."""
        return np.flatnonzero(self.table[x] <= radius)

    def diameter(self) -> float:
        if self.n == 0:
            return 0.0
        return float(self.table.max())

    def is_metric(self) -> bool:
        """Check the extended metric axioms by brute force (O(n^3))."""
        t = self.table
        if self.n == 0:
            return True
        if np.any(np.diag(t) != 0) or not np.array_equal(t, t.T):
            return False
        off = ~np.eye(self.n, dtype=bool)
        if np.any(t[off] <= 0):
            return False
        # d(x,z) <= d(x,y) + d(y,z) for all y, with INF absorbing
        for y in range(self.n):
            if np.any(t > t[:, y, None] + t[None, y, :]):
                return False
        return True

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "distances": [[_encode_distance(v) for v in row] for row in self.table],
        }

    @classmethod
    def from_json(cls, data: dict) -> ExtendedMetric:
        n = int(data["n"])
        rows = [[_decode_distance(v) for v in row] for row in data["distances"]]
        table = np.array(rows, dtype=float).reshape(n, n)
        return cls(table)


class UlfGraph:
    """Finite undirected graph with self-loops allowed.

    Edges are stored as unordered pairs ``(u, v)`` with ``u <= v``.  The
    extended graph metric is computed on first access, under a lock.
    """

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] = ()):
        if n < 0:
            raise ValueError("vertex count must be nonnegative")
        normalized = set()
        for u, v in edges:
            u, v = int(u), int(v)
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) outside vertex range 0..{n - 1}")
            normalized.add((min(u, v), max(u, v)))
        self.n = n
        self.edges = frozenset(normalized)
        self._nbrs: list[list[int]] = [[] for _ in range(n)]
        for u, v in sorted(self.edges):
            self._nbrs[u].append(v)
            if u != v:
                self._nbrs[v].append(u)
        for row in self._nbrs:
            row.sort()
        self._metric: ExtendedMetric | None = None
        self._lock = threading.Lock()

    def __repr__(self):
        return f"UlfGraph(n={self.n}, edges={len(self.edges)})"

    def __eq__(self, other):
        if not isinstance(other, UlfGraph):
            return NotImplemented
        return self.n == other.n and self.edges == other.edges

    def __hash__(self):
        return hash((self.n, self.edges))

    def has_edge(self, u: int, v: int) -> bool:
        return (min(u, v), max(u, v)) in self.edges

    def adjacency(self) -> np.ndarray:
        """0/1 adjacency matrix, self-loops on the diagonal."""
        a = np.zeros((self.n, self.n), dtype=np.int64)
        for u, v in self.edges:
            a[u, v] = a[v, u] = 1
        return a

    def neighbors(self, x: int) -> list[int]:
        """Neighbours of ``x`` including ``x`` itself when it carries a loop."""
        return list(self._nbrs[x])

    def degrees(self) -> np.ndarray:
        # a self-loop counts once, matching |E n ({x} x X)|
        return np.array([len(row) for row in self._nbrs], dtype=np.int64)

    @property
    def max_degree(self) -> int:
        return int(self.degrees().max()) if self.n else 0

    def entourage(self) -> Entourage:
        """Edge relation as an ordered, symmetric entourage."""
        pairs = set(self.edges) | {(v, u) for u, v in self.edges}
        return Entourage(self.n, pairs)

    @property
    def metric(self) -> ExtendedMetric:
        if self._metric is None:
            with self._lock:
                if self._metric is None:
                    self._metric = graph_metric(self)
        return self._metric

    def to_json(self) -> dict:
        return {"n": self.n, "edges": [list(e) for e in sorted(self.edges)]}

    @classmethod
    def from_json(cls, data: dict) -> UlfGraph:
        return cls(int(data["n"]), [tuple(e) for e in data["edges"]])


def graph_metric(g: UlfGraph) -> ExtendedMetric:
    """All-pairs shortest-path distances of ``g``.

    Vertices in different connected components are at distance :data:`INF`.

    Examples
    --------
    >>> g = UlfGraph(3, [(0, 1), (1, 2)])
    >>> graph_metric(g)(0, 2)
    2.0
    """
    if g.n == 0:
        return ExtendedMetric(np.zeros((0, 0)))
    off_loop = [(u, v) for u, v in g.edges if u != v]
    if off_loop:
        rows, cols = zip(*off_loop)
    else:
        rows, cols = (), ()
    adj = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(g.n, g.n))
    # unweighted undirected search = breadth-first layering from every source
    table = shortest_path(adj, method="D", directed=False, unweighted=True)
    return ExtendedMetric(table)


@dataclass(frozen=True)
class Entourage:
    """Finite relation ``pairs`` on the ground set ``0..n-1``."""

    n: int
    pairs: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        pairs = frozenset((int(x), int(y)) for x, y in self.pairs)
        for x, y in pairs:
            if not (0 <= x < self.n and 0 <= y < self.n):
                raise ValueError(f"pair ({x}, {y}) outside ground set of size {self.n}")
        object.__setattr__(self, "pairs", pairs)

    @classmethod
    def diagonal(cls, n: int) -> Entourage:
        return cls(n, frozenset((x, x) for x in range(n)))

    @classmethod
    def from_matrix(cls, mask: np.ndarray) -> Entourage:
        mask = np.asarray(mask, dtype=bool)
        xs, ys = np.nonzero(mask)
        return cls(mask.shape[0], frozenset(zip(xs.tolist(), ys.tolist())))

    def matrix(self) -> np.ndarray:
        m = np.zeros((self.n, self.n), dtype=bool)
        if self.pairs:
            xs, ys = zip(*self.pairs)
            m[list(xs), list(ys)] = True
        return m

    def __contains__(self, pair) -> bool:
        return tuple(pair) in self.pairs

    def __len__(self) -> int:
        return len(self.pairs)

    def __or__(self, other: Entourage) -> Entourage:
        _check_same_ground(self, other)
        return Entourage(self.n, self.pairs | other.pairs)

    def __le__(self, other: Entourage) -> bool:
        return self.n == other.n and self.pairs <= other.pairs

    def is_symmetric(self) -> bool:
        return all((y, x) in self.pairs for x, y in self.pairs)

    def contains_diagonal(self) -> bool:
        return all((x, x) in self.pairs for x in range(self.n))

    def row_degrees(self) -> np.ndarray:
        return self.matrix().sum(axis=1)

    def column_degrees(self) -> np.ndarray:
        return self.matrix().sum(axis=0)

    def to_json(self) -> dict:
        return {"n": self.n, "pairs": [list(p) for p in sorted(self.pairs)]}

    @classmethod
    def from_json(cls, data: dict) -> Entourage:
        return cls(int(data["n"]), frozenset(tuple(p) for p in data["pairs"]))


def _check_same_ground(e: Entourage, f: Entourage) -> None:
    if e.n != f.n:
        raise ValueError(f"ground sets differ: {e.n} vs {f.n}")


def compose_entourages(e: Entourage, f: Entourage) -> Entourage:
    """``{(x, z) : (x, y) in e and (y, z) in f for some y}``."""
    _check_same_ground(e, f)
    product = e.matrix().astype(np.int64) @ f.matrix().astype(np.int64)
    return Entourage.from_matrix(product > 0)


def inverse_entourage(e: Entourage) -> Entourage:
    return Entourage(e.n, frozenset((y, x) for x, y in e.pairs))


@dataclass(frozen=True)
class Filtration:
    """Increasing levels ``E_0 = Delta, E_1, ..., E_N`` truncated at depth N."""

    levels: tuple

    def __post_init__(self):
        levels = tuple(self.levels)
        if not levels:
            raise ValueError("a filtration needs at least the level E_0")
        n = levels[0].n
        if any(level.n != n for level in levels):
            raise ValueError("all levels must share one ground set")
        object.__setattr__(self, "levels", levels)

    @property
    def n(self) -> int:
        return self.levels[0].n

    @property
    def depth(self) -> int:
        return len(self.levels) - 1

    def __getitem__(self, k: int) -> Entourage:
        return self.levels[k]

    def violations(self) -> list[str]:
        """Broken filtration invariants, empty when all hold."""
        problems = []
        if self.levels[0] != Entourage.diagonal(self.n):
            problems.append("E_0 is not the diagonal")
        for k, level in enumerate(self.levels):
            if not level.is_symmetric():
                problems.append(f"E_{k} is not symmetric")
            if k and not self.levels[k - 1] <= level:
                problems.append(f"E_{k - 1} is not contained in E_{k}")
        for a in range(len(self.levels)):
            for b in range(len(self.levels) - a):
                if not compose_entourages(self.levels[a], self.levels[b]) <= self.levels[a + b]:
                    problems.append(f"E_{a} o E_{b} is not contained in E_{a + b}")
        return problems


def filtration_from_generators(gens: list[Entourage], depth: int, n: int | None = None) -> Filtration:
    """Word-length filtration of the coarse structure generated by ``gens``.

    ``E_1`` is the diagonal together with every generator and its inverse,
    and ``E_{k+1} = E_k o E_1``.  ``n`` is only needed when ``gens`` is empty.
    """
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    if gens:
        n = gens[0].n
        for g in gens:
            _check_same_ground(gens[0], g)
    elif n is None:
        raise ValueError("ground-set size required when there are no generators")
    diag = Entourage.diagonal(n)
    step = diag
    for g in gens:
        step = step | g | inverse_entourage(g)
    levels = [diag]
    for _ in range(depth):
        levels.append(compose_entourages(levels[-1], step))
    return Filtration(tuple(levels))


def metric_from_filtration(f: Filtration) -> ExtendedMetric:
    """``d(x, y) = min{k : (x, y) in E_k}``.

    Pairs missing from every level up to the truncation depth get
    :data:`INF`, read as "beyond truncation".
    """
    table = np.full((f.n, f.n), INF)
    for k in range(f.depth, -1, -1):
        table[f.levels[k].matrix()] = k
    return ExtendedMetric(table)


def check_ulf(e: Entourage) -> int:
    """Largest row or column count of ``e``."""
    if e.n == 0:
        return 0
    m = e.matrix()
    return int(max(m.sum(axis=1).max(), m.sum(axis=0).max()))
