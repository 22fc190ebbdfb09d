"""Group actions, partial translations, Schreier graphs and box spaces.

Group elements are handled extensionally, as maps on the finite ground set.
A :class:`PartialTranslation` stores its images in a tuple with ``None`` for
points outside the domain.  Its graph is ``{(gamma(x), x)}``.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .coarse import Entourage, ExtendedMetric, UlfGraph, inverse_entourage

__all__ = [
    "PartialTranslation",
    "ActionGenerators",
    "BoxSpace",
    "schreier_graph",
    "box_space",
    "two_by_two",
    "two_by_two_matrix",
    "edge_color_decompose",
    "realize_as_action",
    "is_involution",
]


@dataclass(frozen=True)
class PartialTranslation:
    """Injective partial map on ``0..n-1``."""

    mapping: tuple

    def __post_init__(self):
        mapping = tuple(None if v is None else int(v) for v in self.mapping)
        n = len(mapping)
        images = [v for v in mapping if v is not None]
        if any(not 0 <= v < n for v in images):
            raise ValueError("image outside the ground set")
        if len(set(images)) != len(images):
            raise ValueError("partial translation must be injective")
        object.__setattr__(self, "mapping", mapping)

    @classmethod
    def identity(cls, n: int) -> PartialTranslation:
        return cls(tuple(range(n)))

    @classmethod
    def empty(cls, n: int) -> PartialTranslation:
        return cls((None,) * n)

    @classmethod
    def from_dict(cls, n: int, pairs: dict) -> PartialTranslation:
        return cls(tuple(pairs.get(x) for x in range(n)))

    @classmethod
    def from_cycles(cls, n: int, *cycles: Sequence[int]) -> PartialTranslation:
        """Permutation of ``0..n-1`` given in cycle notation."""
        images = list(range(n))
        for cycle in cycles:
            for a, b in zip(cycle, list(cycle[1:]) + [cycle[0]]):
                images[a] = b
        return cls(tuple(images))

    @property
    def n(self) -> int:
        return len(self.mapping)

    def __call__(self, x: int) -> int | None:
        return self.mapping[x]

    @property
    def domain(self) -> frozenset:
        return frozenset(x for x, v in enumerate(self.mapping) if v is not None)

    @property
    def range(self) -> frozenset:
        return frozenset(v for v in self.mapping if v is not None)

    def is_total(self) -> bool:
        return None not in self.mapping

    def inverse(self) -> PartialTranslation:
        inv = [None] * self.n
        for x, v in enumerate(self.mapping):
            if v is not None:
                inv[v] = x
        return PartialTranslation(tuple(inv))

    def compose(self, other: PartialTranslation) -> PartialTranslation:
        """``self o other``: apply ``other`` first."""
        out = []
        for v in other.mapping:
            out.append(None if v is None else self.mapping[v])
        return PartialTranslation(tuple(out))

    def graph(self) -> Entourage:
        return Entourage(self.n, frozenset((v, x) for x, v in enumerate(self.mapping) if v is not None))

    def matrix(self) -> np.ndarray:
        """0/1 matrix sending the basis vector at ``x`` to the one at ``gamma(x)``."""
        m = np.zeros((self.n, self.n))
        for x, v in enumerate(self.mapping):
            if v is not None:
                m[v, x] = 1.0
        return m

    def to_json(self, name: str = "g") -> dict:
        return {"name": name, "map": list(self.mapping)}


def is_involution(p: PartialTranslation) -> bool:
    """True when ``p`` is total and ``p(p(x)) == x`` for every ``x``."""
    if not p.is_total():
        return False
    return all(p.mapping[v] == x for x, v in enumerate(p.mapping))


@dataclass(frozen=True)
class ActionGenerators:
    """Named generators of an action on ``0..n-1``."""

    n: int
    generators: tuple
    names: tuple = ()

    def __post_init__(self):
        gens = tuple(self.generators)
        names = tuple(self.names) or tuple(f"s{i}" for i in range(len(gens)))
        if len(names) != len(gens):
            raise ValueError("one name per generator")
        for name, g in zip(names, gens):
            if g.n != self.n:
                raise ValueError(f"generator {name!r} acts on {g.n} points, expected {self.n}")
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "names", names)

    def __len__(self):
        return len(self.generators)

    def is_symmetric(self) -> bool:
        present = set(self.generators)
        return all(g.inverse() in present for g in self.generators)

    def symmetrized(self) -> ActionGenerators:
        """Append the inverse of every generator whose inverse is missing."""
        gens = list(self.generators)
        names = list(self.names)
        present = set(gens)
        for g, name in zip(self.generators, self.names):
            inv = g.inverse()
            if inv not in present:
                gens.append(inv)
                names.append(name + "^-1")
                present.add(inv)
        return ActionGenerators(self.n, tuple(gens), tuple(names))

    @classmethod
    def cyclic(cls, n: int) -> ActionGenerators:
        """Left regular action of Z/n on itself, S = {+1, -1}."""
        plus = PartialTranslation(tuple((x + 1) % n for x in range(n)))
        return cls(n, (plus,), ("+1",)).symmetrized()

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "generators": [g.to_json(name) for name, g in zip(self.names, self.generators)],
        }

    @classmethod
    def from_json(cls, data: dict) -> ActionGenerators:
        n = int(data["n"])
        gens, names = [], []
        for entry in data["generators"]:
            mapping = tuple(entry["map"])
            if len(mapping) != n:
                raise ValueError(f"generator {entry.get('name')!r}: map has {len(mapping)} entries, expected {n}")
            gens.append(PartialTranslation(mapping))
            names.append(str(entry.get("name", f"s{len(names)}")))
        return cls(n, tuple(gens), tuple(names))


def schreier_graph(gens: ActionGenerators) -> UlfGraph:
    """Graph on the acted-upon set with edges ``{(s x, x)}`` for generators ``s``.

    The generator list is symmetrized first.  Fixed points give self-loops.

    Raises
    ------
    ValueError
        If some generator is not a bijection, naming the generator.
    """
    for name, g in zip(gens.names, gens.generators):
        if not g.is_total() or len(g.range) != g.n:
            raise ValueError(f"generator {name!r} is not a bijection of the ground set")
    sym = gens.symmetrized()
    edges = set()
    for g in sym.generators:
        for x, sx in enumerate(g.mapping):
            edges.add((sx, x))
    return UlfGraph(gens.n, edges)


@dataclass(frozen=True, eq=False)
class BoxSpace:
    """Disjoint union of finite connected graphs pushed apart from each other.

    Vertex ``x`` of component ``i`` has ambient index ``offsets[i] + x``.
    Components are numbered from 1 in the separation function
    ``f(i) = i + diam(V_i)``.
    """

    components: tuple
    basepoints: tuple = field(default=())

    def __post_init__(self):
        comps = tuple(self.components)
        basepoints = tuple(self.basepoints) or (0,) * len(comps)
        if len(basepoints) != len(comps):
            raise ValueError("one basepoint per component")
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "basepoints", basepoints)
        object.__setattr__(self, "_metric", None)
        object.__setattr__(self, "_lock", threading.Lock())

    @property
    def sizes(self) -> list[int]:
        return [g.n for g in self.components]

    @property
    def n(self) -> int:
        return sum(self.sizes)

    @property
    def offsets(self) -> list[int]:
        return np.concatenate([[0], np.cumsum(self.sizes)[:-1]]).astype(int).tolist() if self.components else []

    def blocks(self) -> list[np.ndarray]:
        """Ambient index sets ``V_1, V_2, ...``."""
        return [np.arange(o, o + g.n) for o, g in zip(self.offsets, self.components)]

    def component_of(self) -> np.ndarray:
        return np.repeat(np.arange(len(self.components)), self.sizes)

    def separation(self, i: int) -> float:
        """``f(i) = i + diam(V_i)`` for the zero-based component index ``i``."""
        return (i + 1) + self.components[i].metric.diameter()

    @property
    def metric(self) -> ExtendedMetric:
        if self._metric is None:
            with self._lock:
                if self._metric is None:
                    object.__setattr__(self, "_metric", self._ambient_metric())
        return self._metric

    def _ambient_metric(self) -> ExtendedMetric:
        table = np.zeros((self.n, self.n))
        to_base = []
        for g, b in zip(self.components, self.basepoints):
            to_base.append(g.metric.table[:, b])
        blocks = self.blocks()
        for i, bi in enumerate(blocks):
            for j, bj in enumerate(blocks):
                if i == j:
                    table[np.ix_(bi, bi)] = self.components[i].metric.table
                else:
                    gap = self.separation(i) + self.separation(j)
                    table[np.ix_(bi, bj)] = to_base[i][:, None] + gap + to_base[j][None, :]
        return ExtendedMetric(table)

    def cross_distance(self, i: int, j: int) -> float:
        """Smallest ambient distance between components ``i`` and ``j``."""
        if i == j:
            return 0.0
        blocks = self.blocks()
        return float(self.metric.table[np.ix_(blocks[i], blocks[j])].min())

    def to_json(self) -> dict:
        m = self.metric if self.n <= 2000 else None
        separations = []
        for i, bi in enumerate(self.blocks()):
            for j, bj in enumerate(self.blocks()):
                if i < j:
                    if m is not None:
                        dist = float(m.table[np.ix_(bi, bj)].min())
                    else:
                        dist = self.separation(i) + self.separation(j)
                    separations.append([i, j, int(dist)])
        return {
            "components": [g.to_json() for g in self.components],
            "basepoints": list(self.basepoints),
            "separations": separations,
        }

    @classmethod
    def from_json(cls, data: dict) -> BoxSpace:
        return box_space([UlfGraph.from_json(c) for c in data["components"]], data.get("basepoints"))


def box_space(components: Sequence[UlfGraph], basepoints: Sequence[int] | None = None) -> BoxSpace:
    """Assemble finite connected graphs into a box space.

    Cross-component distances go through the basepoints,
    ``d(x, y) = d_i(x, b_i) + f(i) + f(j) + d_j(b_j, y)``, so distinct
    components are at least ``f(i) + f(j)`` apart.

    Examples
    --------
    Two cycles C3 and C4 sit at distance (1 + 1) + (2 + 2) = 6:

    >>> c3 = UlfGraph(3, [(0, 1), (1, 2), (2, 0)])
    >>> c4 = UlfGraph(4, [(0, 1), (1, 2), (2, 3), (3, 0)])
    >>> box_space([c3, c4]).metric(0, 3)
    6.0
    """
    for i, g in enumerate(components):
        if g.n == 0:
            raise ValueError(f"component {i} is empty")
        if np.isinf(g.metric.diameter()):
            raise ValueError(f"component {i} is disconnected")
    basepoints = tuple(basepoints) if basepoints is not None else (0,) * len(components)
    for i, (g, b) in enumerate(zip(components, basepoints)):
        if not 0 <= b < g.n:
            raise ValueError(f"basepoint {b} outside component {i}")
    return BoxSpace(tuple(components), basepoints)


def two_by_two(gamma: PartialTranslation) -> PartialTranslation:
    """Involution of ``X + X`` encoded by the 2x2 block matrix of ``gamma``.

    Points ``x`` and ``n + x`` are the two copies of ``x``.  A point
    ``x`` of the domain is exchanged with ``gamma(x)`` in the second copy.
    First-copy points outside the domain and second-copy points outside the
    range stay fixed.
    """
    n = gamma.n
    out = list(range(2 * n))
    for x, v in enumerate(gamma.mapping):
        if v is not None:
            out[x] = n + v
            out[n + v] = x
    return PartialTranslation(tuple(out))


def two_by_two_matrix(gamma: PartialTranslation) -> np.ndarray:
    """The block matrix ``[[1 - g g*, g], [g*, 1 - g* g]]`` with ``g[x, gamma(x)] = 1``."""
    n = gamma.n
    g = gamma.matrix().T
    eye = np.eye(n)
    return np.block([[eye - g @ g.T, g], [g.T, eye - g.T @ g]])


def edge_color_decompose(s: Entourage) -> list[PartialTranslation]:
    """Write a symmetric relation containing the diagonal as a union of involution graphs.

    Off-diagonal pairs are coloured greedily in lexicographic order with the
    first colour unused at either endpoint.  Each colour class is a matching,
    and its involution swaps matched points and fixes the rest.  An identity
    involution is appended when some vertex is matched in every class, so that
    its self-loop is still covered.  At most ``2d - 1`` involutions are
    returned, ``d`` being the largest row count of ``s``.
    """
    if not s.is_symmetric():
        raise ValueError("relation is not symmetric")
    if not s.contains_diagonal():
        missing = [x for x in range(s.n) if (x, x) not in s.pairs]
        raise ValueError(f"relation misses diagonal pairs at {missing[:5]}")
    n = s.n
    if n == 0:
        return []
    colors_at: list[set] = [set() for _ in range(n)]
    classes: list[dict] = []
    for x, y in sorted(p for p in s.pairs if p[0] < p[1]):
        c = 0
        while c in colors_at[x] or c in colors_at[y]:
            c += 1
        if c == len(classes):
            classes.append({})
        classes[c][x] = y
        classes[c][y] = x
        colors_at[x].add(c)
        colors_at[y].add(c)
    involutions = [PartialTranslation(tuple(m.get(x, x) for x in range(n))) for m in classes]
    if not classes or any(len(colors_at[x]) == len(classes) for x in range(n)):
        involutions.append(PartialTranslation.identity(n))
    return involutions


def realize_as_action(gens: Sequence[Entourage], n: int | None = None) -> ActionGenerators:
    """Involutions whose Schreier graph generates the same coarse structure as ``gens``.

    Each generator is symmetrized, joined with the diagonal and decomposed
    with :func:`edge_color_decompose`.
    """
    if gens:
        n = gens[0].n
    elif n is None:
        n = 0
    involutions, names = [], []
    for i, e in enumerate(gens):
        if e.n != n:
            raise ValueError("generators must share one ground set")
        closed = e | inverse_entourage(e) | Entourage.diagonal(n)
        for j, inv in enumerate(edge_color_decompose(closed)):
            involutions.append(inv)
            names.append(f"g{i}c{j}")
    return ActionGenerators(n, tuple(involutions), tuple(names))

