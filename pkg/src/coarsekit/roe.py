"""Finite-propagation operators on a finite extended metric space.

Operators are dense complex (or real) matrices indexed by ``X x X``.  The
module covers propagation, the ball compression, ghost decay profiles,
block-diagonal assembly over sparse families, nonnegative Perron vectors and
the correction functions that make a vector approximately invariant under a
translation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .actions import BoxSpace, PartialTranslation
from .coarse import INF, ExtendedMetric

__all__ = [
    "PropOperator",
    "SparseFamily",
    "BallCompression",
    "TopEigenvector",
    "propagation",
    "compress",
    "ghost_profile",
    "is_ghost_like",
    "sparse_diagonal",
    "block_constant_projection",
    "block_constant_ghost",
    "normalized_adjacency",
    "nonneg_top_eigenvector",
    "h_gamma",
    "operator_norm",
]

NORM_TOL = 1e-9
PERRON_GAP = 1e-8
PERRON_RESIDUAL = 1e-6


def _entries(a) -> np.ndarray:
    return a.entries if isinstance(a, PropOperator) else np.asarray(a)


@dataclass(frozen=True, eq=False)
class PropOperator:
    """Matrix on ``X x X`` with propagation tracked against ``metric``."""

    entries: np.ndarray
    metric: ExtendedMetric | None = None

    def __post_init__(self):
        entries = np.asarray(self.entries)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise ValueError(f"operator must be square, got shape {entries.shape}")
        if self.metric is not None and self.metric.n != entries.shape[0]:
            raise ValueError(f"dimension mismatch: operator {entries.shape[0]}, metric {self.metric.n}")
        object.__setattr__(self, "entries", entries)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def prop(self) -> float:
        if self.metric is None:
            raise ValueError("no metric attached")
        return propagation(self.entries, self.metric)

    def __matmul__(self, other: PropOperator) -> PropOperator:
        return PropOperator(self.entries @ _entries(other), self.metric)

    def to_json(self) -> dict:
        rows, cols = np.nonzero(self.entries)
        vals = self.entries[rows, cols].astype(complex)
        return {
            "n": self.n,
            "triplets": [[int(i), int(j), float(v.real), float(v.imag)] for i, j, v in zip(rows, cols, vals)],
        }

    @classmethod
    def from_json(cls, data: dict, metric: ExtendedMetric | None = None) -> PropOperator:
        n = int(data["n"])
        a = np.zeros((n, n), dtype=complex)
        for i, j, re, im in data["triplets"]:
            a[int(i), int(j)] += complex(re, im)
        if not np.any(a.imag):
            a = a.real.copy()
        return cls(a, metric)


def propagation(a, d: ExtendedMetric) -> float:
    """Largest distance spanned by a nonzero entry, ``INF`` if one spans components.

    Examples
    --------
    >>> from coarsekit.coarse import UlfGraph
    >>> c5 = UlfGraph(5, [(i, (i + 1) % 5) for i in range(5)])
    >>> propagation(c5.adjacency(), c5.metric)
    1.0
    """
    a = _entries(a)
    if a.shape != d.table.shape:
        raise ValueError(f"dimension mismatch: operator {a.shape}, metric {d.table.shape}")
    support = a != 0
    if not support.any():
        return 0.0
    return float(d.table[support].max())


@dataclass(frozen=True, eq=False)
class BallCompression:
    """The blocks ``P_B a P_B*`` for the balls ``B = Ball(x, radius)``."""

    radius: float
    balls: tuple
    blocks: tuple

    def __len__(self):
        return len(self.blocks)

    def embed(self, x: int) -> np.ndarray:
        """Block at ``x`` placed back into an ``n x n`` matrix."""
        n = len(self.balls)
        out = np.zeros((n, n), dtype=self.blocks[x].dtype)
        ball = self.balls[x]
        out[np.ix_(ball, ball)] = self.blocks[x]
        return out

    def zero_outside(self) -> list[int]:
        """Centres whose block has a nonzero entry."""
        return [x for x, blk in enumerate(self.blocks) if np.any(blk != 0)]


def compress(a, radius: float, d: ExtendedMetric) -> BallCompression:
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    a = _entries(a)
    balls = tuple(d.ball(x, radius) for x in range(d.n))
    blocks = tuple(a[np.ix_(ball, ball)].copy() for ball in balls)
    return BallCompression(radius, balls, blocks)


def ghost_profile(a, exhaustion: Sequence[int] | None = None) -> np.ndarray:
    """Tail maxima of ``|a(x, y)|`` along an exhaustion of the vertex set.

    ``g[k]`` is the largest ``|a(x, y)|`` over pairs where ``x`` or ``y``
    sits at position ``>= k`` of ``exhaustion`` (default: vertex order).
    The profile is nonincreasing; a ghost is an operator whose profile tends
    to zero along growing spaces.
    """
    a = np.abs(_entries(a))
    n = a.shape[0]
    order = np.arange(n) if exhaustion is None else np.asarray(exhaustion)
    if sorted(order.tolist()) != list(range(n)):
        raise ValueError("exhaustion must be a permutation of the vertices")
    rank = np.empty(n, dtype=int)
    rank[order] = np.arange(n)
    level = np.maximum(rank[:, None], rank[None, :])
    per_level = np.zeros(n)
    np.maximum.at(per_level, level.ravel(), a.ravel())
    return np.maximum.accumulate(per_level[::-1])[::-1]


def is_ghost_like(profile: np.ndarray, delta: float, k: int) -> bool:
    """``profile[k] <= delta``; true past the end of the profile."""
    return k >= len(profile) or bool(profile[k] <= delta)


@dataclass(frozen=True, eq=False)
class SparseFamily:
    """Disjoint vertex blocks ``V_1, ..., V_k`` of an ambient metric space."""

    blocks: tuple
    metric: ExtendedMetric

    def __post_init__(self):
        blocks = tuple(np.asarray(b, dtype=int) for b in self.blocks)
        seen = set()
        for i, b in enumerate(blocks):
            overlap = seen.intersection(b.tolist())
            if overlap:
                raise ValueError(f"block {i} overlaps earlier blocks at {sorted(overlap)[:5]}")
            seen.update(b.tolist())
        object.__setattr__(self, "blocks", blocks)

    @classmethod
    def from_box_space(cls, b: BoxSpace) -> SparseFamily:
        return cls(tuple(b.blocks()), b.metric)

    def distances(self) -> np.ndarray:
        """``dist(V_i, V_j)``; zero on the diagonal."""
        k = len(self.blocks)
        out = np.zeros((k, k))
        for i in range(k):
            for j in range(i + 1, k):
                out[i, j] = out[j, i] = self.metric.table[np.ix_(self.blocks[i], self.blocks[j])].min()
        return out

    def is_sparse_at(self, scale: float) -> bool:
        dist = self.distances()
        off = ~np.eye(len(self.blocks), dtype=bool)
        return bool(np.all(dist[off] >= scale))

    def diameters(self) -> list[float]:
        return [float(self.metric.table[np.ix_(b, b)].max()) if len(b) else 0.0 for b in self.blocks]


def operator_norm(a) -> float:
    """Largest singular value."""
    a = _entries(a)
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


def sparse_diagonal(fam: SparseFamily, blocks: Sequence) -> PropOperator:
    """Assemble ``T = sum_i P_{V_i} T_i P_{V_i}`` from positive norm-one blocks.

    Raises
    ------
    ValueError
        On a size mismatch, a block with a negative eigenvalue beyond
        tolerance, or a block whose norm differs from 1 by more than 1e-9.
    """
    if len(blocks) != len(fam.blocks):
        raise ValueError(f"{len(blocks)} blocks for {len(fam.blocks)} vertex sets")
    mats = [_entries(t) for t in blocks]
    dtype = np.result_type(*mats) if mats else float
    out = np.zeros((fam.metric.n, fam.metric.n), dtype=dtype)
    for i, (idx, t) in enumerate(zip(fam.blocks, mats)):
        if t.shape != (len(idx), len(idx)):
            raise ValueError(f"block {i} has shape {t.shape}, expected {(len(idx), len(idx))}")
        if not np.allclose(t, t.conj().T, atol=NORM_TOL):
            raise ValueError(f"block {i} is not self-adjoint")
        eig = np.linalg.eigvalsh(t)
        if eig[0] < -NORM_TOL:
            raise ValueError(f"block {i} is not positive: smallest eigenvalue {eig[0]:.3e}")
        if abs(eig[-1] - 1.0) > NORM_TOL:
            raise ValueError(f"block {i} does not have norm 1: measured {eig[-1]:.12g}")
        out[np.ix_(idx, idx)] = t
    return PropOperator(out, fam.metric)


def normalized_adjacency(g) -> np.ndarray:
    """Adjacency divided by the common degree of a regular graph.

    A single vertex without edges gets the averaging operator ``[1]``.
    """
    a = g.adjacency().astype(float)
    deg = a.sum(axis=1)
    if g.n == 1 and deg[0] == 0:
        return np.ones((1, 1))
    if not np.all(deg == deg[0]):
        raise ValueError(f"graph is not regular: degrees range over {int(deg.min())}..{int(deg.max())}")
    return a / deg[0]


def block_constant_projection(b: BoxSpace) -> PropOperator:
    """``sum_i J_i / |V_i|``, the projection onto blockwise constant vectors."""
    out = np.zeros((b.n, b.n))
    for idx in b.blocks():
        out[np.ix_(idx, idx)] = 1.0 / len(idx)
    return PropOperator(out, b.metric)


def block_constant_ghost(b: BoxSpace, k: int) -> tuple[PropOperator, np.ndarray]:
    """Finite-propagation approximation of :func:`block_constant_projection`.

    Each block is ``((1 + A) / 2) ** k`` for the normalized adjacency ``A``
    of the (regular, connected) component, so propagation is at most ``k``.
    Returns the operator and, per component, the spectral bound
    ``((1 + lambda_2) / 2) ** k`` on its distance to ``J / |V|``, where
    ``lambda_2`` is the second largest eigenvalue of ``A``.
    """
    if k < 0:
        raise ValueError("polynomial degree must be nonnegative")
    out = np.zeros((b.n, b.n))
    bounds = np.zeros(len(b.components))
    for i, (g, idx) in enumerate(zip(b.components, b.blocks())):
        try:
            avg = normalized_adjacency(g)
        except ValueError as exc:
            raise ValueError(f"component {i}: {exc}") from None
        lazy = (np.eye(g.n) + avg) / 2
        out[np.ix_(idx, idx)] = np.linalg.matrix_power(lazy, k)
        if g.n > 1:
            lam2 = np.linalg.eigvalsh(avg)[-2]
            bounds[i] = ((1 + lam2) / 2) ** k
    return PropOperator(out, b.metric), bounds


@dataclass(frozen=True, eq=False)
class TopEigenvector:
    """Nonnegative top eigenvector of ``U* t U`` for a diagonal unitary ``U``.

    ``phases`` is the diagonal of ``U``; ``residual`` is ``||t' xi - xi||``
    and ``eigen_residual`` is ``||t' xi - eigenvalue * xi||`` with
    ``t' = U* t U``.
    """

    xi: np.ndarray
    phases: np.ndarray
    eigenvalue: float
    gap: float
    residual: float
    eigen_residual: float

    def conjugated(self, t) -> np.ndarray:
        t = _entries(t)
        return self.phases.conj()[:, None] * t * self.phases[None, :]


def nonneg_top_eigenvector(t) -> TopEigenvector:
    """Top eigenvector made entrywise nonnegative by a diagonal phase change.

    When the top eigenvalue is repeated (gap below 1e-8) no phase change is
    applied: the entrywise modulus of one top eigenvector is used as is and
    must itself be an eigenvector to within 1e-6.

    Examples
    --------
    >>> res = nonneg_top_eigenvector(np.full((4, 4), 0.25))
    >>> np.round(res.xi, 12).tolist()
    [0.5, 0.5, 0.5, 0.5]
    """
    t = _entries(t)
    n = t.shape[0]
    if n == 0:
        raise ValueError("empty operator")
    vals, vecs = np.linalg.eigh(t)
    lam = float(vals[-1])
    gap = float(vals[-1] - vals[-2]) if n > 1 else INF
    v = vecs[:, -1]
    xi = np.abs(v)
    if gap < PERRON_GAP:
        phases = np.ones(n, dtype=complex)
    else:
        nz = np.flatnonzero(xi > 1e-14)
        phases = np.ones(n, dtype=complex)
        phases[nz] = v[nz] / xi[nz]
        phases /= phases[nz[0]]
        if np.allclose(phases.imag, 0):
            phases = phases.real.astype(complex)
    tc = phases.conj()[:, None] * t * phases[None, :]
    image = tc @ xi
    eigen_residual = float(np.linalg.norm(image - lam * xi))
    if gap < PERRON_GAP and eigen_residual > PERRON_RESIDUAL:
        raise ValueError(
            f"top eigenspace is degenerate (gap {gap:.2e}) and has no nonnegative representative: "
            f"residual {eigen_residual:.2e}"
        )
    if np.allclose(phases.imag, 0):
        phases = phases.real
    return TopEigenvector(
        xi=xi,
        phases=phases,
        eigenvalue=lam,
        gap=gap,
        residual=float(np.linalg.norm(image - xi)),
        eigen_residual=eigen_residual,
    )


def h_gamma(
    xi: np.ndarray,
    gamma: PartialTranslation,
    supports: Sequence[np.ndarray] | None = None,
    delta: float = 1e-6,
) -> tuple[np.ndarray, float]:
    """Positive diagonal ``h`` with ``h(x) * xi(gamma^-1 x) ~= xi(x)`` on the supports.

    On each support block ``h(x) = xi(x) / xi(gamma^-1 x)``, where both
    values are floored at ``delta * min(xi > 0)``; a preimage outside the
    block of ``x`` counts as the floor.  Off the supports ``h = 1``.

    Returns ``h`` and the sup-norm error ``max |h * (xi o gamma^-1) - xi|``
    over the supports.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    xi = np.asarray(xi, dtype=float)
    n = xi.shape[0]
    if gamma.n != n:
        raise ValueError(f"translation acts on {gamma.n} points, vector has {n}")
    if np.any(xi < 0):
        raise ValueError("xi must be entrywise nonnegative")
    if supports is None:
        supports = [np.arange(n)]
    positive = xi[xi > 0]
    floor = delta * (positive.min() if positive.size else 1.0)
    inv = gamma.inverse().mapping
    block_of = np.full(n, -1)
    for i, idx in enumerate(supports):
        block_of[np.asarray(idx, dtype=int)] = i
    h = np.ones(n)
    err = 0.0
    for x in np.flatnonzero(block_of >= 0):
        pre = inv[x]
        inside = pre is not None and block_of[pre] == block_of[x]
        shifted = xi[pre] if inside else 0.0
        h[x] = max(xi[x], floor) / max(shifted, floor)
        err = max(err, abs(h[x] * shifted - xi[x]))
    return h, float(err)
