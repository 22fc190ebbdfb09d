"""Finite-scale property A: probability smoothing and ball-average witnesses."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .coarse import ExtendedMetric, UlfGraph

__all__ = [
    "ProbMeasure",
    "Witness",
    "SmoothingReport",
    "smoothing_constant",
    "smoothing_sum",
    "smooth",
    "verify_smoothing",
    "ball_average_witness",
    "witness_quality",
]

NORMALIZATION_TOL = 1e-12
CHECK_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class ProbMeasure:
    """Probability vector on ``0..n-1``."""

    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1:
            raise ValueError("weights must be one-dimensional")
        if np.any(w < 0):
            raise ValueError("weights must be nonnegative")
        if abs(w.sum() - 1.0) > NORMALIZATION_TOL:
            raise ValueError(f"weights sum to {w.sum():.15g}, not 1")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @classmethod
    def point_mass(cls, n: int, x: int) -> ProbMeasure:
        w = np.zeros(n)
        w[x] = 1.0
        return cls(w)

    @classmethod
    def uniform_on(cls, n: int, support) -> ProbMeasure:
        w = np.zeros(n)
        support = np.asarray(support, dtype=int)
        w[support] = 1.0 / len(support)
        return cls(w)

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    @property
    def support(self) -> np.ndarray:
        return np.flatnonzero(self.weights > 0)


def _weights(eta) -> np.ndarray:
    return eta.weights if isinstance(eta, ProbMeasure) else np.asarray(eta, dtype=float)


def smoothing_constant(max_degree: int, eps: float) -> float:
    """``L = max(1, M (1 + 1/eps))``."""
    if not 0 < eps < 1:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    if max_degree < 0:
        raise ValueError("max degree must be nonnegative")
    return max(1.0, max_degree * (1 + 1 / eps))


def smoothing_sum(eta, L: float, d: ExtendedMetric) -> np.ndarray:
    """Unnormalized ``sum_w L ** -d(x, w) * eta(w)``; infinite distances weigh 0."""
    w = _weights(eta)
    with np.errstate(over="ignore"):
        kernel = np.power(float(L), -d.table)
    kernel[np.isinf(d.table)] = 0.0
    return kernel @ w


@dataclass(frozen=True)
class SmoothingReport:
    eps: float
    L: float
    l1_distance: float
    worst_edge_ratio: float
    worst_tail_margin: float
    l1_ok: bool
    ratio_ok: bool
    tail_ok: bool

    @property
    def passed(self) -> bool:
        return self.l1_ok and self.ratio_ok and self.tail_ok

    def to_json(self) -> dict:
        out = dict(self.__dict__)
        for key in ("worst_edge_ratio", "worst_tail_margin"):
            if math.isinf(out[key]):
                out[key] = "inf" if out[key] > 0 else "-inf"
        out["pass"] = self.passed
        return out


def smooth(eta, eps: float, g: UlfGraph) -> tuple[ProbMeasure, float, SmoothingReport]:
    """Spread ``eta`` geometrically over ``g``.

    The sum is built with ``eps / 3`` and normalized.  Against the caller's
    ``eps`` the result then satisfies: l1 distance to ``eta`` at most
    ``eps``, neighbour ratios within ``[1/L, L]``, and mass at most
    ``eps ** r`` at distance ``>= r`` from the support of ``eta``.

    Returns the smoothed measure, the constant ``L`` used and the
    verification report.
    """
    if not 0 < eps < 1:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    eta = eta if isinstance(eta, ProbMeasure) else ProbMeasure(eta)
    if eta.n != g.n:
        raise ValueError(f"measure lives on {eta.n} points, graph has {g.n}")
    L = smoothing_constant(g.max_degree, eps / 3)
    raw = smoothing_sum(eta, L, g.metric)
    smoothed = raw / raw.sum()
    # absorb the last-ulp drift of the division
    smoothed = ProbMeasure(smoothed / smoothed.sum())
    return smoothed, L, verify_smoothing(eta, smoothed, eps, L, g)


def verify_smoothing(eta, eta_prime, eps: float, L: float, g: UlfGraph) -> SmoothingReport:
    """Measure the three smoothing conditions exactly.

    The tail bound is checked on the shells ``{x : dist(x, supp eta) >= r}``;
    any vertex set at distance ``r`` from the support lies inside the
    ``r``-shell, so these are the extremal cases.
    """
    w = _weights(eta)
    wp = _weights(eta_prime)
    if w.shape != (g.n,) or wp.shape != (g.n,):
        raise ValueError("measure and graph sizes differ")
    l1 = float(np.abs(w - wp).sum())

    worst_ratio = 1.0
    for u, v in g.edges:
        if u == v:
            continue
        a, b = wp[u], wp[v]
        if a == 0 and b == 0:
            continue
        ratio = math.inf if min(a, b) == 0 else max(a / b, b / a)
        worst_ratio = max(worst_ratio, ratio)

    support = np.flatnonzero(w > 0)
    if support.size:
        dist = g.metric.table[:, support].min(axis=1)
    else:
        dist = np.full(g.n, math.inf)
    margin = math.inf
    finite = dist[np.isfinite(dist)]
    top = int(finite.max()) if finite.size else 0
    for r in range(1, top + 1):
        mass = float(wp[dist >= r].sum())
        margin = min(margin, eps**r - mass)
    far = float(wp[np.isinf(dist)].sum())
    if far > 0:
        margin = min(margin, -far)

    return SmoothingReport(
        eps=eps,
        L=float(L),
        l1_distance=l1,
        worst_edge_ratio=float(worst_ratio),
        worst_tail_margin=float(margin),
        l1_ok=bool(l1 <= eps + CHECK_TOL),
        ratio_ok=bool(worst_ratio <= L * (1 + CHECK_TOL)),
        tail_ok=bool(margin >= -CHECK_TOL),
    )


@dataclass(frozen=True, eq=False)
class Witness:
    """One probability vector per vertex (rows of ``weights``), supported within ``radius``."""

    weights: np.ndarray
    radius: float

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise ValueError("witness weights must be an n x n array")
        object.__setattr__(self, "weights", w)

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    def respects_radius(self, d: ExtendedMetric) -> bool:
        return bool(np.all(d.table[self.weights > 0] <= self.radius))

    def to_csv_rows(self) -> list[tuple[int, int, float]]:
        rows, cols = np.nonzero(self.weights)
        return [(int(x), int(y), float(self.weights[x, y])) for x, y in zip(rows, cols)]


def ball_average_witness(space, radius: float) -> Witness:
    """``xi_x`` uniform on ``Ball(x, radius)``.

    ``space`` is anything with a ``metric`` attribute (a graph or a box
    space) or an :class:`ExtendedMetric` itself.
    """
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    d = space if isinstance(space, ExtendedMetric) else space.metric
    inside = (d.table <= radius).astype(float)
    return Witness(inside / inside.sum(axis=1, keepdims=True), radius)


def witness_quality(w: Witness, scale: float, d: ExtendedMetric) -> float:
    """``max ||xi_x - xi_y||_1`` over ``x != y`` with ``d(x, y) <= scale``; 0 if no such pair."""
    if scale < 0:
        raise ValueError("scale must be nonnegative")
    if w.n != d.n:
        raise ValueError("witness and metric sizes differ")
    worst = 0.0
    for x in range(w.n):
        near = np.flatnonzero(d.table[x, x + 1 :] <= scale) + x + 1
        if near.size:
            diffs = np.abs(w.weights[near] - w.weights[x]).sum(axis=1)
            worst = max(worst, float(diffs.max()))
    return worst
