"""Seeded randomized verification suites.

Each suite draws its instances from ``numpy.random.default_rng(seed)`` and
returns a :class:`SuiteResult`; identical seeds give identical results.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import generators as gen
from .actions import edge_color_decompose, is_involution, two_by_two, two_by_two_matrix
from .coarse import Entourage, filtration_from_generators, metric_from_filtration
from .propa import ProbMeasure, smooth
from .repcheck import compression_state_identity, ghost_vanishing, lemma_inequalities, translate
from .roe import h_gamma

__all__ = [
    "SuiteResult",
    "smoothing_suite",
    "coloring_suite",
    "two_by_two_suite",
    "repcheck_suite",
    "fixed_point_suite",
    "metric_reconstruction_suite",
    "run_all",
]


@dataclass
class SuiteResult:
    name: str
    seed: int
    cases: int = 0
    failures: list = field(default_factory=list)
    stats: dict = field(default_factory=dict)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return not self.failures

    def worst(self, key: str, value: float, lowest: bool = False) -> None:
        old = self.stats.get(key)
        if old is None or (value < old if lowest else value > old):
            self.stats[key] = float(value)

    def to_json(self, timing: bool = False) -> dict:
        out = {
            "suite": self.name,
            "seed": self.seed,
            "cases": self.cases,
            "pass": self.passed,
            "failures": self.failures[:20],
            "stats": dict(sorted(self.stats.items())),
        }
        if timing:
            out["seconds"] = self.seconds
        return out


def _random_measure(rng: np.random.Generator, n: int) -> ProbMeasure:
    k = int(rng.integers(1, min(5, n) + 1))
    support = rng.choice(n, size=k, replace=False)
    w = np.zeros(n)
    w[support] = rng.random(k) + 0.05
    return ProbMeasure(w / w.sum())


def smoothing_suite(seed: int = 0, trials: int = 200, eps_values=(0.5, 0.2, 0.1)) -> SuiteResult:
    res = SuiteResult("smoothing", seed)
    start = time.perf_counter()
    rng = np.random.default_rng(seed)
    for t in range(trials):
        n = int(rng.integers(1, 61))
        g = gen.random_bounded_degree_graph(rng, n, int(rng.integers(0, 7)))
        eta = _random_measure(rng, n)
        for eps in eps_values:
            smoothed, L, report = smooth(eta, eps, g)
            res.cases += 1
            res.worst("l1_slack_min", eps - report.l1_distance, lowest=True)
            res.worst("tail_margin_min", report.worst_tail_margin, lowest=True)
            res.worst("normalization_error", abs(smoothed.weights.sum() - 1))
            if not report.passed:
                res.failures.append({"trial": t, "eps": eps, "report": report.to_json()})
    res.seconds = time.perf_counter() - start
    return res


def coloring_suite(seed: int = 0, trials: int = 200, max_d: int = 6) -> SuiteResult:
    res = SuiteResult("edge-coloring", seed)
    start = time.perf_counter()
    rng = np.random.default_rng(seed)
    for t in range(trials):
        n = int(rng.integers(1, 31))
        d = int(rng.integers(1, max_d + 1))
        s = gen.random_symmetric_relation(rng, n, d, density=float(rng.random()))
        d_actual = int(s.row_degrees().max())
        invs = edge_color_decompose(s)
        union = frozenset().union(*(g.graph().pairs for g in invs)) if invs else frozenset()
        res.cases += 1
        res.worst("max_count_over_bound", len(invs) - (2 * d_actual - 1))
        problems = []
        if len(invs) > 2 * d_actual - 1:
            problems.append(f"{len(invs)} involutions for d={d_actual}")
        if union != s.pairs:
            problems.append("union of graphs differs from the relation")
        if not all(is_involution(g) for g in invs):
            problems.append("non-involution in output")
        if problems:
            res.failures.append({"trial": t, "problems": problems})
    res.seconds = time.perf_counter() - start
    return res


def two_by_two_suite(seed: int = 0, trials: int = 100, max_n: int = 50) -> SuiteResult:
    res = SuiteResult("two-by-two", seed)
    start = time.perf_counter()
    rng = np.random.default_rng(seed)
    for t in range(trials):
        n = int(rng.integers(1, max_n + 1))
        gamma = gen.random_partial_injection(rng, n)
        u = two_by_two(gamma)
        m = two_by_two_matrix(gamma)
        problems = []
        if not is_involution(u):
            problems.append("U(gamma) squared is not the identity")
        if not (set(np.unique(m)) <= {0.0, 1.0} and np.all(m.sum(0) == 1) and np.all(m.sum(1) == 1)):
            problems.append("block matrix is not a permutation matrix")
        perm = np.zeros_like(m)
        perm[list(u.mapping), np.arange(2 * n)] = 1
        if not np.array_equal(perm, m):
            problems.append("involution disagrees with the block matrix")
        for x in range(n):
            v = gamma(x)
            if v is not None and u(x) != n + v:
                problems.append(f"domain point {x} not sent to copy of gamma(x)")
            if v is None and u(x) != x:
                problems.append(f"first-copy point {x} outside the domain moved")
            if x not in gamma.range and u(n + x) != n + x:
                problems.append(f"second-copy point {x} outside the range moved")
        res.cases += 1
        if problems:
            res.failures.append({"trial": t, "problems": problems[:3]})
    res.seconds = time.perf_counter() - start
    return res


def _random_complex(rng: np.random.Generator, shape) -> np.ndarray:
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def repcheck_suite(seed: int = 0, trials: int = 200) -> SuiteResult:
    res = SuiteResult("rep-check", seed)
    start = time.perf_counter()
    rng = np.random.default_rng(seed)
    for t in range(trials):
        n = int(rng.integers(1, 9))
        k = int(rng.integers(1, 4))
        zeta = _random_complex(rng, (n, n, k))
        zeta /= np.linalg.norm(zeta)
        h = rng.random(n) * 2 + 0.1
        gamma = gen.random_permutation(rng, n)
        f = rng.standard_normal(n)
        for name, rep in lemma_inequalities(zeta, h, gamma, f, seed=seed).items():
            key = "slack_min" if name == "inner-product-bound" else f"{name}_residual"
            value = rep.slack if name == "inner-product-bound" else rep.residual
            res.worst(key, value, lowest=name == "inner-product-bound")
            if not rep.passed:
                res.failures.append({"trial": t, "check": name, "report": rep.to_json()})

        g = gen.random_bounded_degree_graph(rng, n, 3)
        d = g.metric
        radius = int(rng.integers(0, 4))
        eta = _random_complex(rng, (n, n)) * (d.table <= radius)
        a = _random_complex(rng, (n, n))
        rep = compression_state_identity(eta, a, radius, d, seed=seed)
        res.worst("compression_residual", rep.residual)
        if not rep.passed:
            res.failures.append({"trial": t, "check": rep.check, "report": rep.to_json()})

        block = rng.random(n) < 0.4
        a_local = _random_complex(rng, (n, n)) * np.outer(block, block)
        live = np.zeros(n, dtype=bool)
        for y in range(n):
            ball = d.table[y] <= radius
            live[y] = np.any(a_local[np.ix_(ball, ball)] != 0)
        eta_far = _random_complex(rng, (n, n)) * (d.table <= radius) * (~live)[None, :]
        rep = ghost_vanishing(eta_far, a_local, radius, d, seed=seed)
        if not rep.passed:
            res.failures.append({"trial": t, "check": rep.check, "report": rep.to_json()})
        res.cases += 1
    res.seconds = time.perf_counter() - start
    return res


def fixed_point_suite(seed: int = 0, trials: int = 50) -> SuiteResult:
    res = SuiteResult("fixed-point", seed)
    start = time.perf_counter()
    rng = np.random.default_rng(seed)
    for t in range(trials):
        n = int(rng.integers(1, 41))
        xi = rng.random(n) + 1e-3
        xi /= np.linalg.norm(xi)
        gamma = gen.random_permutation(rng, n)
        h, _ = h_gamma(xi, gamma)
        moved = translate(np.diag(xi), h, gamma)
        err = float(np.abs(moved - np.diag(xi)).max())
        res.cases += 1
        res.worst("max_error", err)
        if err > 1e-12:
            res.failures.append({"trial": t, "error": err})
    res.seconds = time.perf_counter() - start
    return res


def metric_reconstruction_suite(seed: int = 0, trials: int = 50) -> SuiteResult:
    res = SuiteResult("metric-reconstruction", seed)
    start = time.perf_counter()
    rng = np.random.default_rng(seed)
    for t in range(trials):
        n = int(rng.integers(1, 31))
        g = gen.random_connected_graph(rng, n, extra_edges=int(rng.integers(0, n + 1)))
        depth = int(g.metric.diameter())
        generator = g.entourage() | Entourage.diagonal(n)
        rebuilt = metric_from_filtration(filtration_from_generators([generator], depth))
        res.cases += 1
        if rebuilt != g.metric:
            res.failures.append({"trial": t, "n": n})
    res.seconds = time.perf_counter() - start
    return res


SUITES = {
    "smoothing": smoothing_suite,
    "edge-coloring": coloring_suite,
    "two-by-two": two_by_two_suite,
    "rep-check": repcheck_suite,
    "fixed-point": fixed_point_suite,
    "metric-reconstruction": metric_reconstruction_suite,
}


def run_all(seed: int = 0) -> list[SuiteResult]:
    return [suite(seed) for suite in SUITES.values()]
