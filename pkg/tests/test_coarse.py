import json
import math
from collections import deque

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coarsekit.coarse import (
    INF,
    Entourage,
    ExtendedMetric,
    Filtration,
    UlfGraph,
    check_ulf,
    compose_entourages,
    filtration_from_generators,
    graph_metric,
    inverse_entourage,
    metric_from_filtration,
)
from coarsekit.actions import PartialTranslation
from coarsekit.generators import cycle_graph, path_graph


def bfs_distances(g, source):
    dist = {source: 0}
    queue = deque([source])
    while queue:
        x = queue.popleft()
        for y in g.neighbors(x):
            if y not in dist:
                dist[y] = dist[x] + 1
                queue.append(y)
    return [dist.get(y, math.inf) for y in range(g.n)]


def brute_compose(e, f):
    return {(x, z) for x, y in e for y2, z in f if y == y2}


@st.composite
def graphs(draw, max_n=30):
    n = draw(st.integers(0, max_n))
    if n == 0:
        return UlfGraph(0)
    pairs = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=3 * n))
    return UlfGraph(n, pairs)


def relations(n):
    pair = st.tuples(st.integers(0, n - 1), st.integers(0, n - 1))
    return st.frozensets(pair, max_size=n * n // 2).map(lambda pairs: Entourage(n, pairs))


@st.composite
def relation_triples(draw, max_n=12):
    n = draw(st.integers(1, max_n))
    return draw(relations(n)), draw(relations(n)), draw(relations(n))


class TestGraphMetric:
    def test_path(self):
        assert graph_metric(path_graph(3))(0, 2) == 2

    def test_disconnected(self):
        assert graph_metric(UlfGraph(2))(0, 1) == INF

    def test_cycle_against_bfs(self):
        g = cycle_graph(5)
        assert bfs_distances(g, 0)[3] == 2
        assert graph_metric(g)(0, 3) == 2

    def test_empty_graph(self):
        assert graph_metric(UlfGraph(0)).n == 0

    @settings(max_examples=60, deadline=None)
    @given(graphs())
    def test_matches_bfs_oracle(self, g):
        d = graph_metric(g)
        for x in range(g.n):
            assert d.table[x].tolist() == bfs_distances(g, x)

    @settings(max_examples=60, deadline=None)
    @given(graphs())
    def test_metric_axioms_and_unit_distance(self, g):
        d = graph_metric(g)
        assert d.is_metric()
        for x in range(g.n):
            for y in range(g.n):
                assert (d(x, y) <= 1) == (x == y or g.has_edge(x, y))

    def test_self_loops_do_not_shorten(self):
        g = UlfGraph(3, [(0, 0), (0, 1), (1, 2)])
        assert graph_metric(g)(0, 0) == 0
        assert g.degrees().tolist() == [2, 2, 1]
        assert g.max_degree == 2

    def test_metric_is_cached(self):
        g = cycle_graph(6)
        assert g.metric is g.metric

    def test_json_roundtrip(self):
        g = UlfGraph(3, [(0, 1)])
        data = json.loads(json.dumps(g.to_json()))
        assert UlfGraph.from_json(data) == g
        m = ExtendedMetric.from_json(json.loads(json.dumps(g.metric.to_json())))
        assert m == g.metric
        assert g.metric.to_json()["distances"][0] == [0, 1, "inf"]

    def test_rejects_out_of_range_edge(self):
        with pytest.raises(ValueError):
            UlfGraph(2, [(0, 2)])


class TestEntourages:
    def test_identity_law(self):
        e = Entourage(4, {(0, 1), (2, 3), (3, 3)})
        assert compose_entourages(Entourage.diagonal(4), e) == e
        assert compose_entourages(e, Entourage.diagonal(4)) == e

    def test_single_chain(self):
        e = Entourage(3, {(0, 1)})
        f = Entourage(3, {(1, 2)})
        assert compose_entourages(e, f).pairs == {(0, 2)}

    def test_c4_square(self):
        g = cycle_graph(4)
        e = g.entourage() | Entourage.diagonal(4)
        square = compose_entourages(e, e)
        expected = brute_compose(e.pairs, e.pairs)
        assert square.pairs == expected
        assert expected == {(x, y) for x in range(4) for y in range(4) if g.metric(x, y) <= 2}

    def test_mismatched_ground_sets(self):
        with pytest.raises(ValueError):
            compose_entourages(Entourage(2), Entourage(3))

    def test_inverse(self):
        assert inverse_entourage(Entourage(2, {(0, 1)})).pairs == {(1, 0)}
        sym = cycle_graph(5).entourage()
        assert inverse_entourage(sym) == sym

    def test_inverse_of_translation_graph(self):
        gamma = PartialTranslation((2, None, 0, 1))
        assert inverse_entourage(gamma.graph()) == gamma.inverse().graph()

    @settings(max_examples=80, deadline=None)
    @given(relation_triples())
    def test_composition_associative(self, triple):
        e, f, h = triple
        left = compose_entourages(compose_entourages(e, f), h)
        right = compose_entourages(e, compose_entourages(f, h))
        assert left == right
        assert left.pairs == brute_compose(brute_compose(e.pairs, f.pairs), h.pairs)

    def test_json_roundtrip(self):
        e = Entourage(4)
        assert e.to_json() == {"n": 4, "pairs": []}
        e = Entourage(3, {(0, 1), (2, 2)})
        assert Entourage.from_json(e.to_json()) == e


class TestCheckUlf:
    def test_diagonal(self):
        assert check_ulf(Entourage.diagonal(7)) == 1

    def test_cycle_with_diagonal(self):
        assert check_ulf(cycle_graph(5).entourage() | Entourage.diagonal(5)) == 3

    def test_complete_relation(self):
        assert check_ulf(Entourage(4, {(x, y) for x in range(4) for y in range(4)})) == 4

    def test_asymmetric_uses_larger_side(self):
        star_in = Entourage(4, {(0, 0), (1, 0), (2, 0), (3, 0)})
        assert check_ulf(star_in) == 4


class TestFiltration:
    def test_empty_generators(self):
        f = filtration_from_generators([], 3, n=4)
        assert all(level == Entourage.diagonal(4) for level in f.levels)
        assert not f.violations()

    def test_cycle_level_two(self):
        g = cycle_graph(5)
        f = filtration_from_generators([g.entourage()], 2)
        assert f[2].pairs == {(x, y) for x in range(5) for y in range(5) if g.metric(x, y) <= 2}

    def test_transposition_stabilizes(self):
        swap = PartialTranslation.from_cycles(4, (0, 1)).graph()
        f = filtration_from_generators([swap], 4)
        expected = Entourage.diagonal(4) | Entourage(4, {(0, 1), (1, 0)})
        assert all(level == expected for level in f.levels[1:])

    def test_metric_from_filtration(self):
        g = path_graph(5)
        f = filtration_from_generators([g.entourage()], 2)
        d = metric_from_filtration(f)
        assert d(2, 2) == 0
        assert d(0, 2) == 2
        assert d(0, 3) == INF  # beyond the truncation depth
        full = metric_from_filtration(filtration_from_generators([g.entourage()], 4))
        assert full == g.metric

    def test_violations_detected(self):
        bad = Filtration((Entourage.diagonal(3), Entourage(3, {(0, 1), (1, 0)})))
        assert any("contained" in v for v in bad.violations())

    @settings(max_examples=40, deadline=None)
    @given(st.integers(1, 30), st.integers(0, 3), st.integers(0, 10**6))
    def test_random_generators(self, n, count, seed):
        rng = np.random.default_rng(seed)
        gens = []
        for _ in range(count):
            m = rng.random((n, n)) < 1.5 / n
            gens.append(Entourage.from_matrix(m))
        f = filtration_from_generators(gens, 4, n=n)
        assert not f.violations()
        d = metric_from_filtration(f)
        t = d.table
        # truncation turns long distances into INF, so compare only finite triples
        for y in range(n):
            via = t[:, y, None] + t[None, y, :]
            finite = np.isfinite(via) & np.isfinite(t)
            assert np.all(t[finite] <= via[finite])
