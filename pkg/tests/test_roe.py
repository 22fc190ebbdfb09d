import numpy as np
import pytest

from coarsekit.actions import PartialTranslation, box_space
from coarsekit.coarse import INF, UlfGraph
from coarsekit.generators import (
    complete_graph,
    cycle_graph,
    path_graph,
    random_bounded_degree_graph,
    random_regular_graph,
)
from coarsekit.roe import (
    PropOperator,
    SparseFamily,
    block_constant_ghost,
    block_constant_projection,
    compress,
    ghost_profile,
    h_gamma,
    is_ghost_like,
    nonneg_top_eigenvector,
    operator_norm,
    propagation,
    sparse_diagonal,
)


def brute_profile(a, order):
    a = np.abs(a)
    rank = {x: i for i, x in enumerate(order)}
    n = len(order)
    out = []
    for k in range(n):
        vals = [a[x, y] for x in range(n) for y in range(n) if rank[x] >= k or rank[y] >= k]
        out.append(max(vals))
    return np.array(out)


class TestPropagation:
    def test_diagonal(self):
        g = cycle_graph(5)
        assert propagation(np.diag([1.0, 2, 3, 4, 5]), g.metric) == 0

    def test_adjacency(self):
        g = cycle_graph(5)
        assert propagation(g.adjacency(), g.metric) == 1

    def test_square(self):
        g = cycle_graph(5)
        sq = g.adjacency() @ g.adjacency()
        scanned = max(g.metric(x, y) for x in range(5) for y in range(5) if sq[x, y] != 0)
        assert scanned == 2
        assert propagation(sq, g.metric) == 2

    def test_zero_and_infinite(self):
        g = UlfGraph(2)
        assert propagation(np.zeros((2, 2)), g.metric) == 0
        assert propagation(np.ones((2, 2)), g.metric) == INF

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            propagation(np.eye(3), cycle_graph(4).metric)

    def test_attached_metric(self):
        g = cycle_graph(6)
        assert PropOperator(g.adjacency(), g.metric).prop == 1

    def test_random_product_bound(self):
        rng = np.random.default_rng(11)
        for _ in range(100):
            n = int(rng.integers(2, 41))
            g = random_bounded_degree_graph(rng, n, 4)
            d = g.metric.table
            a = rng.standard_normal((n, n)) * (d <= rng.integers(0, 3))
            b = rng.standard_normal((n, n)) * (d <= rng.integers(0, 3))
            pa, pb = propagation(a, g.metric), propagation(b, g.metric)
            assert propagation(a @ b, g.metric) <= pa + pb
            grown = a + (rng.random((n, n)) < 0.1) * (d <= pa)
            assert propagation(grown, g.metric) <= pa
            bigger = np.where(a != 0, a, rng.standard_normal((n, n)) * (rng.random((n, n)) < 0.2))
            assert propagation(bigger, g.metric) >= pa


class TestCompress:
    def test_radius_zero(self):
        g = cycle_graph(5)
        a = np.arange(25.0).reshape(5, 5)
        comp = compress(a, 0, g.metric)
        assert [blk.tolist() for blk in comp.blocks] == [[[a[x, x]]] for x in range(5)]

    def test_identity(self):
        g = cycle_graph(7)
        comp = compress(np.eye(7), 2, g.metric)
        for blk in comp.blocks:
            assert np.array_equal(blk, np.eye(5))

    def test_cycle_adjacency(self):
        g = cycle_graph(8)
        comp = compress(g.adjacency(), 1, g.metric)
        path = path_graph(3).adjacency()
        for x, (ball, blk) in enumerate(zip(comp.balls, comp.blocks)):
            # order the ball as (x - 1, x, x + 1) to compare with the path
            order = [np.flatnonzero(ball == (x + s) % 8)[0] for s in (-1, 0, 1)]
            assert np.array_equal(blk[np.ix_(order, order)], path)

    def test_embed_reproduces_restriction(self):
        rng = np.random.default_rng(2)
        g = random_bounded_degree_graph(rng, 20, 3)
        a = (rng.standard_normal((20, 20)) + 1j) * (g.metric.table <= 1)
        comp = compress(a, 1, g.metric)
        for x in range(20):
            ball = comp.balls[x]
            mask = np.zeros((20, 20), dtype=bool)
            mask[np.ix_(ball, ball)] = True
            assert np.array_equal(comp.embed(x), np.where(mask, a, 0))

    def test_negative_radius(self):
        with pytest.raises(ValueError):
            compress(np.eye(2), -1, cycle_graph(2).metric)


class TestGhostProfile:
    def test_identity(self):
        assert np.array_equal(ghost_profile(np.eye(6)), np.ones(6))

    def test_zero(self):
        assert np.array_equal(ghost_profile(np.zeros((4, 4))), np.zeros(4))

    def test_block_constant_steps(self):
        b = box_space([complete_graph(2), complete_graph(4), complete_graph(8)])
        prof = ghost_profile(block_constant_projection(b))
        expected = [0.5] * 2 + [0.25] * 4 + [0.125] * 8
        assert prof.tolist() == expected

    def test_matches_brute_force_with_exhaustion(self):
        rng = np.random.default_rng(4)
        a = rng.standard_normal((9, 9))
        order = rng.permutation(9)
        assert np.array_equal(ghost_profile(a, order), brute_profile(a, order))
        prof = ghost_profile(a, order)
        assert np.all(np.diff(prof) <= 0)

    def test_bad_exhaustion(self):
        with pytest.raises(ValueError):
            ghost_profile(np.eye(3), [0, 0, 1])

    def test_ghost_like(self):
        prof = np.array([1.0, 0.5, 0.1])
        assert is_ghost_like(prof, 0.1, 2)
        assert not is_ghost_like(prof, 0.1, 1)
        assert is_ghost_like(prof, 0.0, 3)


class TestSparseDiagonal:
    def test_single_vertex(self):
        fam = SparseFamily(([0],), UlfGraph(1).metric)
        t = sparse_diagonal(fam, [np.ones((1, 1))])
        assert t.entries.tolist() == [[1.0]]

    def test_complete_graph_projections(self):
        b = box_space([complete_graph(2), complete_graph(4)])
        fam = SparseFamily.from_box_space(b)
        blocks = [np.full((m, m), 1.0 / m) for m in (2, 4)]
        for blk in blocks:
            eig = np.linalg.eigvalsh(blk)
            assert np.allclose(eig[:-1], 0) and np.isclose(eig[-1], 1)
        t = sparse_diagonal(fam, blocks)
        assert np.array_equal(t.entries, block_constant_projection(b).entries)
        assert abs(operator_norm(t) - 1) < 1e-12
        assert t.prop <= max(fam.diameters())
        assert np.allclose(t.entries @ t.entries, t.entries)

    def test_overlap_rejected(self):
        with pytest.raises(ValueError, match="overlaps"):
            SparseFamily(([0, 1], [1, 2]), cycle_graph(4).metric)

    def test_bad_norm_reports_index(self):
        fam = SparseFamily(([0], [1]), UlfGraph(2).metric)
        with pytest.raises(ValueError, match=r"block 1 .* norm 1: measured 0\.5"):
            sparse_diagonal(fam, [np.ones((1, 1)), 0.5 * np.ones((1, 1))])

    def test_not_positive(self):
        fam = SparseFamily(([0, 1],), complete_graph(2).metric)
        with pytest.raises(ValueError, match="not positive"):
            sparse_diagonal(fam, [np.array([[1.0, 0], [0, -0.5]])])

    def test_sparseness_scale(self):
        b = box_space([complete_graph(2), complete_graph(3), complete_graph(4)])
        fam = SparseFamily.from_box_space(b)
        dist = fam.distances()
        assert fam.is_sparse_at(dist[np.triu_indices(3, 1)].min())
        assert not fam.is_sparse_at(dist[np.triu_indices(3, 1)].min() + 1)

    def test_profile_is_blockwise_max(self):
        rng = np.random.default_rng(8)
        sizes = [3, 2, 4, 1]
        b = box_space([complete_graph(m) for m in sizes])
        fam = SparseFamily.from_box_space(b)
        blocks = []
        for m in sizes:
            v = rng.random(m) + 0.1
            v /= np.linalg.norm(v)
            blocks.append(np.outer(v, v))
        t = sparse_diagonal(fam, blocks)
        prof = ghost_profile(t)
        for k in range(b.n):
            remaining = [np.abs(blk).max() for idx, blk in zip(fam.blocks, blocks) if idx.max() >= k]
            assert prof[k] == max(remaining)


class TestBlockConstantGhost:
    @pytest.mark.parametrize("m", [2, 3, 5, 8])
    def test_complete_graph_degree_one(self, m):
        b = box_space([complete_graph(m)])
        t, bounds = block_constant_ghost(b, 1)
        j = np.full((m, m), 1.0 / m)
        correction = (m - 2) / (2 * (m - 1))
        assert np.allclose(t.entries, j + correction * (np.eye(m) - j), atol=1e-14)
        assert bounds[0] == pytest.approx(correction, abs=1e-14)
        assert operator_norm(t.entries - j) == pytest.approx(correction, abs=1e-12)

    def test_k8_bound(self):
        _, bounds = block_constant_ghost(box_space([complete_graph(8)]), 1)
        assert bounds[0] == pytest.approx(6 / 14, abs=1e-14)

    def test_degree_zero(self):
        m = 6
        t, bounds = block_constant_ghost(box_space([complete_graph(m)]), 0)
        assert np.array_equal(t.entries, np.eye(m))
        spectrum = np.linalg.eigvalsh(np.eye(m) - np.full((m, m), 1.0 / m))
        assert bounds[0] == pytest.approx(spectrum.max()) == pytest.approx(1.0)

    def test_single_vertex(self):
        t, bounds = block_constant_ghost(box_space([UlfGraph(1)]), 3)
        assert t.entries.tolist() == [[1.0]]
        assert bounds.tolist() == [0.0]

    def test_non_regular(self):
        with pytest.raises(ValueError, match="component 0: graph is not regular"):
            block_constant_ghost(box_space([path_graph(3)]), 1)

    def test_propagation_at_most_degree(self):
        b = box_space([cycle_graph(9), cycle_graph(12)])
        for k in range(5):
            t, _ = block_constant_ghost(b, k)
            assert t.prop <= k

    def test_random_regular_bound(self):
        rng = np.random.default_rng(21)
        for _ in range(10):
            sizes = [int(n) for n in rng.choice(np.arange(6, 65, 2), size=3)]
            comps = [random_regular_graph(rng, n, 3) for n in sizes]
            b = box_space(comps)
            k = int(rng.integers(0, 8))
            t, bounds = block_constant_ghost(b, k)
            for idx, bound in zip(b.blocks(), bounds):
                m = len(idx)
                err = np.linalg.eigvalsh(t.entries[np.ix_(idx, idx)] - np.full((m, m), 1.0 / m))
                assert np.abs(err).max() <= bound + 1e-9


class TestNonnegTopEigenvector:
    def test_uniform(self):
        res = nonneg_top_eigenvector(np.full((4, 4), 0.25))
        assert np.allclose(res.xi, 0.5, atol=1e-14)
        assert res.residual < 1e-14

    def test_rank_one_with_sign(self):
        xi0 = np.array([1.0, -1.0]) / np.sqrt(2)
        res = nonneg_top_eigenvector(np.outer(xi0, xi0))
        assert np.allclose(res.xi, [1 / np.sqrt(2)] * 2, atol=1e-14)
        assert np.allclose(res.phases, [1, -1])
        assert res.residual < 1e-14

    def test_single_vertex(self):
        res = nonneg_top_eigenvector(np.ones((1, 1)))
        assert res.xi.tolist() == [1.0]

    def test_complex_phases(self):
        rng = np.random.default_rng(5)
        v = rng.random(6) + 0.1
        v /= np.linalg.norm(v)
        phase = np.exp(1j * rng.uniform(0, 2 * np.pi, 6))
        w = phase * v
        t = np.outer(w, w.conj()) + 0.3 * np.eye(6) - 0.3 * np.outer(w, w.conj())
        res = nonneg_top_eigenvector(t)
        assert np.all(res.xi >= 0)
        assert np.allclose(res.xi, v, atol=1e-10)
        conj = res.conjugated(t)
        assert np.allclose(np.linalg.eigvalsh(conj), np.linalg.eigvalsh(t))
        assert res.eigen_residual <= 1e-8

    def test_degenerate_with_nonnegative_representative(self):
        res = nonneg_top_eigenvector(np.eye(3))
        assert res.eigen_residual <= 1e-6
        assert np.all(res.xi >= 0)

    def test_degenerate_without_nonnegative_representative(self):
        u = np.array([1.0, -1.0, 0, 0]) / np.sqrt(2)
        v = np.array([0, 0, 1.0, -1.0]) / np.sqrt(2)
        with pytest.raises(ValueError, match="degenerate"):
            nonneg_top_eigenvector(np.outer(u, u) + np.outer(v, v))

    def test_random_positive_operators(self):
        rng = np.random.default_rng(9)
        for _ in range(30):
            n = int(rng.integers(1, 12))
            m = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
            t = m @ m.conj().T
            t /= np.linalg.norm(t, 2)
            res = nonneg_top_eigenvector(t)
            assert np.all(res.xi >= 0)
            assert abs(np.linalg.norm(res.xi) - 1) < 1e-12
            assert res.eigen_residual <= 1e-8


class TestHGamma:
    def test_uniform_invariant(self):
        xi = np.full(5, 1 / np.sqrt(5))
        h, err = h_gamma(xi, PartialTranslation.from_cycles(5, (0, 1, 2, 3, 4)))
        assert np.allclose(h, 1)
        assert err < 1e-15

    def test_geometric_profile_on_cycle(self):
        n = 7
        xi = 0.5 ** np.arange(n)
        xi /= np.linalg.norm(xi)
        rot = PartialTranslation(tuple((x + 1) % n for x in range(n)))
        h, err = h_gamma(xi, rot)
        for x in range(n):
            assert h[x] == pytest.approx(xi[x] / xi[(x - 1) % n], rel=1e-15)
        assert err < 1e-15

    def test_outside_supports(self):
        xi = np.array([0.6, 0.8, 0.0, 0.0])
        swap = PartialTranslation.from_cycles(4, (0, 1), (2, 3))
        h, _ = h_gamma(xi, swap, supports=[np.array([0, 1])])
        assert h[2] == h[3] == 1.0
        assert h[0] == pytest.approx(0.6 / 0.8) and h[1] == pytest.approx(0.8 / 0.6)

    def test_zero_entries_floored(self):
        xi = np.array([1.0, 0.0, 0.0])
        shift = PartialTranslation((1, 2, 0))
        h, err = h_gamma(xi, shift, delta=1e-3)
        assert np.all(h > 0)
        # h(0) = 1 / (1e-3), h(1) = 1e-3 / 1, h(2) = 1
        assert h.tolist() == pytest.approx([1e3, 1e-3, 1.0])
        assert err == pytest.approx(1.0)

    def test_preimage_in_other_block(self):
        xi = np.array([0.5, 0.5, 0.5, 0.5])
        shift = PartialTranslation((1, 2, 3, 0))
        h, err = h_gamma(xi, shift, supports=[np.array([0, 1]), np.array([2, 3])], delta=0.5)
        # x = 0 and x = 2 have preimages in the other block
        assert h[0] == pytest.approx(0.5 / 0.25) and h[2] == pytest.approx(0.5 / 0.25)
        assert h[1] == h[3] == 1.0
        assert err == pytest.approx(0.5)

    def test_bad_delta(self):
        with pytest.raises(ValueError):
            h_gamma(np.ones(2), PartialTranslation.identity(2), delta=0)


class TestOperatorNorm:
    def test_values(self):
        assert operator_norm(np.eye(4)) == pytest.approx(1)
        assert operator_norm(np.full((5, 5), 0.2)) == pytest.approx(1)
        assert operator_norm(np.zeros((3, 3))) == 0

    def test_against_power_iteration(self):
        rng = np.random.default_rng(1)
        a = rng.standard_normal((30, 30))
        v = np.ones(30)
        for _ in range(3000):
            v = a.T @ (a @ v)
            v /= np.linalg.norm(v)
        assert operator_norm(a) == pytest.approx(np.linalg.norm(a @ v), rel=1e-10)


def test_operator_json_roundtrip():
    a = np.array([[0, 1 + 2j], [0.5, 0]])
    op = PropOperator(a)
    data = op.to_json()
    assert data == {"n": 2, "triplets": [[0, 1, 1.0, 2.0], [1, 0, 0.5, 0.0]]}
    assert np.array_equal(PropOperator.from_json(data).entries, a)
