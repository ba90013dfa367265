import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import hop_distances, transport_by_vertex_enumeration
from strategies import graphs
from toper.errors import EmptyInput, InvalidParam, MissingAttribute
from toper.filtfn import (
    ATOM_LABELS,
    atomic_weight_table,
    attribute_values,
    closeness_values,
    compute_function,
    degree_centrality_values,
    degree_values,
    edge_weight_values,
    forman_ricci_values,
    function_kind,
    ollivier_ricci_values,
    popularity_values,
    solve_transport,
)
from toper.graph import Graph

K2 = Graph(2, [(0, 1)])
K3 = Graph(3, [(0, 1), (1, 2), (0, 2)])
C4 = Graph(4, [(0, 1), (1, 2), (2, 3), (3, 0)])
PATH3 = Graph(3, [(0, 1), (1, 2)])
STAR3 = Graph(4, [(0, 1), (0, 2), (0, 3)])


def complete(n):
    return Graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


class TestNodeFunctions:
    def test_degree(self):
        assert degree_values(K2).values.tolist() == [1, 1]
        assert degree_values(STAR3).values.tolist() == [3, 1, 1, 1]
        assert degree_values(C4).values.tolist() == [2, 2, 2, 2]

    def test_popularity(self):
        assert popularity_values(K2).values.tolist() == [2, 2]
        assert popularity_values(PATH3).values.tolist() == [3, 3, 3]
        assert popularity_values(STAR3).values.tolist() == [4, 4, 4, 4]

    def test_popularity_isolated_is_zero(self):
        g = Graph(3, [(0, 1)])
        assert popularity_values(g).values.tolist() == [2, 2, 0]

    @given(graphs(max_nodes=15))
    @settings(max_examples=100)
    def test_popularity_formula(self, g):
        deg = g.degrees
        vals = popularity_values(g).values
        for v in range(g.node_count):
            nb = g.neighbors(v).tolist()
            want = 0.0 if not nb else deg[v] + sum(deg[u] for u in nb) / len(nb)
            assert vals[v] == pytest.approx(want, abs=1e-12)
            if nb:
                assert vals[v] >= deg[v] + 1

    def test_closeness(self):
        vals = closeness_values(PATH3).values
        assert vals[1] == pytest.approx(1.0)
        assert vals[0] == pytest.approx(2 / 3)
        assert closeness_values(complete(5)).values.tolist() == [1.0] * 5
        assert closeness_values(Graph(3, [(0, 1)])).values[2] == 0.0
        assert closeness_values(Graph(1)).values.tolist() == [0.0]

    @given(graphs(max_nodes=12))
    @settings(max_examples=80)
    def test_closeness_matches_bfs_oracle(self, g):
        n = g.node_count
        vals = closeness_values(g).values
        for v in range(n):
            d = [x for x in hop_distances(n, g.edges.tolist(), v) if x != math.inf]
            r = len(d)
            want = 0.0 if r <= 1 or n == 1 else (r - 1) / sum(d) * (r - 1) / (n - 1)
            assert vals[v] == pytest.approx(want, abs=1e-12)

    def test_degree_centrality(self):
        assert degree_centrality_values(PATH3).values.tolist() == [0.5, 1.0, 0.5]
        assert degree_centrality_values(K2).values.tolist() == [1.0, 1.0]
        assert degree_centrality_values(STAR3).values[0] == 1.0
        assert degree_centrality_values(Graph(1)).values.tolist() == [0.0]

    def test_attribute_column(self):
        g = Graph(2, [(0, 1)], node_attributes=[[1.5], [2.5]])
        assert attribute_values(g, 0).values.tolist() == [1.5, 2.5]
        with pytest.raises(MissingAttribute):
            attribute_values(g, 3)

    def test_attribute_missing(self):
        with pytest.raises(MissingAttribute):
            attribute_values(K2)

    def test_atomic_weight_mutag_carbon(self):
        table = atomic_weight_table(ATOM_LABELS["MUTAG"])
        g = Graph(2, [(0, 1)], node_labels=[0, 2])
        vals = compute_function(g, "atomic_weight", {"table": table}).values
        assert vals[0] == pytest.approx(12.011)
        assert vals[1] == pytest.approx(15.999)

    def test_atomic_weight_needs_table(self):
        with pytest.raises(MissingAttribute):
            compute_function(Graph(2, [(0, 1)], node_labels=[0, 1]), "atomic_weight")

    @given(graphs(max_nodes=12), st.randoms(use_true_random=False))
    @settings(max_examples=60)
    def test_node_functions_permutation_equivariant(self, g, rnd):
        perm = list(range(g.node_count))
        rnd.shuffle(perm)
        perm = np.array(perm)
        h = g.relabel(perm)
        for fid in ("degree", "popularity", "closeness", "degree_centrality"):
            a = compute_function(g, fid).values
            b = compute_function(h, fid).values
            assert np.allclose(b[perm], a, atol=1e-12)


class TestEdgeFunctions:
    def test_forman(self):
        assert forman_ricci_values(K2).values.tolist() == [2]
        assert forman_ricci_values(K3).values.tolist() == [0, 0, 0]
        assert forman_ricci_values(K3, augmented=True).values.tolist() == [3, 3, 3]

    @pytest.mark.parametrize("d", [2, 3, 4])
    def test_forman_regular_constant(self, d):
        g = C4 if d == 2 else complete(d + 1)
        assert set(forman_ricci_values(g).values.tolist()) == {4 - 2 * d}

    def test_edge_weight(self):
        g = Graph(3, [(0, 1), (1, 2)], edge_weights=[1.5, 2.5])
        assert edge_weight_values(g).values.tolist() == [1.5, 2.5]
        with pytest.raises(MissingAttribute):
            edge_weight_values(K3)

    def test_ollivier_tabulated(self):
        assert ollivier_ricci_values(K2, alpha=0.5).values.tolist() == [1.0]
        assert np.allclose(ollivier_ricci_values(K3, alpha=0.0).values, 0.5, atol=1e-9)
        assert np.allclose(ollivier_ricci_values(C4, alpha=0.0).values, 0.0, atol=1e-9)
        # lazy walk, worked by hand: K3 moves 1/4 over one hop, C4 moves 1/4 twice
        assert np.allclose(ollivier_ricci_values(K3, alpha=0.5).values, 0.75, atol=1e-9)
        assert np.allclose(ollivier_ricci_values(C4, alpha=0.5).values, 0.5, atol=1e-9)

    def test_ollivier_needs_edges(self):
        with pytest.raises(EmptyInput):
            ollivier_ricci_values(Graph(3))

    def test_ollivier_bad_alpha(self):
        with pytest.raises(InvalidParam):
            ollivier_ricci_values(K2, alpha=1.0)

    @given(graphs(min_nodes=2, max_nodes=10, min_edges=1), st.sampled_from([0.0, 0.25, 0.5]))
    @settings(max_examples=40)
    def test_ollivier_at_most_one(self, g, alpha):
        assert np.all(ollivier_ricci_values(g, alpha).values <= 1.0 + 1e-12)

    def test_function_kind(self):
        assert function_kind("degree") == "node"
        assert function_kind("attribute:2") == "node"
        assert function_kind("ollivier") == "edge"
        with pytest.raises(InvalidParam):
            function_kind("betweenness")

    def test_compute_function_params(self):
        assert compute_function(K3, "forman", {"augmented": True}).values.tolist() == [3, 3, 3]
        assert np.allclose(compute_function(K3, "ollivier", {"alpha": 0.0}).values, 0.5)


class TestTransport:
    def test_same_point(self):
        assert solve_transport([1.0], [1.0], [[0.0]]) == 0.0

    def test_point_to_point(self):
        assert solve_transport([1.0], [1.0], [[1.0]]) == 1.0

    def test_half_shift_on_unit_interval(self):
        # a, b, c at 0, 1/2, 1: every unit of mass moves 1/2
        cost = [[0.5, 1.0], [0.0, 0.5]]
        assert solve_transport([0.5, 0.5], [0.5, 0.5], cost) == pytest.approx(0.5, abs=1e-12)

    def test_shift_on_unit_spaced_line(self):
        # a, b, c at 0, 1, 2: a rigid shift by one costs exactly 1
        cost = [[1.0, 2.0], [0.0, 1.0]]
        assert solve_transport([0.5, 0.5], [0.5, 0.5], cost) == pytest.approx(1.0, abs=1e-12)

    def test_unbalanced(self):
        with pytest.raises(InvalidParam):
            solve_transport([0.5, 0.4], [1.0], [[1.0], [1.0]])

    def test_negative_cost(self):
        with pytest.raises(InvalidParam):
            solve_transport([1.0], [1.0], [[-1.0]])

    def test_shape(self):
        with pytest.raises(InvalidParam):
            solve_transport([0.5, 0.5], [1.0], [[1.0, 2.0]])

    @given(st.integers(1, 4), st.integers(1, 4), st.integers(0, 10**6))
    @settings(max_examples=60)
    def test_matches_vertex_enumeration(self, m, k, seed):
        rng = np.random.default_rng(seed)
        mu = rng.dirichlet(np.ones(m))
        nu = rng.dirichlet(np.ones(k))
        mu[-1] = 1.0 - mu[:-1].sum()
        nu[-1] = 1.0 - nu[:-1].sum()
        cost = rng.integers(0, 4, size=(m, k)).astype(float)
        assert abs(solve_transport(mu, nu, cost) - transport_by_vertex_enumeration(mu, nu, cost)) <= 1e-9

    @given(st.integers(1, 5), st.integers(0, 10**6))
    @settings(max_examples=40)
    def test_self_transport_is_zero(self, m, seed):
        rng = np.random.default_rng(seed)
        mu = rng.dirichlet(np.ones(m))
        mu[-1] = 1.0 - mu[:-1].sum()
        pts = rng.normal(size=(m, 2))
        cost = np.linalg.norm(pts[:, None] - pts[None], axis=2)
        assert solve_transport(mu, mu, cost) == pytest.approx(0.0, abs=1e-12)

    @given(st.integers(2, 4), st.integers(2, 4), st.integers(0, 10**6))
    @settings(max_examples=40)
    def test_bounded_by_any_feasible_plan(self, m, k, seed):
        rng = np.random.default_rng(seed)
        mu = rng.dirichlet(np.ones(m))
        nu = rng.dirichlet(np.ones(k))
        mu[-1] = 1.0 - mu[:-1].sum()
        nu[-1] = 1.0 - nu[:-1].sum()
        cost = rng.uniform(0, 3, size=(m, k))
        independent = np.outer(mu, nu)
        assert solve_transport(mu, nu, cost) <= float((cost * independent).sum()) + 1e-12
