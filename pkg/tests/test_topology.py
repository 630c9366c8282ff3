import itertools

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dgd_adversary.topology import (Graph, TopologyError, WeightMatrix, complete_graph,
                                    explicit_graph, graph_from_config, metropolis_weights,
                                    random_connected_graph, second_eigenvalue_magnitude)


def _charpoly_roots_3x3(w):
    # det(lambda I - W) = lambda^3 - tr lambda^2 + (sum of principal 2x2 minors) lambda - det
    tr = w[0, 0] + w[1, 1] + w[2, 2]
    minors = sum(w[i, i] * w[j, j] - w[i, j] * w[j, i] for i, j in [(0, 1), (0, 2), (1, 2)])
    det = (w[0, 0] * (w[1, 1] * w[2, 2] - w[1, 2] * w[2, 1])
           - w[0, 1] * (w[1, 0] * w[2, 2] - w[1, 2] * w[2, 0])
           + w[0, 2] * (w[1, 0] * w[2, 1] - w[1, 1] * w[2, 0]))
    return np.roots([1.0, -tr, minors, -det])


PATH3 = explicit_graph(3, [(1, 2), (2, 3)])


class TestGraphs:
    def test_complete_graph_three(self):
        assert complete_graph(3).edges == {(1, 2), (1, 3), (2, 3)}
        assert complete_graph(3).kind == "complete"

    def test_complete_graph_ten_edges(self):
        assert len(complete_graph(10).edges) == 45

    def test_complete_graph_rejects_one(self):
        with pytest.raises(TopologyError):
            complete_graph(1)

    def test_disconnected_graph_rejected(self):
        with pytest.raises(TopologyError, match="not connected"):
            Graph(4, frozenset({(1, 2), (3, 4)}))

    def test_self_loop_rejected(self):
        with pytest.raises(TopologyError, match="self-loop"):
            Graph(2, frozenset({(1, 1), (1, 2)}))

    def test_edges_stored_once_sorted(self):
        g = Graph(3, frozenset({(2, 1), (3, 2)}))
        assert g.edges == {(1, 2), (2, 3)}
        assert g.neighbors(2) == [1, 3]

    @pytest.mark.parametrize("seed", [0, 5, 99])
    def test_random_two_nodes_is_single_edge(self, seed):
        assert random_connected_graph(2, 1.0, seed).edges == {(1, 2)}

    def test_random_graph_deterministic(self):
        a = random_connected_graph(10, 0.4, 7)
        b = random_connected_graph(10, 0.4, 7)
        assert a.edges == b.edges
        assert a.kind == "general"

    def test_random_graph_connected_by_independent_bfs(self):
        g = random_connected_graph(5, 0.5, 3)
        G = nx.Graph()
        G.add_nodes_from(range(1, 6))
        G.add_edges_from(g.edges)
        assert nx.is_connected(G)

    def test_random_graph_retry_budget_exhausted(self):
        with pytest.raises(TopologyError, match="attempts"):
            random_connected_graph(30, 0.01, 0, max_attempts=5)

    def test_random_graph_bad_probability(self):
        with pytest.raises(TopologyError):
            random_connected_graph(5, 0.0, 0)

    def test_config_blocks(self):
        assert graph_from_config({"kind": "complete", "n": 4}).kind == "complete"
        g = graph_from_config({"kind": "random", "n": 6, "edge_prob": 0.5, "seed": 2}, seed_offset=1)
        assert g.edges == random_connected_graph(6, 0.5, 3).edges
        assert graph_from_config({"kind": "explicit", "n": 3, "edges": [[1, 2], [2, 3]]}).edges == PATH3.edges
        with pytest.raises(TopologyError):
            graph_from_config({"kind": "complete", "n": 4, "extra": 1})


class TestMetropolis:
    def test_complete_four_is_uniform(self):
        w = metropolis_weights(complete_graph(4)).entries
        np.testing.assert_allclose(w, np.full((4, 4), 0.25), atol=1e-15)

    def test_path_three(self):
        w = metropolis_weights(PATH3).entries
        expected = np.array([[2 / 3, 1 / 3, 0], [1 / 3, 1 / 3, 1 / 3], [0, 1 / 3, 2 / 3]])
        np.testing.assert_allclose(w, expected, atol=1e-15)

    def test_second_eigenvalue_path_three_matches_charpoly(self):
        w = metropolis_weights(PATH3)
        roots = np.sort(np.abs(_charpoly_roots_3x3(w.entries).real))
        assert roots[-1] == pytest.approx(1.0, abs=1e-12)
        assert second_eigenvalue_magnitude(w) == pytest.approx(roots[-2], abs=1e-12)
        assert second_eigenvalue_magnitude(w) == pytest.approx(2 / 3, abs=1e-12)

    def test_second_eigenvalue_complete_is_zero(self):
        assert second_eigenvalue_magnitude(metropolis_weights(complete_graph(10))) == pytest.approx(0.0, abs=1e-12)

    def test_check_flags_bad_matrix(self):
        bad = WeightMatrix(2, np.array([[0.7, 0.4], [0.3, 0.6]]))
        assert "not symmetric" in bad.check()
        assert "row sums differ from 1" in bad.check()

    def test_check_flags_weight_off_graph(self):
        w = WeightMatrix(3, np.full((3, 3), 1 / 3))
        assert "weight on a non-edge" in w.check(PATH3)


@st.composite
def connected_graphs(draw):
    n = draw(st.integers(2, 15))
    prob = draw(st.floats(0.2, 1.0))
    seed = draw(st.integers(0, 2**32 - 1))
    return random_connected_graph(n, prob, seed)


@settings(max_examples=60, deadline=None)
@given(connected_graphs())
def test_metropolis_invariants(g):
    w = metropolis_weights(g)
    assert w.check(g) == []
    assert second_eigenvalue_magnitude(w) < 1.0


@settings(max_examples=60, deadline=None)
@given(connected_graphs(), st.integers(0, 2**32 - 1))
def test_consensus_contraction(g, seed):
    w = metropolis_weights(g)
    lam = second_eigenvalue_magnitude(w)
    v = np.random.default_rng(seed).standard_normal(g.n)
    v -= v.mean()
    assert np.linalg.norm(w.entries @ v) <= lam * np.linalg.norm(v) + 1e-10


def test_all_small_connected_graphs_on_four_nodes():
    pairs = list(itertools.combinations(range(1, 5), 2))
    seen = 0
    for mask in range(1, 2 ** len(pairs)):
        edges = [pr for b, pr in enumerate(pairs) if mask >> b & 1]
        try:
            g = Graph(4, frozenset(edges))
        except TopologyError:
            continue
        seen += 1
        w = metropolis_weights(g)
        assert w.check(g) == []
        assert second_eigenvalue_magnitude(w) < 1.0
    assert seen == 38  # number of connected labelled graphs on 4 vertices
