import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sparseqaoa import (
    ConfigError,
    EdgeScores,
    Graph,
    SparsifyConfig,
    cut_solution,
    filter_to_ratio,
    generate_random_graph,
    partition_edges,
    remove_k_noncut_edges,
    score_edges,
    sparsify_by_solution,
)
from sparseqaoa.graphs import connected_components
from sparseqaoa.sparsify import KEEP_HIGH, KEEP_LOW, METHODS

K3 = Graph.from_edges(3, [(0, 1), (1, 2), (0, 2)])
C4 = Graph.from_edges(4, [(0, 1), (1, 2), (2, 3), (0, 3)])
PATH5 = Graph.from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4)])
CYCLE10 = Graph.from_edges(10, [(i, (i + 1) % 10) for i in range(10)])


class TestScoreEdges:
    def test_every_tree_edge_has_unit_resistance(self):
        scores = score_edges(PATH5, SparsifyConfig(method="effective")).scores
        assert all(abs(s - 1.0) < 1e-9 for s in scores)

    def test_c4_resistance_three_quarters(self):
        scores = score_edges(C4, SparsifyConfig(method="effective")).scores
        assert all(abs(s - 0.75) < 1e-9 for s in scores)

    def test_foster_identity(self):
        for seed in range(10):
            rng = np.random.default_rng(seed)
            n = int(rng.integers(4, 14))
            m = int(rng.integers(n - 2, n * (n - 1) // 2 + 1))
            g = generate_random_graph(n, m, seed)
            total = sum(score_edges(g, SparsifyConfig(method="effective")).scores)
            assert abs(total - (n - connected_components(g))) < 1e-6

    def test_scan_complete_triangle(self):
        scores = score_edges(K3, SparsifyConfig(method="scan")).scores
        assert all(abs(s - 1.0) < 1e-12 for s in scores)

    def test_jaccard_open_neighborhoods(self):
        # P3 edge (0,1): N(0)={1}, N(1)={0,2} share nothing
        p3 = Graph.from_edges(3, [(0, 1), (1, 2)])
        scores = score_edges(p3, SparsifyConfig(method="similarity")).scores
        assert scores == (0.0, 0.0)
        # K3: N(0)={1,2}, N(1)={0,2} -> overlap {2} of union {0,1,2}
        scores = score_edges(K3, SparsifyConfig(method="similarity")).scores
        assert all(abs(s - 1 / 3) < 1e-12 for s in scores)

    def test_algebraic_bridge_scores_highest(self):
        two_triangles = Graph.from_edges(
            6, [(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5), (2, 3)]
        )
        es = score_edges(two_triangles, SparsifyConfig(method="algebraic", seed=5))
        assert es.direction == KEEP_LOW
        assert two_triangles.edges[int(np.argmax(es.scores))] == (2, 3)

    def test_algebraic_reverse_flips_direction(self):
        es = score_edges(
            K3, SparsifyConfig(method="algebraic", method_params={"reverse": True})
        )
        assert es.direction == KEEP_HIGH

    def test_fire_budget_and_determinism(self):
        g = generate_random_graph(12, 24, 3)
        cfg = SparsifyConfig(method="fire", seed=4)
        es = score_edges(g, cfg)
        assert sum(es.scores) == 100 * g.num_edges
        assert all(s >= 0 for s in es.scores)
        assert es.scores == score_edges(g, cfg).scores

    def test_symmetric_methods_tie_on_k3(self):
        for method in ("degree", "similarity", "scan", "effective"):
            scores = score_edges(K3, SparsifyConfig(method=method)).scores
            assert len(set(round(s, 12) for s in scores)) == 1, method

    def test_simmelian_bridge_scores_lowest(self):
        two_triangles = Graph.from_edges(
            6, [(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5), (2, 3)]
        )
        es = score_edges(two_triangles, SparsifyConfig(method="simmelian"))
        assert es.direction == KEEP_HIGH
        bridge = es.scores[two_triangles.edges.index((2, 3))]
        assert bridge == 0.0
        assert all(s > bridge for i, s in enumerate(es.scores) if two_triangles.edges[i] != (2, 3))

    def test_all_methods_deterministic(self):
        g = generate_random_graph(9, 18, 6)
        for method in METHODS:
            cfg = SparsifyConfig(method=method, seed=11)
            assert score_edges(g, cfg).scores == score_edges(g, cfg).scores, method

    def test_unknown_method_and_params(self):
        with pytest.raises(ConfigError):
            SparsifyConfig(method="mystery")
        with pytest.raises(ConfigError):
            SparsifyConfig(method="fire", method_params={"flame": 3})
        with pytest.raises(ConfigError):
            SparsifyConfig(method="random", target_ratio=0.0)

    def test_empty_edge_list_rejected(self):
        with pytest.raises(ValueError):
            score_edges(Graph(3, ()), SparsifyConfig(method="random"))

    def test_scores_finite_and_aligned(self):
        g = generate_random_graph(8, 15, 2)
        for method in METHODS:
            es = score_edges(g, SparsifyConfig(method=method, seed=1))
            assert len(es.scores) == g.num_edges
            assert all(np.isfinite(s) for s in es.scores)


class TestFilterToRatio:
    def test_ratio_one_identity(self):
        g = generate_random_graph(8, 13, 1)
        es = score_edges(g, SparsifyConfig(method="random", seed=2))
        assert filter_to_ratio(es, 1.0, seed=0) == g

    def test_sixty_six_percent_of_thirty(self):
        g = generate_random_graph(10, 30, 4)
        es = score_edges(g, SparsifyConfig(method="degree"))
        assert filter_to_ratio(es, 0.66, seed=0).num_edges == 20

    def test_distinct_scores_keep_top(self):
        g = Graph.from_edges(4, [(0, 1), (0, 2), (1, 3), (2, 3)])
        es = EdgeScores(g, (0.9, 0.1, 0.8, 0.2), KEEP_HIGH)
        kept = filter_to_ratio(es, 0.5, seed=5)
        assert kept.edges == ((0, 1), (1, 3))

    def test_keep_low_direction(self):
        g = Graph.from_edges(4, [(0, 1), (0, 2), (1, 3), (2, 3)])
        es = EdgeScores(g, (0.9, 0.1, 0.8, 0.2), KEEP_LOW)
        kept = filter_to_ratio(es, 0.5, seed=5)
        assert kept.edges == ((0, 2), (2, 3))

    @given(st.integers(1, 40), st.integers(1, 10), st.integers(0, 1000))
    @settings(max_examples=60, deadline=None)
    def test_exact_kept_count(self, m, tenths, seed):
        ratio = tenths / 10.0
        n = 10
        m = min(m, n * (n - 1) // 2)
        g = generate_random_graph(n, m, seed)
        es = score_edges(g, SparsifyConfig(method="random", seed=seed))
        kept = filter_to_ratio(es, ratio, seed=seed)
        assert kept.num_edges == int(np.floor(ratio * m + 0.5))
        assert kept.num_vertices == g.num_vertices
        assert set(kept.edges) <= set(g.edges)

    def test_tie_break_seeded_but_deterministic(self):
        g = generate_random_graph(8, 16, 0)
        es = EdgeScores(g, (1.0,) * 16, KEEP_HIGH)
        assert filter_to_ratio(es, 0.5, seed=3) == filter_to_ratio(es, 0.5, seed=3)
        distinct = {filter_to_ratio(es, 0.5, seed=s) for s in range(6)}
        assert len(distinct) > 1  # all-tied scores leave the choice to the seed


class TestSparsifyBySolution:
    def test_p_zero_identity(self):
        g = generate_random_graph(8, 14, 3)
        sol = cut_solution(g, "01010101")
        assert sparsify_by_solution(g, sol, 0.0, seed=1) == g

    def test_p_one_removes_exactly_noncut(self):
        sol = cut_solution(K3, "001")
        out = sparsify_by_solution(K3, sol, 1.0, seed=9)
        assert out.edges == ((0, 2), (1, 2))

    @given(st.integers(0, 5000))
    @settings(max_examples=50, deadline=None)
    def test_never_removes_cut_edges(self, seed):
        rng = np.random.default_rng(seed)
        g = generate_random_graph(8, int(rng.integers(4, 20)), seed)
        bits = "".join(rng.choice(("0", "1"), size=8))
        sol = cut_solution(g, bits)
        p_e = float(rng.uniform(0, 1))
        out = sparsify_by_solution(g, sol, p_e, seed)
        in_cut, _ = partition_edges(g, sol)
        assert set(in_cut) <= set(out.edges)

    def test_binomial_mean_kept(self):
        # all 10 cycle edges are non-cut for the all-zeros assignment
        sol = cut_solution(CYCLE10, "0" * 10)
        kept = [
            sparsify_by_solution(CYCLE10, sol, 0.5, seed).num_edges
            for seed in range(1000)
        ]
        assert abs(np.mean(kept) - 5.0) < 0.3

    def test_bad_probability(self):
        sol = cut_solution(K3, "001")
        with pytest.raises(ValueError):
            sparsify_by_solution(K3, sol, 1.5, seed=0)


class TestRemoveKNoncut:
    def test_k_zero_identity(self):
        g = generate_random_graph(9, 18, 5)
        sol = cut_solution(g, "010101010")
        assert remove_k_noncut_edges(g, sol, 0, seed=3) == g

    def test_k_all_equals_full_removal(self):
        g = generate_random_graph(9, 18, 5)
        sol = cut_solution(g, "010101010")
        _, not_in_cut = partition_edges(g, sol)
        full = remove_k_noncut_edges(g, sol, len(not_in_cut), seed=3)
        assert full == sparsify_by_solution(g, sol, 1.0, seed=99)

    def test_prefix_consistency(self):
        g = generate_random_graph(10, 25, 7)
        sol = cut_solution(g, "0101010101")
        _, not_in_cut = partition_edges(g, sol)
        previous_removed: set = set()
        for k in range(len(not_in_cut) + 1):
            kept = set(remove_k_noncut_edges(g, sol, k, seed=21).edges)
            removed = set(g.edges) - kept
            assert len(removed) == k
            assert previous_removed <= removed
            previous_removed = removed

    def test_graph1_like_all_removed(self):
        from sparseqaoa import max_cut_value, solution_at_distance

        g = generate_random_graph(10, 30, 8)  # frozen: c_max = 20
        sol = solution_at_distance(g, 0, seed=0)
        out = remove_k_noncut_edges(g, sol, 10, seed=0)
        assert out.num_edges == 20
        in_cut, _ = partition_edges(g, sol)
        assert set(out.edges) == set(in_cut)
        assert max_cut_value(g) == 20

    def test_k_too_large(self):
        sol = cut_solution(K3, "001")
        with pytest.raises(ValueError):
            remove_k_noncut_edges(K3, sol, 2, seed=0)
