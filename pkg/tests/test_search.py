import numpy as np
import pytest

from pivotsearch import (
    BoundVariant,
    BuildConfig,
    DimensionMismatch,
    ProjState,
    SparseVector,
    TopKQueue,
    brute_force_topk,
    build_tree,
    compute_bound,
    empty_proj_state,
    query_descend_update,
    search_tree,
)
from pivotsearch.tree import PivotNode

from helpers import axes_corpus, dense_gram_schmidt, leaf_positions


class TestTopKQueue:
    def test_kth_is_minus_inf_until_full(self):
        q = TopKQueue(3)
        q.insert(0.5, 1)
        q.insert(0.4, 2)
        assert q.kth_value() == -np.inf
        q.insert(0.3, 3)
        assert q.kth_value() == 0.3

    def test_keeps_k_largest(self):
        q = TopKQueue(2)
        for sim, pos in [(0.1, 0), (0.9, 1), (0.5, 2), (0.7, 3)]:
            q.insert(sim, pos)
        assert q.items() == [(1, 0.9), (3, 0.7)]

    def test_tie_prefers_lower_position(self):
        q = TopKQueue(2)
        q.insert(0.5, 9)
        q.insert(0.5, 4)
        q.insert(0.5, 7)
        assert q.items() == [(4, 0.5), (7, 0.5)]

    def test_equal_sim_lower_pos_displaces_worst(self):
        q = TopKQueue(1)
        q.insert(0.5, 9)
        q.insert(0.5, 2)
        assert q.items() == [(2, 0.5)]

    def test_rejects_bad_k(self):
        with pytest.raises(ValueError):
            TopKQueue(0)


def _leaf_node(min_sq, max_sq, size=1):
    return PivotNode(min_proj_sq=min_sq, max_proj_sq=max_sq, size=size,
                     doc_positions=np.arange(size, dtype=np.int64))


class TestComputeBound:
    def test_query_in_span_docs_in_span(self):
        qs = ProjState(np.array([1.0]), 1.0, np.array([1.0]))
        node = _leaf_node(1.0, 1.0)
        assert compute_bound(node, qs, BoundVariant("safe", 1.0)) == pytest.approx(1.0, abs=1e-12)

    def test_orthogonal_query_docs_in_span(self):
        qs = empty_proj_state()
        node = _leaf_node(1.0, 1.0)
        assert compute_bound(node, qs, BoundVariant("safe", 1.0)) == pytest.approx(0.0, abs=1e-12)
        assert compute_bound(node, qs, BoundVariant("heuristic", 1.0)) == pytest.approx(0.0, abs=1e-12)

    def test_gamma_scales_bound(self):
        qs = empty_proj_state()
        node = _leaf_node(0.2, 0.6)
        full = compute_bound(node, qs, BoundVariant("safe", 1.0))
        half = compute_bound(node, qs, BoundVariant("safe", 0.5))
        assert half == pytest.approx(0.5 * full, abs=1e-15)

    def test_clamps_out_of_range_stats(self):
        qs = empty_proj_state()
        node = _leaf_node(1.0 + 5e-10, 1.0 + 1e-9)
        value = compute_bound(node, qs, BoundVariant("safe", 1.0))
        assert np.isfinite(value) and value >= 0.0

    def test_variant_validation(self):
        with pytest.raises(ValueError):
            BoundVariant("nope", 1.0)
        with pytest.raises(ValueError):
            BoundVariant("safe", 0.0)
        with pytest.raises(ValueError):
            BoundVariant("safe", 1.5)


class TestQueryDescend:
    def test_query_on_pivot_direction(self):
        corpus = axes_corpus(3)
        tree = build_tree(corpus, BuildConfig(leaf_capacity=1, candidate_count=3, rng_seed=0))
        root = tree.root
        q = corpus.vector(root.pivot_pos)
        qs = query_descend_update(empty_proj_state(), root, q)
        assert qs.proj_norm_sq == pytest.approx(1.0, abs=1e-12)

    def test_orthogonal_query_stays_zero(self):
        corpus = axes_corpus(3, dim=4)
        tree = build_tree(corpus, BuildConfig(leaf_capacity=1, candidate_count=3, rng_seed=0))
        q = SparseVector.unit_axis(3, 4)
        qs = empty_proj_state()
        node = tree.root
        while not node.is_leaf:
            qs = query_descend_update(qs, node, q)
            assert qs.proj_norm_sq == 0.0
            node = node.left

    def test_matches_dense_oracle_along_paths(self, small_corpus, small_tree, small_queries):
        for _, q in small_queries[:5]:
            qd = q.to_dense()
            node, qs, pivots = small_tree.root, empty_proj_state(), []
            while not node.is_leaf:
                qs = query_descend_update(qs, node, q)
                pivots.append(node.pivot)
                Q = dense_gram_schmidt([p.to_dense() for p in pivots])
                oracle = float(np.sum((Q.T @ qd) ** 2))
                assert qs.proj_norm_sq == pytest.approx(oracle, abs=1e-8)
                node = node.left if node.left.size >= node.right.size else node.right


def subtree_max_sim(corpus, node, sims):
    positions = np.concatenate(leaf_positions(node))
    return float(sims[positions].max())


class TestSearchTree:
    def test_orthogonal_three_docs(self):
        corpus = axes_corpus(3)
        tree = build_tree(corpus, BuildConfig(leaf_capacity=1, candidate_count=3, rng_seed=0))
        results, stats = search_tree(tree, SparseVector.unit_axis(0, 3), 1)
        assert results == [("d1", 1.0)]
        assert stats.scored + stats.pruned == 3

    def test_k_at_least_n_returns_everything(self, small_corpus, small_tree, small_queries):
        _, q = small_queries[0]
        results, _ = search_tree(small_tree, q, len(small_corpus) + 5)
        assert len(results) == len(small_corpus)
        sims = [s for _, s in results]
        assert all(a >= b for a, b in zip(sims, sims[1:]))

    def test_exact_against_brute_force(self, std_corpus, std_tree, std_queries):
        for _, q in std_queries:
            for k in (1, 10):
                got, _ = search_tree(std_tree, q, k, BoundVariant("safe", 1.0))
                want = brute_force_topk(std_corpus, q, k)
                assert got == want

    def test_safe_bound_admissible_everywhere(self, small_corpus, small_tree, small_queries):
        variant = BoundVariant("safe", 1.0)
        for _, q in small_queries:
            sims = small_corpus.score_all(q)

            def walk(node, qs):
                if node.is_leaf:
                    return
                qs_next = query_descend_update(qs, node, q)
                for child in (node.left, node.right):
                    bound = compute_bound(child, qs_next, variant)
                    assert bound >= subtree_max_sim(small_corpus, child, sims) - 1e-9
                    walk(child, qs_next)

            walk(small_tree.root, empty_proj_state())

    def test_prune_accounting(self, small_corpus, small_tree, small_queries):
        n = len(small_corpus)
        for _, q in small_queries:
            for variant in (BoundVariant("safe", 1.0), BoundVariant("safe", 0.7),
                            BoundVariant("heuristic", 0.8)):
                _, stats = search_tree(small_tree, q, 10, variant)
                assert stats.scored + stats.pruned == n

    def test_tightening_monotone_on_replay(self, small_tree, small_queries):
        # events recorded at gamma hi; replaying the same raw bounds and kth
        # values at any lower gamma must keep every pruned branch pruned
        hi, lo = 0.9, 0.6
        for _, q in small_queries:
            _, stats = search_tree(small_tree, q, 10, BoundVariant("safe", hi), collect_trace=True)
            for raw, kth, pruned in stats.bound_events:
                if pruned:
                    assert lo * raw < kth

    def test_heuristic_terminates_with_finite_bounds(self, small_tree, small_queries):
        for _, q in small_queries[:5]:
            results, stats = search_tree(small_tree, q, 10, BoundVariant("heuristic", 1.0), collect_trace=True)
            assert len(results) == 10
            assert all(np.isfinite(raw) for raw, _, _ in stats.bound_events)

    def test_rejects_bad_inputs(self, small_tree):
        with pytest.raises(DimensionMismatch):
            search_tree(small_tree, SparseVector.unit_axis(0, 3), 5)
        q = small_tree.corpus.vector(0)
        with pytest.raises(ValueError):
            search_tree(small_tree, q, 0)
