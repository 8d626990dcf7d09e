import numpy as np
import pytest
import scipy.sparse as sp
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from pivotsearch import BallTreeIndex, BruteForceIndex, PivotTreeIndex


@pytest.fixture(scope="module")
def random_rows():
    rng = np.random.default_rng(0)
    X = sp.random(150, 80, density=0.2, random_state=np.random.RandomState(0), format="csr")
    X.data = np.abs(X.data) + 0.1
    queries = sp.random(5, 80, density=0.2, random_state=np.random.RandomState(1), format="csr")
    queries.data = np.abs(queries.data) + 0.1
    return X, queries


class TestEstimatorProtocol:
    def test_get_set_params_round_trip(self):
        est = PivotTreeIndex(leaf_capacity=16, gamma=0.9, random_state=5)
        params = est.get_params()
        assert params["leaf_capacity"] == 16 and params["gamma"] == 0.9
        est.set_params(leaf_capacity=8)
        assert est.leaf_capacity == 8

    def test_clone(self):
        est = PivotTreeIndex(candidate_count=4, selector="literal")
        c = clone(est)
        assert c.get_params() == est.get_params()

    def test_not_fitted_raises(self):
        with pytest.raises(NotFittedError):
            PivotTreeIndex().search(np.ones(4), k=1)
        with pytest.raises(NotFittedError):
            BallTreeIndex().kneighbors(np.ones(4), 1)

    def test_invalid_params_fail_at_fit(self, random_rows):
        X, _ = random_rows
        with pytest.raises(ValueError):
            PivotTreeIndex(leaf_capacity=0).fit(X)
        with pytest.raises(ValueError):
            PivotTreeIndex(bound="nope").fit(X).search(np.ones(80), k=1)


class TestAgreementWithOracle:
    def test_pivot_tree_matches_brute_force(self, random_rows):
        X, queries = random_rows
        brute = BruteForceIndex().fit(X)
        tree = PivotTreeIndex(leaf_capacity=8, random_state=2).fit(X)
        sims_b, idx_b = brute.kneighbors(queries, 10)
        sims_t, idx_t = tree.kneighbors(queries, 10)
        np.testing.assert_array_equal(idx_b, idx_t)
        np.testing.assert_allclose(sims_b, sims_t, atol=1e-12)

    def test_ball_tree_matches_brute_force(self, random_rows):
        X, queries = random_rows
        brute = BruteForceIndex().fit(X)
        ball = BallTreeIndex(leaf_capacity=8).fit(X)
        sims_b, idx_b = brute.kneighbors(queries, 10)
        sims_m, idx_m = ball.kneighbors(queries, 10)
        np.testing.assert_array_equal(idx_b, idx_m)
        np.testing.assert_allclose(sims_b, sims_m, atol=1e-12)

    def test_fit_accepts_corpus(self, small_corpus, small_queries):
        tree = PivotTreeIndex(leaf_capacity=8, random_state=11).fit(small_corpus)
        _, q = small_queries[0]
        results, stats = tree.search(q, k=5)
        brute = BruteForceIndex().fit(small_corpus)
        want, _ = brute.search(q, k=5)
        assert results == want
        assert stats.scored + stats.pruned == len(small_corpus)

    def test_search_overrides_bound_and_gamma(self, small_corpus, small_queries):
        tree = PivotTreeIndex(leaf_capacity=8, random_state=11).fit(small_corpus)
        _, q = small_queries[1]
        exact, _ = tree.search(q, k=10)
        loose, stats = tree.search(q, k=10, bound="heuristic", gamma=0.6)
        assert len(loose) == 10
        assert stats.scored + stats.pruned == len(small_corpus)
        assert [d for d, _ in exact] == [
            d for d, _ in BruteForceIndex().fit(small_corpus).search(q, k=10)[0]
        ]


class TestKneighborsShape:
    def test_shapes_and_order(self, random_rows):
        X, queries = random_rows
        est = BruteForceIndex().fit(X)
        sims, idx = est.kneighbors(queries, 7)
        assert sims.shape == (5, 7) and idx.shape == (5, 7)
        assert np.all(np.diff(sims, axis=1) <= 0)

    def test_dense_single_query(self, random_rows):
        X, _ = random_rows
        est = BruteForceIndex().fit(X)
        q = np.zeros(80)
        q[3] = 1.0
        sims, idx = est.kneighbors(q, 3)
        assert sims.shape == (1, 3)
