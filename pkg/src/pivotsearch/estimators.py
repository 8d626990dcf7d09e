"""Scikit-learn style facade over the retrieval structures.

All three estimators share the same surface: ``fit(X)`` ingests a corpus
(a :class:`~pivotsearch.vectors.Corpus`, a scipy sparse matrix, or a dense
array of row vectors), ``kneighbors`` returns similarity/index arrays in
the sklearn convention (similarities descending, not distances), and
``search`` gives the richer per-query view with doc ids and prune
accounting.  Parameters round-trip through ``get_params``/``set_params``
so the estimators compose with pipelines, cloning, and grid search.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from ._validation import as_corpus, as_query, iter_queries
from .baselines import brute_force_topk, build_ball_tree, mip_search
from .search import BoundVariant, search_tree
from .tree import BuildConfig, build_tree


class _FittedMixin:
    def _corpus(self):
        corpus = getattr(self, "corpus_", None)
        if corpus is None:
            raise NotFittedError(f"{type(self).__name__} is not fitted; call fit first")
        return corpus

    def kneighbors(self, X, n_neighbors: int = 10):
        """Similarities and corpus positions of the top matches per query.

        Returns ``(similarities, indices)`` arrays of shape
        ``(n_queries, n_neighbors)``, best first.
        """
        corpus = self._corpus()
        queries = iter_queries(X, corpus.dim)
        sims = np.full((len(queries), n_neighbors), -np.inf)
        idx = np.full((len(queries), n_neighbors), -1, dtype=np.int64)
        for r, q in enumerate(queries):
            results, _ = self.search(q, k=n_neighbors)
            for c, (doc_id, sim) in enumerate(results):
                sims[r, c] = sim
                idx[r, c] = corpus.position(doc_id)
        return sims, idx


class BruteForceIndex(_FittedMixin, BaseEstimator):
    """Exhaustive exact scorer; the reference the trees are judged against."""

    def fit(self, X, y=None, doc_ids=None):
        self.corpus_ = as_corpus(X, doc_ids)
        return self

    def search(self, query, k: int = 10):
        corpus = self._corpus()
        q = as_query(query, corpus.dim)
        results = brute_force_topk(corpus, q, k)
        return results, None


class PivotTreeIndex(_FittedMixin, BaseEstimator):
    """Top-k cosine retrieval through an orthogonal pivot tree.

    Parameters
    ----------
    leaf_capacity : int, stop splitting below this many documents.
    candidate_count : int, pivots sampled per node.
    max_depth : int, hard depth cap.
    bound : "safe" for exact search at gamma=1, "heuristic" for the
        tighter experimental bound.
    gamma : float in (0, 1], bound tightening multiplier.
    selector : "trace" scores candidates by gained projection mass,
        "literal" by raw squared dots.
    random_state : int, seed for candidate sampling.
    """

    def __init__(
        self,
        leaf_capacity: int = 32,
        candidate_count: int = 10,
        max_depth: int = 64,
        bound: str = "safe",
        gamma: float = 1.0,
        selector: str = "trace",
        random_state: int = 0,
    ):
        self.leaf_capacity = leaf_capacity
        self.candidate_count = candidate_count
        self.max_depth = max_depth
        self.bound = bound
        self.gamma = gamma
        self.selector = selector
        self.random_state = random_state

    def fit(self, X, y=None, doc_ids=None):
        self.corpus_ = as_corpus(X, doc_ids)
        cfg = BuildConfig(
            leaf_capacity=self.leaf_capacity,
            candidate_count=self.candidate_count,
            rng_seed=self.random_state,
            max_depth=self.max_depth,
            selector=self.selector,
        )
        self.tree_ = build_tree(self.corpus_, cfg)
        self.tree_.bound_default = self.bound
        return self

    def search(self, query, k: int = 10, bound: str | None = None, gamma: float | None = None):
        corpus = self._corpus()
        q = as_query(query, corpus.dim)
        variant = BoundVariant(bound or self.bound, self.gamma if gamma is None else gamma)
        return search_tree(self.tree_, q, k, variant)


class BallTreeIndex(_FittedMixin, BaseEstimator):
    """Centroid/radius inner-product ball tree, the comparison baseline."""

    def __init__(self, leaf_capacity: int = 32, gamma: float = 1.0, random_state: int = 0):
        self.leaf_capacity = leaf_capacity
        self.gamma = gamma
        self.random_state = random_state

    def fit(self, X, y=None, doc_ids=None):
        self.corpus_ = as_corpus(X, doc_ids)
        self.tree_ = build_ball_tree(self.corpus_, self.leaf_capacity, self.random_state)
        return self

    def search(self, query, k: int = 10, gamma: float | None = None):
        corpus = self._corpus()
        q = as_query(query, corpus.dim)
        return mip_search(self.tree_, q, k, self.gamma if gamma is None else gamma)
