"""Ground-truth scoring and the ball-tree inner-product comparator.

The brute-force scorer is the oracle every other retrieval path is judged
against.  The ball tree bounds a subtree's best similarity by the query's
dot with the node centroid plus the node radius, and is searched with the
same traversal, queue, tightening, and prune accounting as the pivot
tree.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch
from .search import SearchStats, TopKQueue
from .vectors import Corpus, SparseVector


def brute_force_topk(corpus: Corpus, q: SparseVector, k: int) -> list[tuple[str, float]]:
    """Exact top-k by exhaustive scoring; ties favor the lower position."""
    if k < 1:
        raise ValueError("k must be >= 1")
    sims = corpus.score_all(q)
    order = np.lexsort((np.arange(sims.size), -sims))[: min(k, sims.size)]
    return [(corpus.doc_ids[pos], float(sims[pos])) for pos in order]


@dataclass
class BallNode:
    """Centroid/radius envelope over a document subset."""

    centroid: np.ndarray
    radius: float
    size: int
    left: "BallNode | None" = None
    right: "BallNode | None" = None
    doc_positions: np.ndarray | None = None

    @property
    def is_leaf(self) -> bool:
        return self.doc_positions is not None


@dataclass
class BallTree:
    corpus: Corpus
    root: BallNode
    leaf_capacity: int
    seed: int

    @property
    def n_docs(self) -> int:
        return len(self.corpus)

    @property
    def dim(self) -> int:
        return self.corpus.dim


def build_ball_tree(corpus: Corpus, leaf_capacity: int = 32, seed: int = 0) -> BallTree:
    """Two-anchor splits: farthest doc from the mean, then farthest from it.

    The split rule is deterministic (distance ties favor the lower
    position); the seed is recorded for the index header only.
    """
    if leaf_capacity < 1:
        raise ValueError("leaf_capacity must be >= 1")
    matrix = corpus.matrix

    def sq_dist_to(positions: np.ndarray, point: np.ndarray, row_norm_sq: np.ndarray) -> np.ndarray:
        d2 = row_norm_sq - 2.0 * (matrix[positions] @ point) + float(point @ point)
        return np.maximum(d2, 0.0)

    def recurse(positions: np.ndarray) -> BallNode:
        sub = matrix[positions]
        m = positions.size
        centroid = np.asarray(sub.sum(axis=0)).ravel() / m
        row_norm_sq = np.asarray(sub.multiply(sub).sum(axis=1)).ravel()
        d2_centroid = sq_dist_to(positions, centroid, row_norm_sq)
        node = BallNode(centroid, float(np.sqrt(d2_centroid.max())), m)
        if m <= leaf_capacity:
            node.doc_positions = positions
            return node
        anchor_a = int(np.argmax(d2_centroid))
        d2_a = sq_dist_to(positions, corpus.vector(int(positions[anchor_a])).to_dense(), row_norm_sq)
        anchor_b = int(np.argmax(d2_a))
        if anchor_b == anchor_a:  # all documents identical
            node.doc_positions = positions
            return node
        d2_b = sq_dist_to(positions, corpus.vector(int(positions[anchor_b])).to_dense(), row_norm_sq)
        near_a = d2_a <= d2_b
        if near_a.all() or not near_a.any():
            node.doc_positions = positions
            return node
        node.left = recurse(positions[near_a])
        node.right = recurse(positions[~near_a])
        return node

    return BallTree(corpus, recurse(np.arange(len(corpus), dtype=np.int64)), leaf_capacity, seed)


def mip_bound(node: BallNode, q: SparseVector) -> float:
    """Upper bound q.d over the ball: q.centroid + radius for unit q."""
    return float(q.values @ node.centroid[q.indices]) + node.radius


def mip_search(
    tree: BallTree,
    q: SparseVector,
    k: int,
    gamma: float = 1.0,
    collect_trace: bool = False,
) -> tuple[list[tuple[str, float]], SearchStats]:
    """Branch-and-bound over the ball tree; exact at gamma=1."""
    corpus = tree.corpus
    if q.dim != corpus.dim:
        raise DimensionMismatch(f"query dim {q.dim} vs corpus dim {corpus.dim}")
    if k < 1:
        raise ValueError("k must be >= 1")
    if not 0.0 < gamma <= 1.0:
        raise ValueError("gamma must be in (0, 1]")
    qd = q.to_dense()
    queue = TopKQueue(k)
    stats = SearchStats()

    def consider(child: BallNode, bound: float) -> None:
        kth = queue.kth_value()
        pruned = bound < kth
        if collect_trace:
            stats.bound_events.append((bound / gamma, kth, pruned))
        if pruned:
            stats.pruned += child.size
        else:
            visit(child)

    def visit(node: BallNode) -> None:
        if node.is_leaf:
            sims = corpus.scores_dense(node.doc_positions, qd)
            for pos, sim in zip(node.doc_positions.tolist(), sims.tolist()):
                queue.insert(sim, pos)
            stats.scored += node.size
            return
        bl = gamma * mip_bound(node.left, q)
        br = gamma * mip_bound(node.right, q)
        if bl >= br:
            consider(node.left, bl)
            consider(node.right, br)
        else:
            consider(node.right, br)
            consider(node.left, bl)

    visit(tree.root)
    results = [(corpus.doc_ids[pos], sim) for pos, sim in queue.items()]
    return results, stats
