"""Online top-k retrieval over a built pivot tree.

Branch-and-bound depth-first descent: at each internal node the query's
coordinate on the node's pivot direction is advanced with the stored
extension record, both children receive an upper bound on the similarity
any of their documents can reach, and a child is skipped when its bound
falls strictly below the current k-th best similarity.  Leaves are scored
exactly.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field

import numpy as np

from .basis import ProjState, empty_proj_state, update_proj
from .errors import DimensionMismatch
from .tree import PivotNode, PivotTree
from .vectors import SparseVector


@dataclass(frozen=True)
class BoundVariant:
    """Which node bound to use and how hard to tighten it.

    ``safe`` never underestimates a subtree's best similarity at gamma=1,
    so the search is exact; ``heuristic`` is tighter but can under-bound.
    ``gamma`` in (0, 1] scales the finished bound to trade accuracy for
    pruning.
    """

    tag: str = "safe"
    gamma: float = 1.0

    def __post_init__(self):
        if self.tag not in ("safe", "heuristic"):
            raise ValueError(f"unknown bound variant {self.tag!r}")
        if not 0.0 < self.gamma <= 1.0:
            raise ValueError("gamma must be in (0, 1]")


class TopKQueue:
    """Bounded collection of the k best (similarity, position) pairs.

    Ties in similarity favor the lower document position, both for what
    stays in the queue and for the final ordering.
    """

    def __init__(self, k: int):
        if k < 1:
            raise ValueError("k must be >= 1")
        self.k = k
        self._heap: list[tuple[float, int]] = []  # (sim, -pos), min-heap on worst

    def __len__(self) -> int:
        return len(self._heap)

    def kth_value(self) -> float:
        if len(self._heap) < self.k:
            return -np.inf
        return self._heap[0][0]

    def insert(self, sim: float, pos: int) -> None:
        entry = (sim, -pos)
        if len(self._heap) < self.k:
            heapq.heappush(self._heap, entry)
        elif entry > self._heap[0]:
            heapq.heapreplace(self._heap, entry)

    def items(self) -> list[tuple[int, float]]:
        """Pairs (position, similarity), best first."""
        ordered = sorted(self._heap, key=lambda e: (-e[0], -e[1]))
        return [(-neg, sim) for sim, neg in ordered]


@dataclass
class SearchStats:
    """Per-query accounting; scored + pruned covers the corpus exactly."""

    scored: int = 0
    pruned: int = 0
    # (unscaled bound, kth at test time, was pruned); filled when tracing
    bound_events: list[tuple[float, float, bool]] = field(default_factory=list)


def compute_bound(node: PivotNode, qs: ProjState, variant: BoundVariant) -> float:
    """Upper bound on query-document similarity over the node's subtree.

    Uses the query's projection mass on the node's ancestor-pivot span and
    the node's stored min/max document projection envelope.  Radicands are
    clamped to [0, 1] against rounding.
    """
    a2 = min(max(qs.proj_norm_sq, 0.0), 1.0)
    a = np.sqrt(a2)
    mx = min(max(node.max_proj_sq, 0.0), 1.0)
    mn = min(max(node.min_proj_sq, 0.0), 1.0)
    if variant.tag == "safe":
        value = a * np.sqrt(mx) + np.sqrt(1.0 - a2) * np.sqrt(1.0 - mn)
    else:
        value = 1.0 + 2.0 * a * np.sqrt(mx) - a - np.sqrt(mn)
    return variant.gamma * float(value)


def query_descend_update(qs: ProjState, node: PivotNode, q: SparseVector) -> ProjState:
    """Advance the query's projection state across an internal node's pivot."""
    if node.ext is None or node.pivot is None:
        raise ValueError("query descent requires an internal node")
    return update_proj(qs, q, node.ext, node.pivot)


def search_tree(
    tree: PivotTree,
    q: SparseVector,
    k: int,
    variant: BoundVariant = BoundVariant(),
    collect_trace: bool = False,
) -> tuple[list[tuple[str, float]], SearchStats]:
    """Best-bound-first top-k retrieval; exact with the safe bound at gamma=1.

    Returns ranked (doc_id, similarity) pairs and the prune accounting.
    """
    corpus = tree.corpus
    if q.dim != corpus.dim:
        raise DimensionMismatch(f"query dim {q.dim} vs corpus dim {corpus.dim}")
    if k < 1:
        raise ValueError("k must be >= 1")
    qd = q.to_dense()
    queue = TopKQueue(k)
    stats = SearchStats()

    def consider(child: PivotNode, bound: float, qs: ProjState) -> None:
        kth = queue.kth_value()
        pruned = bound < kth
        if collect_trace:
            stats.bound_events.append((bound / variant.gamma, kth, pruned))
        if pruned:
            stats.pruned += child.size
        else:
            visit(child, qs)

    def visit(node: PivotNode, qs: ProjState) -> None:
        if node.is_leaf:
            sims = corpus.scores_dense(node.doc_positions, qd)
            for pos, sim in zip(node.doc_positions.tolist(), sims.tolist()):
                queue.insert(sim, pos)
            stats.scored += node.size
            return
        qs_next = query_descend_update(qs, node, q)
        bl = compute_bound(node.left, qs_next, variant)
        br = compute_bound(node.right, qs_next, variant)
        if bl >= br:
            consider(node.left, bl, qs_next)
            consider(node.right, br, qs_next)
        else:
            consider(node.right, br, qs_next)
            consider(node.left, bl, qs_next)

    visit(tree.root, empty_proj_state())
    results = [(corpus.doc_ids[pos], sim) for pos, sim in queue.items()]
    return results, stats
