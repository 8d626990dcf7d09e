"""Offline pivot-tree construction.

Each internal node picks the sampled candidate document whose
orthogonalized direction would absorb the most projection mass from the
node's documents (trace gain), appends it to the path basis, and splits
the documents at the median of their squared coordinates on the new
direction.  Every node stores the min/max squared projection of its
subtree's documents under the basis of its ancestors, which is what the
online bound consumes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import basis as basis_mod
from .basis import Basis, ExtensionRecord, empty_basis, extend, projection_norm_sq
from .errors import DegeneratePivot, UnsplittableNode
from .vectors import Corpus, SparseVector, norm_sq


@dataclass
class BuildConfig:
    """Knobs for tree construction; defaults suit desk-scale corpora."""

    leaf_capacity: int = 32
    candidate_count: int = 10
    rng_seed: int = 0
    max_depth: int = 64
    selector: str = "trace"  # "trace" or the raw-dot "literal" variant

    def __post_init__(self):
        if self.leaf_capacity < 1:
            raise ValueError("leaf_capacity must be >= 1")
        if self.candidate_count < 1:
            raise ValueError("candidate_count must be >= 1")
        if self.max_depth < 1:
            raise ValueError("max_depth must be >= 1")
        if self.selector not in ("trace", "literal"):
            raise ValueError(f"unknown selector {self.selector!r}")


@dataclass
class DocProjections:
    """Batched projection states for a subset of corpus documents.

    Row i tracks document ``positions[i]``: its dots with the path pivots,
    its coordinates on the orthonormal directions, and the running squared
    projection norm.  Positions stay in ascending corpus order.
    """

    positions: np.ndarray  # (m,) int64
    pivot_dots: np.ndarray  # (m, depth)
    coords: np.ndarray  # (m, depth)
    proj_norm_sq: np.ndarray  # (m,)

    def __len__(self) -> int:
        return int(self.positions.size)

    @classmethod
    def initial(cls, n_docs: int) -> "DocProjections":
        return cls(
            np.arange(n_docs, dtype=np.int64),
            np.zeros((n_docs, 0)),
            np.zeros((n_docs, 0)),
            np.zeros(n_docs),
        )

    def take(self, mask: np.ndarray) -> "DocProjections":
        return DocProjections(
            self.positions[mask], self.pivot_dots[mask], self.coords[mask], self.proj_norm_sq[mask]
        )


@dataclass
class PivotNode:
    """One tree node; a leaf lists documents, an internal node a pivot."""

    min_proj_sq: float
    max_proj_sq: float
    size: int
    # internal nodes only
    pivot_pos: int | None = None
    pivot: SparseVector | None = None
    ext: ExtensionRecord | None = None
    split_threshold: float | None = None
    left: "PivotNode | None" = None
    right: "PivotNode | None" = None
    # leaves only
    doc_positions: np.ndarray | None = None

    @property
    def is_leaf(self) -> bool:
        return self.doc_positions is not None


@dataclass
class PivotTree:
    """Built index: the node structure plus what queries need from the corpus."""

    corpus: Corpus
    root: PivotNode
    config: BuildConfig
    bound_default: str = "safe"
    vocab: dict[str, int] = field(default_factory=dict)
    idf: np.ndarray | None = None

    @property
    def n_docs(self) -> int:
        return len(self.corpus)

    @property
    def dim(self) -> int:
        return self.corpus.dim


def _sample_candidates(rng: np.random.Generator, m: int, count: int) -> np.ndarray:
    """Distinct candidate rows, returned in ascending order for tie-breaking."""
    rows = rng.choice(m, size=min(count, m), replace=False)
    return np.sort(rows)


def select_pivot(
    corpus: Corpus,
    docs: DocProjections,
    b: Basis,
    cfg: BuildConfig,
    rng: np.random.Generator,
) -> int:
    """Pick the sampled document maximizing the selector score over docs.

    The trace selector scores a candidate by the total squared coordinate
    the documents would gain on its orthogonalized direction; the literal
    selector by raw squared dots.  Returns a corpus position; ties go to
    the lowest one.  Raises DegeneratePivot when every sampled candidate
    sits in the current span.
    """
    m = len(docs)
    if m < 1:
        raise ValueError("cannot select a pivot from an empty document set")
    rows = _sample_candidates(rng, m, cfg.candidate_count)
    sub = corpus.matrix[docs.positions]
    best_pos, best_score = -1, -np.inf
    for j in rows:
        pos = int(docs.positions[j])
        p = corpus.vector(pos)
        s = docs.pivot_dots[j]
        r = norm_sq(p) - projection_norm_sq(b, s)
        if r <= basis_mod.EPS_SPAN:
            continue
        dp = sub @ p.to_dense()
        if cfg.selector == "literal":
            score = float(dp @ dp) / norm_sq(p)
        else:
            w = b.coeff @ (b.coeff.T @ s) if b.depth else np.zeros(0)
            tw = docs.pivot_dots @ w if b.depth else 0.0
            c = dp - tw
            score = float(c @ c) / r
        if score > best_score:
            best_pos, best_score = pos, score
    if best_pos < 0:
        raise DegeneratePivot("all sampled candidates lie in the current span")
    return best_pos


def update_projections(
    corpus: Corpus, docs: DocProjections, rec: ExtensionRecord, p: SparseVector
) -> DocProjections:
    """Advance every document's projection across one basis extension."""
    m = len(docs)
    if m == 0:
        depth = docs.pivot_dots.shape[1] + 1
        return DocProjections(docs.positions, np.zeros((0, depth)), np.zeros((0, depth)), docs.proj_norm_sq)
    dp = corpus.matrix[docs.positions] @ p.to_dense()
    tw = docs.pivot_dots @ rec.w if rec.w.size else np.zeros(m)
    c = rec.alpha * (dp - tw)
    return DocProjections(
        docs.positions,
        np.hstack([docs.pivot_dots, dp[:, None]]),
        np.hstack([docs.coords, c[:, None]]),
        docs.proj_norm_sq + c * c,
    )


def make_split(docs: DocProjections) -> tuple[DocProjections, DocProjections, float]:
    """Partition at the median of squared coordinates on the newest direction.

    Side A holds documents strictly above the threshold.  When the median
    coincides with the maximum, the threshold drops to the next distinct
    value below so neither side is empty.  Raises UnsplittableNode when all
    coordinates agree.
    """
    if len(docs) < 2:
        raise ValueError("cannot split fewer than two documents")
    if docs.coords.shape[1] == 0:
        raise ValueError("split requires an updated pivot coordinate")
    key = docs.coords[:, -1] ** 2
    if np.all(key == key[0]):
        raise UnsplittableNode("all split coordinates identical")
    c = float(np.median(key))
    above = key > c
    if not above.any():
        c = float(key[key < key.max()].max())
        above = key > c
    return docs.take(above), docs.take(~above), c


def build_tree(corpus: Corpus, cfg: BuildConfig) -> PivotTree:
    """Recursively build the pivot tree; deterministic given the rng seed."""
    rng = np.random.default_rng(cfg.rng_seed)

    def recurse(docs: DocProjections, b: Basis, depth: int) -> PivotNode:
        node = PivotNode(
            min_proj_sq=float(docs.proj_norm_sq.min()),
            max_proj_sq=float(docs.proj_norm_sq.max()),
            size=len(docs),
        )
        if len(docs) <= cfg.leaf_capacity or depth >= cfg.max_depth:
            node.doc_positions = docs.positions
            return node
        try:
            pivot_pos = select_pivot(corpus, docs, b, cfg, rng)
            p = corpus.vector(pivot_pos)
            b_next, rec = extend(b, p)
            updated = update_projections(corpus, docs, rec, p)
            side_a, side_b, threshold = make_split(updated)
        except (DegeneratePivot, UnsplittableNode):
            node.doc_positions = docs.positions
            return node
        node.pivot_pos = pivot_pos
        node.pivot = p
        node.ext = rec
        node.split_threshold = threshold
        node.left = recurse(side_a, b_next, depth + 1)
        node.right = recurse(side_b, b_next, depth + 1)
        return node

    root = recurse(DocProjections.initial(len(corpus)), empty_basis(corpus.dim), 0)
    return PivotTree(corpus, root, cfg, vocab=corpus.vocab, idf=corpus.idf)
