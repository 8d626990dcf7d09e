"""Sparse vector algebra and the corpus model.

Vectors live in a fixed term space of dimension ``dim`` and are stored as
parallel ``indices``/``values`` arrays sorted by term index.  Documents and
queries are L2-normalized at ingestion, so inner product equals cosine
similarity everywhere downstream.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import DimensionMismatch

# Relative slack under which a vector counts as already unit-norm and
# normalize becomes the identity (keeps round-trips bit-exact).
_UNIT_TOL = 1e-12


@dataclass(frozen=True)
class SparseVector:
    """Immutable sparse vector: sorted term indices with nonzero weights."""

    indices: np.ndarray
    values: np.ndarray
    dim: int

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=np.int64)
        val = np.asarray(self.values, dtype=np.float64)
        if idx.ndim != 1 or val.ndim != 1 or idx.shape != val.shape:
            raise ValueError("indices and values must be parallel 1-d arrays")
        if self.dim < 1:
            raise ValueError("dim must be positive")
        if idx.size:
            if np.any(np.diff(idx) <= 0):
                raise ValueError("term indices must be strictly increasing")
            if idx[0] < 0 or idx[-1] >= self.dim:
                raise ValueError(f"term index out of range for dim={self.dim}")
            if not np.all(np.isfinite(val)) or np.any(val == 0.0):
                raise ValueError("weights must be finite and nonzero")
        idx.setflags(write=False)
        val.setflags(write=False)
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "values", val)

    @classmethod
    def from_pairs(cls, entries: Iterable[tuple[int, float]], dim: int) -> "SparseVector":
        """Build from (term_index, weight) pairs in any order; zeros dropped."""
        pairs = sorted((int(i), float(w)) for i, w in entries if w != 0.0)
        idx = np.array([i for i, _ in pairs], dtype=np.int64)
        val = np.array([w for _, w in pairs], dtype=np.float64)
        return cls(idx, val, dim)

    @classmethod
    def unit_axis(cls, term: int, dim: int) -> "SparseVector":
        return cls(np.array([term], dtype=np.int64), np.array([1.0]), dim)

    @property
    def nnz(self) -> int:
        return int(self.indices.size)

    def entries(self) -> list[tuple[int, float]]:
        return list(zip(self.indices.tolist(), self.values.tolist()))

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.dim, dtype=np.float64)
        out[self.indices] = self.values
        return out


def dot(a: SparseVector, b: SparseVector) -> float:
    """Inner product by merging the two sorted index lists.

    Symmetric bit-for-bit: shared indices are accumulated in ascending
    order regardless of argument order.
    """
    if a.dim != b.dim:
        raise DimensionMismatch(f"dot between dim {a.dim} and dim {b.dim}")
    if a.nnz == 0 or b.nnz == 0:
        return 0.0
    _, ia, ib = np.intersect1d(a.indices, b.indices, assume_unique=True, return_indices=True)
    if ia.size == 0:
        return 0.0
    return float(np.sum(a.values[ia] * b.values[ib]))


def norm_sq(a: SparseVector) -> float:
    """Squared L2 norm; equals dot(a, a)."""
    return float(np.sum(a.values * a.values))


def normalize(a: SparseVector) -> SparseVector:
    """Scale to unit L2 norm; identity when already unit within 1e-12."""
    n2 = norm_sq(a)
    if n2 <= 0.0:
        raise ValueError("cannot normalize empty document")
    if abs(n2 - 1.0) <= _UNIT_TOL:
        return a
    return SparseVector(a.indices, a.values / math.sqrt(n2), a.dim)


@dataclass
class Corpus:
    """Unit-normalized document collection over a shared term space.

    Rows are also held as a CSR matrix so batches of inner products run
    vectorized; ``scores_dense`` is the single scoring kernel used by both
    the brute-force oracle and tree leaf scans, which keeps their
    similarity values bit-identical.
    """

    doc_ids: list[str]
    matrix: sp.csr_matrix
    vocab: dict[str, int] = field(default_factory=dict)
    idf: np.ndarray | None = None
    meta: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if len(self.doc_ids) != self.matrix.shape[0]:
            raise ValueError("doc_ids and matrix row count disagree")
        if len(set(self.doc_ids)) != len(self.doc_ids):
            raise ValueError("doc_ids must be unique")
        self._pos = {d: i for i, d in enumerate(self.doc_ids)}

    @classmethod
    def from_vectors(
        cls,
        docs: Sequence[tuple[str, SparseVector]],
        vocab: dict[str, int] | None = None,
        idf: np.ndarray | None = None,
        meta: dict[str, str] | None = None,
    ) -> "Corpus":
        if not docs:
            raise ValueError("corpus must contain at least one document")
        dim = docs[0][1].dim
        indptr = np.zeros(len(docs) + 1, dtype=np.int64)
        idx_parts, val_parts, ids = [], [], []
        for r, (doc_id, vec) in enumerate(docs):
            if vec.dim != dim:
                raise DimensionMismatch(f"document {doc_id!r} has dim {vec.dim}, corpus has {dim}")
            unit = normalize(vec)
            ids.append(doc_id)
            idx_parts.append(unit.indices)
            val_parts.append(unit.values)
            indptr[r + 1] = indptr[r] + unit.nnz
        mat = sp.csr_matrix(
            (np.concatenate(val_parts), np.concatenate(idx_parts).astype(np.int32), indptr),
            shape=(len(docs), dim),
        )
        return cls(ids, mat, dict(vocab or {}), idf, dict(meta or {}))

    @classmethod
    def from_matrix(cls, X, doc_ids: Sequence[str] | None = None) -> "Corpus":
        """Adopt a (n_docs, dim) array or scipy sparse matrix, row-normalizing."""
        mat = sp.csr_matrix(X, dtype=np.float64)
        mat.sort_indices()
        mat.eliminate_zeros()
        norms = np.sqrt(np.asarray(mat.multiply(mat).sum(axis=1)).ravel())
        if np.any(norms == 0.0):
            raise ValueError("cannot normalize empty document")
        scale = np.where(np.abs(norms * norms - 1.0) <= _UNIT_TOL, 1.0, norms)
        mat.data /= np.repeat(scale, np.diff(mat.indptr))
        ids = list(doc_ids) if doc_ids is not None else [f"d{i}" for i in range(mat.shape[0])]
        return cls(ids, mat)

    def __len__(self) -> int:
        return len(self.doc_ids)

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[1])

    def position(self, doc_id: str) -> int:
        return self._pos[doc_id]

    def vector(self, pos: int) -> SparseVector:
        lo, hi = self.matrix.indptr[pos], self.matrix.indptr[pos + 1]
        return SparseVector(
            self.matrix.indices[lo:hi].astype(np.int64), self.matrix.data[lo:hi], self.dim
        )

    def scores_dense(self, positions: np.ndarray | Sequence[int], q_dense: np.ndarray) -> np.ndarray:
        """Inner products of the given document rows against a densified query."""
        return self.matrix[np.asarray(positions, dtype=np.int64)] @ q_dense

    def score_all(self, q: SparseVector) -> np.ndarray:
        if q.dim != self.dim:
            raise DimensionMismatch(f"query dim {q.dim} vs corpus dim {self.dim}")
        return self.matrix @ q.to_dense()


def tfidf_weigh(raw_counts: Sequence[tuple[str, Sequence[tuple[str, int]]]]) -> Corpus:
    """Turn raw (doc_id, [(term, count), ...]) bags into a unit-norm corpus.

    Weight is raw tf times a smoothed idf, ln((1+N)/(1+df)) + 1, which never
    vanishes even for corpus-wide terms.  Term indices follow first
    appearance so ingestion order fully determines the space.
    """
    if not raw_counts:
        raise ValueError("corpus must contain at least one document")
    vocab: dict[str, int] = {}
    doc_term_counts: list[tuple[str, dict[int, int]]] = []
    df: dict[int, int] = {}
    for doc_id, terms in raw_counts:
        counts: dict[int, int] = {}
        for term, count in terms:
            if count <= 0 or count != int(count):
                raise ValueError(f"document {doc_id!r}: count for term {term!r} must be a positive integer")
            t = vocab.setdefault(term, len(vocab))
            counts[t] = counts.get(t, 0) + int(count)
        for t in counts:
            df[t] = df.get(t, 0) + 1
        doc_term_counts.append((doc_id, counts))

    n_docs = len(raw_counts)
    dim = len(vocab)
    idf = np.zeros(dim, dtype=np.float64)
    for t, d in df.items():
        idf[t] = math.log((1.0 + n_docs) / (1.0 + d)) + 1.0

    docs = []
    for doc_id, counts in doc_term_counts:
        if not counts:
            raise ValueError(f"document {doc_id!r} has no nonzero terms")
        pairs = [(t, c * idf[t]) for t, c in counts.items()]
        vec = SparseVector.from_pairs(pairs, dim)
        if norm_sq(vec) == 0.0:
            raise ValueError(f"document {doc_id!r} has no nonzero terms")
        docs.append((doc_id, vec))
    return Corpus.from_vectors(docs, vocab=vocab, idf=idf)


def weigh_counts(
    vocab: dict[str, int],
    idf: np.ndarray | None,
    dim: int,
    term_counts: Sequence[tuple[str, int]],
    label: str = "query",
) -> SparseVector:
    """Weight raw term counts against a stored vocabulary and idf table.

    Terms outside the vocabulary are dropped; raises when nothing
    survives.
    """
    if idf is None or not vocab:
        raise ValueError(f"{label}: no vocabulary/idf table available; supply a weighted query instead")
    acc: dict[int, float] = {}
    for term, count in term_counts:
        if count <= 0:
            raise ValueError(f"{label}: count for term {term!r} must be a positive integer")
        t = vocab.get(term)
        if t is not None:
            acc[t] = acc.get(t, 0.0) + count * float(idf[t])
    if not acc:
        raise ValueError(f"{label}: no query term occurs in the vocabulary")
    return normalize(SparseVector.from_pairs(acc.items(), dim))


def weigh_query(corpus: Corpus, term_counts: Sequence[tuple[str, int]], label: str = "query") -> SparseVector:
    """Map raw query term counts into the corpus space using its idf table."""
    return weigh_counts(corpus.vocab, corpus.idf, corpus.dim, term_counts, label)
