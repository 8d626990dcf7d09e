"""Input coercion helpers for the estimator layer."""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np
import scipy.sparse as sp

from .errors import DimensionMismatch
from .vectors import Corpus, SparseVector, normalize


def as_corpus(X, doc_ids: Sequence[str] | None = None) -> Corpus:
    """Accept a Corpus, a scipy sparse matrix, or a dense (n, dim) array."""
    if isinstance(X, Corpus):
        if doc_ids is not None:
            raise ValueError("doc_ids only apply when X is a raw matrix")
        return X
    if sp.issparse(X) or isinstance(X, np.ndarray):
        return Corpus.from_matrix(X, doc_ids)
    raise TypeError(f"cannot build a corpus from {type(X).__name__}")


def as_query(x, dim: int) -> SparseVector:
    """Coerce one query to a unit-norm SparseVector in the corpus space."""
    if isinstance(x, SparseVector):
        vec = x
    elif sp.issparse(x):
        row = sp.csr_matrix(x)
        if row.shape[0] != 1:
            raise ValueError("a query must be a single row")
        row.sort_indices()
        vec = SparseVector(row.indices.astype(np.int64), row.data.astype(np.float64), row.shape[1])
    else:
        arr = np.asarray(x, dtype=np.float64)
        if arr.ndim != 1:
            raise ValueError("a dense query must be one-dimensional")
        nz = np.nonzero(arr)[0]
        vec = SparseVector(nz.astype(np.int64), arr[nz], arr.size)
    if vec.dim != dim:
        raise DimensionMismatch(f"query dim {vec.dim} vs corpus dim {dim}")
    return normalize(vec)


def iter_queries(X, dim: int) -> list[SparseVector]:
    """Coerce a batch of queries (matrix rows or a sequence) to unit vectors."""
    if isinstance(X, SparseVector):
        return [as_query(X, dim)]
    if sp.issparse(X):
        csr = sp.csr_matrix(X)
        return [as_query(csr.getrow(i), dim) for i in range(csr.shape[0])]
    if isinstance(X, np.ndarray) and X.ndim == 2:
        return [as_query(row, dim) for row in X]
    if isinstance(X, (list, tuple)):
        return [as_query(x, dim) for x in X]
    return [as_query(X, dim)]
