"""Shared test oracles, independent of the package's incremental algebra."""

import numpy as np

from pivotsearch import Corpus, SparseVector


def dense_gram_schmidt(columns: list[np.ndarray]) -> np.ndarray:
    """Orthonormalize dense columns by modified Gram-Schmidt.

    Returns a (dim, n) matrix with orthonormal columns spanning the same
    space as the inputs, assuming they are linearly independent.
    """
    dim = columns[0].size
    Q = np.zeros((dim, len(columns)), dtype=np.float64)
    for j, col in enumerate(columns):
        v = col.astype(np.float64).copy()
        for i in range(j):
            v -= (Q[:, i] @ v) * Q[:, i]
        # second pass for orthogonality at working precision
        for i in range(j):
            v -= (Q[:, i] @ v) * Q[:, i]
        Q[:, j] = v / np.linalg.norm(v)
    return Q


def dense_basis_for(pivots) -> np.ndarray:
    """Gram-Schmidt oracle basis for a sequence of sparse pivots."""
    return dense_gram_schmidt([p.to_dense() for p in pivots])


def proj_norm_sq_oracle(Q: np.ndarray, d_dense: np.ndarray, depth: int | None = None) -> float:
    """Squared projection norm of a vector onto the first ``depth`` columns."""
    cols = Q if depth is None else Q[:, :depth]
    coords = cols.T @ d_dense
    return float(coords @ coords)


def random_unit_sparse(rng: np.random.Generator, dim: int, nnz: int) -> SparseVector:
    idx = np.sort(rng.choice(dim, size=min(nnz, dim), replace=False))
    val = rng.normal(size=idx.size)
    while not np.all(val != 0.0):
        val = rng.normal(size=idx.size)
    val /= np.linalg.norm(val)
    return SparseVector(idx.astype(np.int64), val, dim)


def axes_corpus(n: int = 3, dim: int | None = None) -> Corpus:
    """Corpus of the first n coordinate axes; mutually orthogonal unit docs."""
    dim = dim or n
    docs = [(f"d{i+1}", SparseVector.unit_axis(i, dim)) for i in range(n)]
    return Corpus.from_vectors(docs)


def leaf_positions(node) -> list[np.ndarray]:
    if node.is_leaf:
        return [node.doc_positions]
    return leaf_positions(node.left) + leaf_positions(node.right)


def walk_nodes(node):
    yield node
    if not node.is_leaf:
        yield from walk_nodes(node.left)
        yield from walk_nodes(node.right)
