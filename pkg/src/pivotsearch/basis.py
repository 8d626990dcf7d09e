"""Incremental orthonormal basis over a chain of pivot vectors.

The basis for the span of pivots ``p_1..p_n`` is kept factored as the raw
pivot columns times a small upper-triangular coefficient matrix, so the
orthonormal directions are never materialized as full-length vectors.
Appending a pivot costs one sparse dot per existing pivot plus O(n^2)
dense work on the coefficients; updating any vector's projection after an
append costs O(n) plus one sparse dot.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegeneratePivot, NumericalDrift
from .vectors import SparseVector, dot, norm_sq

# Residual mass below which a pivot counts as linearly dependent: the
# inverse residual norm would amplify rounding noise past usefulness.
EPS_SPAN = 1e-7

# Window of negative residual attributed to rounding; anything below is
# treated as genuine numerical drift.
_DRIFT_TOL = 1e-9


@dataclass(frozen=True)
class Basis:
    """Orthonormal basis of pivot span, factored as pivots times coeff.

    ``coeff`` is upper triangular with positive diagonal; column j holds
    the combination of raw pivots producing the j-th orthonormal
    direction.
    """

    dim: int
    pivots: tuple[SparseVector, ...]
    coeff: np.ndarray  # (depth, depth), upper triangular

    @property
    def depth(self) -> int:
        return len(self.pivots)


@dataclass(frozen=True)
class ExtensionRecord:
    """Coefficients produced when one pivot is appended to a basis.

    ``alpha`` is the inverse norm of the pivot's residual against the old
    span; ``w`` maps a vector's existing pivot dots to the correction term
    of its new coordinate; ``pivot_dots`` caches the new pivot's dots with
    the old pivots.
    """

    alpha: float
    w: np.ndarray  # (old depth,)
    pivot_dots: np.ndarray  # (old depth,)


@dataclass(frozen=True)
class ProjState:
    """A vector's projection bookkeeping along a pivot chain.

    ``coords`` are its coordinates on the orthonormal directions,
    ``proj_norm_sq`` their running sum of squares, ``pivot_dots`` its raw
    dots with the pivots in order.
    """

    coords: np.ndarray
    proj_norm_sq: float
    pivot_dots: np.ndarray


def empty_basis(dim: int) -> Basis:
    if dim < 1:
        raise ValueError("dim must be positive")
    return Basis(dim, (), np.zeros((0, 0), dtype=np.float64))


def empty_proj_state() -> ProjState:
    z = np.zeros(0, dtype=np.float64)
    return ProjState(z, 0.0, z)


def projection_norm_sq(b: Basis, pivot_dots: np.ndarray) -> float:
    """Squared norm of a vector's projection onto the span, from its pivot dots."""
    if b.depth == 0:
        return 0.0
    coords = b.coeff.T @ np.asarray(pivot_dots, dtype=np.float64)
    return float(coords @ coords)


def residual_norm_sq(b: Basis, p: SparseVector, pivot_dots: np.ndarray) -> float:
    """Squared norm of p's component orthogonal to the span.

    ``pivot_dots`` must hold p's dots with the basis pivots in order.
    Small negative values (rounding) clamp to zero; larger ones raise.
    """
    r = norm_sq(p) - projection_norm_sq(b, pivot_dots)
    if r < 0.0:
        if r < -_DRIFT_TOL:
            raise NumericalDrift(f"residual norm squared {r:.3e} below rounding tolerance")
        return 0.0
    return r


def extend(b: Basis, p: SparseVector) -> tuple[Basis, ExtensionRecord]:
    """Append pivot p, returning the deeper basis and its extension record.

    Raises DegeneratePivot when p is (numerically) inside the current span.
    """
    if p.dim != b.dim:
        raise ValueError(f"pivot dim {p.dim} does not match basis dim {b.dim}")
    n = b.depth
    s = np.array([dot(p, q) for q in b.pivots], dtype=np.float64)
    r = residual_norm_sq(b, p, s)
    if r <= EPS_SPAN:
        raise DegeneratePivot(f"pivot residual {r:.3e} at depth {n}")
    alpha = 1.0 / np.sqrt(r)
    w = b.coeff @ (b.coeff.T @ s) if n else np.zeros(0, dtype=np.float64)
    coeff = np.zeros((n + 1, n + 1), dtype=np.float64)
    coeff[:n, :n] = b.coeff
    coeff[:n, n] = -alpha * w
    coeff[n, n] = alpha
    return Basis(b.dim, b.pivots + (p,), coeff), ExtensionRecord(float(alpha), w, s)


def update_proj(state: ProjState, d: SparseVector, rec: ExtensionRecord, p: SparseVector) -> ProjState:
    """Advance d's projection state across the extension that appended p.

    The new coordinate is alpha * (d.p - w.pivot_dots(d)); its square is
    added to the running projection norm.
    """
    dp = dot(d, p)
    c = rec.alpha * (dp - float(rec.w @ state.pivot_dots))
    return ProjState(
        np.append(state.coords, c),
        state.proj_norm_sq + c * c,
        np.append(state.pivot_dots, dp),
    )


def materialize(b: Basis) -> np.ndarray:
    """Dense (dim, depth) matrix of the orthonormal columns; test oracle bridge."""
    if b.depth == 0:
        raise ValueError("cannot materialize an empty basis")
    P = np.zeros((b.dim, b.depth), dtype=np.float64)
    for j, p in enumerate(b.pivots):
        P[p.indices, j] = p.values
    return P @ b.coeff
