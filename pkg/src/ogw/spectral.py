"""Linear-algebra substrate shared by the discrepancy solvers.

Provides the centering-orthonormal projection bases, the reduced ("hat")
congruence, symmetric eigendecomposition and SVD wrappers, projection onto
matrices with orthonormal columns, and the per-graph spectral feature
embedding whose squared Euclidean distance reproduces the closed-form
lower bound.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import sqrt

import numpy as np


@dataclass(frozen=True)
class ProjectionBasis:
    """Orthonormal basis of the complement of the all-ones vector.

    ``V`` is n-by-(n-1) with ``V.T @ 1 = 0`` and ``V.T @ V = I``.
    """

    n: int
    V: np.ndarray


@lru_cache(maxsize=None)
def _basis_matrix(n: int) -> np.ndarray:
    x = -1.0 / (n + sqrt(n))
    y = -1.0 / sqrt(n)
    V = np.full((n, n - 1), x)
    V[0, :] = y
    V[1:, :] += np.eye(n - 1)
    V.setflags(write=False)
    return V

def make_projection_basis(n: int) -> ProjectionBasis:
    """Centering-orthonormal basis for order ``n`` (requires ``n >= 2``).

    First row ``y * 1`` with ``y = -1/sqrt(n)``; the remaining
    ``(n-1) x (n-1)`` block is ``x * 1 1^T + I`` with ``x = -1/(n + sqrt(n))``.
    Instances are cached per order and immutable.
    """
    if n < 2:
        raise ValueError(f"no reduced space for n={n} (need n >= 2)")
    return ProjectionBasis(n=n, V=_basis_matrix(n))


def hat(X, basis_left: ProjectionBasis, basis_right: ProjectionBasis | None = None):
    """Reduced congruence ``V_l.T @ X @ V_r`` (defaults to a symmetric hat)."""
    if basis_right is None:
        basis_right = basis_left
    X = np.asarray(X, dtype=np.float64)
    if X.shape != (basis_left.n, basis_right.n):
        raise ValueError(
            f"shape mismatch: X is {X.shape}, bases are ({basis_left.n}, {basis_right.n})"
        )
    return basis_left.V.T @ X @ basis_right.V


def grand_sum(X) -> float:
    """Sum of all entries, ``1^T X 1``."""
    return float(np.sum(np.asarray(X, dtype=np.float64)))


def sym_eig_desc(S):
    """Eigendecomposition of a symmetric matrix, eigenvalues descending.

    The input must be symmetric to 1e-9 and is symmetrized by averaging
    before decomposition.  Returns ``(w, P)`` with ``S = P diag(w) P.T`` and
    ``w`` nonincreasing, eigenvectors in the matching columns of ``P``.
    """
    S = np.asarray(S, dtype=np.float64)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {S.shape}")
    if not np.all(np.isfinite(S)):
        raise ValueError("matrix has non-finite entries")
    if S.size and np.max(np.abs(S - S.T)) > 1e-9:
        raise ValueError("matrix is not symmetric to 1e-9")
    S = (S + S.T) / 2.0
    w, P = np.linalg.eigh(S)
    return np.ascontiguousarray(w[::-1]), np.ascontiguousarray(P[:, ::-1])


def nuclear_norm(X) -> float:
    """Sum of singular values."""
    X = np.asarray(X, dtype=np.float64)
    if not np.all(np.isfinite(X)):
        raise ValueError("matrix has non-finite entries")
    if X.size == 0:
        return 0.0
    return float(np.sum(np.linalg.svd(X, compute_uv=False)))


def project_to_stiefel(Q):
    """Nearest matrix with orthonormal columns, ``U V^T`` from the thin SVD.

    Requires at least as many rows as columns.  Rank-deficient input (any
    singular value below 1e-12) is rejected because the projection is then
    not unique.
    """
    Q = np.asarray(Q, dtype=np.float64)
    if Q.ndim != 2 or Q.shape[0] < Q.shape[1]:
        raise ValueError(f"expected m x n with m >= n, got {Q.shape}")
    if not np.all(np.isfinite(Q)):
        raise ValueError("matrix has non-finite entries")
    U, s, Vt = np.linalg.svd(Q, full_matrices=False)
    if s.size and s.min() < 1e-12:
        raise ValueError("rank-deficient input: projection onto the Stiefel set is not unique")
    return U @ Vt


def _polar(Q):
    # Internal orthogonal factor without the rank check; any completion of a
    # degenerate SVD is a valid (if non-unique) orthogonal projection.
    U, _, Vt = np.linalg.svd(np.asarray(Q, dtype=np.float64), full_matrices=False)
    return U @ Vt


def _cost_array(C):
    entries = C.entries if hasattr(C, "entries") else np.asarray(C, dtype=np.float64)
    entries = np.asarray(entries, dtype=np.float64)
    if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
        raise ValueError(f"expected a square cost matrix, got shape {entries.shape}")
    return entries


@dataclass(frozen=True)
class SpectralEmbedding:
    """Per-graph feature vector of length n+1.

    Coordinates: the n-1 descending reduced eigenvalues scaled by 1/n, then
    ``sqrt(2)/n * ||V^T C 1|| / sqrt(n)``, then ``(1^T C 1) / n^2``.  The
    squared Euclidean distance between two embeddings of equal order equals
    the closed-form lower bound on the pair.
    """

    n: int
    vector: np.ndarray


def spectral_embedding(C) -> SpectralEmbedding:
    """Embedding of a square symmetric cost matrix (order >= 2)."""
    E = _cost_array(C)
    n = E.shape[0]
    if n < 2:
        raise ValueError("spectral_embedding requires order >= 2")
    V = make_projection_basis(n).V
    Chat = V.T @ E @ V
    w, _ = sym_eig_desc(Chat)
    a = V.T @ E.sum(axis=1)
    vec = np.empty(n + 1)
    vec[: n - 1] = w / n
    vec[n - 1] = sqrt(2.0) / n * np.linalg.norm(a) / sqrt(n)
    vec[n] = E.sum() / n**2
    return SpectralEmbedding(n=n, vector=vec)
