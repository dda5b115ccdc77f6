"""Tolerance-aware dense linear algebra kernel.

All subspace decisions in the library (rank, kernel, span membership, right
inverses, Schur stability) are funneled through this module so that a single
tolerance policy governs every verdict.  The SVD is the only primitive behind
rank/kernel/span computations; thresholds are relative (anchored at the largest
singular value or the vector norm) so globally rescaled data yields identical
decisions.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import NonSquareError, RankDeficientError

__all__ = [
    "ToleranceConfig",
    "Stability",
    "numerical_rank",
    "kernel_basis",
    "orth_basis",
    "in_span",
    "right_inverse",
    "eigenvalues",
    "is_schur_stable",
]


@dataclass(frozen=True)
class ToleranceConfig:
    """Numerical thresholds for all subspace and stability decisions.

    Attributes:
        rank_rtol: relative threshold on singular values; sigma_i counts
            towards the rank if sigma_i > rank_rtol * sigma_max * max(rows, cols).
        membership_rtol: relative residual threshold for span membership.
        stability_margin: dead zone around the unit circle (or imaginary axis)
            inside which a spectral radius is reported as Boundary.
        match_atol: absolute tolerance for matching eigenvalues and
            logarithm branches.
    """

    rank_rtol: float = 1e-10
    membership_rtol: float = 1e-8
    stability_margin: float = 1e-9
    match_atol: float = 1e-7

    def __post_init__(self):
        for name in ("rank_rtol", "membership_rtol", "stability_margin", "match_atol"):
            value = getattr(self, name)
            if not 0.0 < value < 1.0:
                raise ValueError(f"{name} must lie strictly between 0 and 1, got {value}")


DEFAULT_TOL = ToleranceConfig()


class Stability(enum.Enum):
    STABLE = "Stable"
    UNSTABLE = "Unstable"
    BOUNDARY = "Boundary"


def _as_matrix(M) -> np.ndarray:
    M = np.asarray(M, dtype=float)
    if M.ndim == 1:
        M = M.reshape(1, -1)
    if M.ndim != 2:
        raise ValueError(f"expected a 2-D array, got shape {M.shape}")
    return M


def numerical_rank(M, tol: ToleranceConfig = DEFAULT_TOL, floor: float = 0.0) -> int:
    """Number of singular values above the relative rank threshold.

    `floor` raises the reference scale: singular values are compared against
    rank_rtol * max(sigma_max, floor) * max(rows, cols).  Interior computations
    pass the scale of the surrounding data ensemble so that sub-matrices made
    of elimination residue (tiny relative to the data, full rank relative to
    themselves) count as zero.
    """
    M = _as_matrix(M)
    if M.size == 0:
        return 0
    s = np.linalg.svd(M, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > tol.rank_rtol * max(s[0], floor) * max(M.shape)))


def kernel_basis(M, tol: ToleranceConfig = DEFAULT_TOL, floor: float = 0.0) -> np.ndarray:
    """Orthonormal basis of the numerical kernel, one column per dimension.

    The zero-dimensional kernel is returned as a (cols, 0) matrix; `floor`
    as in numerical_rank.
    """
    M = _as_matrix(M)
    n = M.shape[1]
    if M.shape[0] == 0 or n == 0:
        return np.eye(n)
    _, s, vh = np.linalg.svd(M)
    if s.size == 0 or s[0] == 0.0:
        rank = 0
    else:
        rank = int(np.sum(s > tol.rank_rtol * max(s[0], floor) * max(M.shape)))
    return vh[rank:].T.copy()


def orth_basis(M, tol: ToleranceConfig = DEFAULT_TOL, floor: float = 0.0) -> np.ndarray:
    """Orthonormal basis of the numerical column space (rank-truncated SVD)."""
    M = _as_matrix(M)
    if M.size == 0:
        return np.zeros((M.shape[0], 0))
    u, s, _ = np.linalg.svd(M, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros((M.shape[0], 0))
    rank = int(np.sum(s > tol.rank_rtol * max(s[0], floor) * max(M.shape)))
    return u[:, :rank].copy()


def in_span(v, G, tol: ToleranceConfig = DEFAULT_TOL, scale: float | None = None) -> bool:
    """Whether v lies in the column space of G up to the membership tolerance.

    The residual of the orthogonal projection onto the (rank-truncated) column
    space is compared to membership_rtol * max(||v||, 1).  When `scale` is
    given it replaces the absolute floor 1, anchoring both the rank truncation
    of G and the residual threshold at the surrounding data scale; membership
    decisions then commute with a global rescaling of v, G and scale.
    """
    v = np.asarray(v, dtype=float).reshape(-1)
    G = _as_matrix(G)
    if v.shape[0] != G.shape[0]:
        raise ValueError(f"length of v ({v.shape[0]}) != rows of G ({G.shape[0]})")
    anchor = 1.0 if scale is None else scale
    basis = orth_basis(G, tol, floor=0.0 if scale is None else scale)
    residual = v - basis @ (basis.T @ v)
    return float(np.linalg.norm(residual)) <= tol.membership_rtol * max(
        np.linalg.norm(v), anchor
    )


def right_inverse(M, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Minimum-norm right inverse of a full-row-rank matrix.

    Raises:
        RankDeficientError: if the numerical rank of M is below its row count.
    """
    M = _as_matrix(M)
    k, n = M.shape
    if k == 0:
        return np.zeros((n, 0))
    if numerical_rank(M, tol) < k:
        raise RankDeficientError(f"matrix of shape {M.shape} does not have full row rank")
    u, s, vh = np.linalg.svd(M, full_matrices=False)
    return (vh.T / s) @ u.T


def eigenvalues(M) -> np.ndarray:
    """Eigenvalues of a square matrix, sorted by (real, imag) for determinism."""
    M = _as_matrix(M)
    if M.shape[0] != M.shape[1]:
        raise NonSquareError(f"eigenvalues of a {M.shape[0]}x{M.shape[1]} matrix")
    if M.shape[0] == 0:
        return np.zeros(0, dtype=complex)
    w = np.linalg.eigvals(M)
    order = np.lexsort((w.imag, w.real))
    return w[order]


def is_schur_stable(M, tol: ToleranceConfig = DEFAULT_TOL) -> Stability:
    """Three-valued Schur stability of a square matrix.

    The 0x0 matrix is Stable (empty spectrum).  A spectral radius within
    stability_margin of 1 is reported as Boundary because the strict inequality
    is undecidable at machine precision.
    """
    M = _as_matrix(M)
    if M.shape[0] != M.shape[1]:
        raise NonSquareError(f"stability of a {M.shape[0]}x{M.shape[1]} matrix")
    if M.shape[0] == 0:
        return Stability.STABLE
    rho = float(np.max(np.abs(np.linalg.eigvals(M))))
    if rho < 1.0 - tol.stability_margin:
        return Stability.STABLE
    if rho > 1.0 + tol.stability_margin:
        return Stability.UNSTABLE
    return Stability.BOUNDARY
