"""Dense linear-algebra kernels used by every other module.

Compact SVD, orthonormal completion, condition numbers and least squares,
with explicit numerical-rank handling. Factorizations are delegated to
LAPACK via numpy; the contracts here are the invariants the rest of the
package relies on (reconstruction, Z+Z = I, unitarity of completions).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import AllZeroMatrix, NotOrthonormal, SingularGram
from .validation import check_matrix, check_vector

# Gram-singularity threshold: sigma_min(A)^2 <= GRAM_RTOL * sigma_max(A)^2.
GRAM_RTOL = 1e-12


def default_rank_tol(shape):
    """Relative rank cutoff: max(rows, cols) * machine epsilon."""
    return max(shape) * np.finfo(float).eps


@dataclass(frozen=True)
class CompactSvd:
    """Rank-truncated SVD m = u @ diag(sigma) @ v.T.

    u is (rows x r) and v is (cols x r), both with orthonormal columns;
    sigma holds the r singular values above the rank cutoff, nonincreasing.
    """

    u: np.ndarray
    sigma: np.ndarray
    v: np.ndarray
    rank: int

    def reconstruct(self):
        return (self.u * self.sigma) @ self.v.T

    def scaled_left(self):
        """Z = u @ diag(sigma), the row-space factor of the input."""
        return self.u * self.sigma

    def scaled_left_pinv(self):
        """Z+ = diag(sigma)^-1 @ u.T; satisfies Z+ @ Z = I_r."""
        return (self.u / self.sigma).T


def compact_svd(m, rank_tol=None):
    """Compact SVD with singular values <= rank_tol * sigma_max dropped.

    Raises AllZeroMatrix when no singular value survives the cutoff.
    """
    a = check_matrix(m, "matrix")
    if rank_tol is None:
        rank_tol = default_rank_tol(a.shape)
    u, s, vt = np.linalg.svd(a, full_matrices=False)
    if s.size == 0 or s[0] <= 0.0:
        raise AllZeroMatrix("matrix has no nonzero singular value")
    r = int(np.count_nonzero(s > rank_tol * s[0]))
    if r == 0:
        raise AllZeroMatrix("all singular values fall below the rank tolerance")
    return CompactSvd(u=u[:, :r].copy(), sigma=s[:r].copy(), v=vt[:r].T.copy(), rank=r)


def orthonormal_complement(v_beta, tol=1e-8):
    """Columns spanning the orthogonal complement of span(v_beta).

    v_beta must be p x r with orthonormal columns (checked to ``tol``); the
    result is p x (p - r) and the concatenation [result, v_beta] is unitary.
    Uses a Householder full QR of v_beta, so the output is deterministic and
    orthogonal to machine precision. Returns a p x 0 array when r = p.
    """
    v = check_matrix(v_beta, "v_beta", allow_empty=True)
    p, r = v.shape
    if r > p:
        raise ValueError(f"v_beta has more columns ({r}) than rows ({p})")
    if r:
        gram = v.T @ v
        if np.abs(gram - np.eye(r)).max() > tol:
            raise NotOrthonormal("v_beta columns are not orthonormal")
    if r == p:
        return np.empty((p, 0))
    if r == 0:
        return np.eye(p)
    q = np.linalg.qr(v, mode="complete")[0]
    comp = q[:, r:].copy()
    # First r columns of q span range(v_beta), so comp.T @ v_beta = 0.
    return comp


def singular_values(m):
    return np.linalg.svd(check_matrix(m, "matrix"), compute_uv=False)


def condition_number(m, rank_tol=None):
    """sigma_max / sigma_min over the *nonzero* singular values.

    Values <= rank_tol * sigma_max count as zero; raises AllZeroMatrix for
    an (effectively) zero matrix.
    """
    a = check_matrix(m, "matrix")
    if rank_tol is None:
        rank_tol = default_rank_tol(a.shape)
    s = np.linalg.svd(a, compute_uv=False)
    if s.size == 0 or s[0] <= 0.0:
        raise AllZeroMatrix("matrix has no nonzero singular value")
    nonzero = s[s > rank_tol * s[0]]
    if nonzero.size == 0:
        raise AllZeroMatrix("all singular values fall below the rank tolerance")
    return float(nonzero[0] / nonzero[-1])


def least_squares(a, b):
    """Solve min_x ||a x - b|| for a full-column-rank a.

    Requires n >= k and sigma_min(a)^2 > GRAM_RTOL * sigma_max(a)^2, i.e. an
    invertible Gram matrix; raises SingularGram otherwise. The k = 0 case
    returns an empty solution.
    """
    a = check_matrix(a, "a", allow_empty=True)
    n, k = a.shape
    b = check_vector(b, "b", size=n)
    if k == 0:
        return np.empty(0)
    if n < k:
        raise SingularGram(f"system is underdetermined: {n} rows < {k} columns")
    s = np.linalg.svd(a, compute_uv=False)
    if s[-1] ** 2 <= GRAM_RTOL * s[0] ** 2:
        raise SingularGram("gram matrix A'A is numerically singular")
    x, *_ = np.linalg.lstsq(a, b, rcond=None)
    return x
