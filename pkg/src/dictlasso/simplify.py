"""Reduction of the full penalized problem to its sparse-part form.

The full problem penalizes D @ theta. Splitting theta into a free part
alpha (the null-space directions of D) and a sparse part beta (the
row-space directions) and eliminating alpha by least squares yields an
equivalent problem in beta alone:

    min_beta 0.5 * ||X beta - y||^2 + lam * ||Z beta||_1

with Z = U Sigma from the compact SVD of D, A = Phi V_alpha, B = Phi V_beta,
X = P B and y = P c for the projector P = I - A (A'A)^-1 A'. The optimal
free part is recovered in closed form afterwards.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from .exceptions import SingularGram
from .linalg import GRAM_RTOL, compact_svd, orthonormal_complement
from .validation import check_matrix, check_no_zero_rows, check_vector


@dataclass(frozen=True)
class GroundTruth:
    """Planted signal behind a synthetic instance: c = phi @ theta_star + epsilon."""

    theta_star: np.ndarray
    epsilon: np.ndarray
    noise_sigma: float = 0.0


@dataclass(frozen=True)
class DictionaryProblem:
    """Instance of min 0.5 * ||phi theta - c||^2 + lam * ||d theta||_1."""

    phi: np.ndarray
    c: np.ndarray
    d: np.ndarray
    lam: float
    ground_truth: GroundTruth | None = None

    def __post_init__(self):
        phi = check_matrix(self.phi, "phi")
        n, p = phi.shape
        c = check_vector(self.c, "c", size=n)
        d = check_matrix(self.d, "d", cols=p)
        check_no_zero_rows(d, "d")
        if not self.lam >= 0.0:
            raise ValueError(f"lam must be nonnegative, got {self.lam!r}")
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "lam", float(self.lam))
        gt = self.ground_truth
        if gt is not None:
            theta_star = check_vector(gt.theta_star, "theta_star", size=p)
            epsilon = check_vector(gt.epsilon, "epsilon", size=n)
            residual = np.abs(phi @ theta_star + epsilon - c).max()
            if residual > 1e-10 * (1.0 + np.abs(c).max()):
                raise ValueError(
                    "ground truth violates c = phi @ theta_star + epsilon "
                    f"(max deviation {residual:.3e})"
                )
            object.__setattr__(
                self,
                "ground_truth",
                GroundTruth(theta_star, epsilon, float(gt.noise_sigma)),
            )

    @property
    def n(self):
        return self.phi.shape[0]

    @property
    def p(self):
        return self.phi.shape[1]

    @property
    def m(self):
        return self.d.shape[0]


@dataclass(frozen=True)
class SimplifiedForm:
    """Sparse-part problem data plus the pieces needed to undo the reduction.

    v_alpha / v_beta split theta-space into free and sparse directions
    ([v_alpha v_beta] is unitary); z and z_pinv satisfy z_pinv @ z = I_r.
    q_a / r_a hold the thin QR of a, sigma_a its singular values, and c the
    original right-hand side, so the free part can be recovered and theorem
    quantities computed without refactoring.
    """

    v_alpha: np.ndarray
    v_beta: np.ndarray
    z: np.ndarray
    z_pinv: np.ndarray
    a: np.ndarray
    b: np.ndarray
    x: np.ndarray
    y: np.ndarray
    rank_r: int
    q_a: np.ndarray
    r_a: np.ndarray
    sigma_a: np.ndarray
    c: np.ndarray

    @property
    def n(self):
        return self.x.shape[0]

    @property
    def p(self):
        return self.v_alpha.shape[0]

    @property
    def m(self):
        return self.z.shape[0]

    @property
    def free_dim(self):
        return self.v_alpha.shape[1]

    def free_part(self, theta):
        return self.v_alpha.T @ theta

    def sparse_part(self, theta):
        return self.v_beta.T @ theta

    def sigma_min_gram(self):
        """Smallest eigenvalue of A'A (= sigma_min(A)^2); +inf if A is empty."""
        if self.free_dim == 0:
            return np.inf
        return float(self.sigma_a[-1] ** 2)


def simplify(problem):
    """Reduce a DictionaryProblem to its sparse-part form.

    Requires an invertible free-part Gram matrix A'A (in particular
    n >= p - r); raises SingularGram otherwise. When D has full column
    rank (r = p) there is no free part and X = B, y = c.
    """
    phi, c, d = problem.phi, problem.c, problem.d
    n, p = phi.shape
    svd = compact_svd(d)
    r = svd.rank
    v_beta = svd.v
    v_alpha = orthonormal_complement(v_beta)
    z = svd.scaled_left()
    z_pinv = svd.scaled_left_pinv()
    a = phi @ v_alpha
    b = phi @ v_beta
    free = p - r
    if free == 0:
        q_a = np.empty((n, 0))
        r_a = np.empty((0, 0))
        sigma_a = np.empty(0)
        x = b.copy()
        y = c.copy()
    else:
        if n < free:
            raise SingularGram(
                f"free part has dimension {free} but only {n} observations"
            )
        sigma_a = np.linalg.svd(a, compute_uv=False)
        if sigma_a[-1] ** 2 <= GRAM_RTOL * sigma_a[0] ** 2:
            raise SingularGram("free-part gram matrix A'A is numerically singular")
        q_a, r_a = np.linalg.qr(a)
        x = b - q_a @ (q_a.T @ b)
        y = c - q_a @ (q_a.T @ c)
    return SimplifiedForm(
        v_alpha=v_alpha,
        v_beta=v_beta,
        z=z,
        z_pinv=z_pinv,
        a=a,
        b=b,
        x=x,
        y=y,
        rank_r=r,
        q_a=q_a,
        r_a=r_a,
        sigma_a=sigma_a,
        c=c.copy(),
    )


def recover_alpha(sf, beta_hat, c=None):
    """Optimal free part for a fixed sparse part: argmin_a ||A a + B beta - c||.

    Uses the cached QR of A; defaults to the right-hand side stored at
    simplification time. Returns an empty vector when there is no free part.
    """
    if sf.free_dim == 0:
        return np.empty(0)
    rhs = sf.c if c is None else check_vector(c, "c", size=sf.n)
    resid = rhs - sf.b @ beta_hat
    return solve_triangular(sf.r_a, sf.q_a.T @ resid)


def assemble_theta(sf, alpha_hat, beta_hat):
    """Rebuild theta from its free and sparse parts: V_alpha a + V_beta b."""
    theta = sf.v_beta @ beta_hat
    if sf.free_dim:
        theta = theta + sf.v_alpha @ alpha_hat
    return theta
