import numpy as np
import pytest

from dictlasso.exceptions import SingularGram
from dictlasso.linalg import least_squares
from dictlasso.simplify import (
    DictionaryProblem,
    GroundTruth,
    SimplifiedForm,
    assemble_theta,
    recover_alpha,
    simplify,
)


def make_problem(n=8, p=5, rank=3, m=6, seed=0, lam=0.1, noise=0.0):
    rng = np.random.default_rng(seed)
    d = rng.standard_normal((m, rank)) @ rng.standard_normal((rank, p))
    phi = rng.standard_normal((n, p))
    theta_star = rng.standard_normal(p)
    epsilon = noise * rng.standard_normal(n)
    c = phi @ theta_star + epsilon
    gt = GroundTruth(theta_star=theta_star, epsilon=epsilon, noise_sigma=noise)
    return DictionaryProblem(phi=phi, c=c, d=d, lam=lam, ground_truth=gt)


class TestDictionaryProblem:
    def test_rejects_zero_rows_in_d(self):
        d = np.array([[1.0, 0.0], [0.0, 0.0]])
        with pytest.raises(ValueError):
            DictionaryProblem(phi=np.eye(2), c=np.zeros(2), d=d, lam=0.0)

    def test_rejects_negative_lam(self):
        with pytest.raises(ValueError):
            DictionaryProblem(phi=np.eye(2), c=np.zeros(2), d=np.eye(2), lam=-1.0)

    def test_rejects_inconsistent_ground_truth(self):
        gt = GroundTruth(theta_star=np.ones(2), epsilon=np.zeros(2))
        with pytest.raises(ValueError):
            DictionaryProblem(
                phi=np.eye(2), c=np.zeros(2), d=np.eye(2), lam=0.0, ground_truth=gt
            )

    def test_dimensions(self):
        prob = make_problem()
        assert (prob.n, prob.p, prob.m) == (8, 5, 6)


class TestSimplify:
    def test_identity_dictionary_full_rank(self):
        rng = np.random.default_rng(1)
        phi = rng.standard_normal((6, 4))
        c = rng.standard_normal(6)
        prob = DictionaryProblem(phi=phi, c=c, d=np.eye(4), lam=0.5)
        sf = simplify(prob)
        assert sf.rank_r == 4
        assert sf.v_alpha.shape == (4, 0)
        np.testing.assert_allclose(sf.v_beta.T @ sf.v_beta, np.eye(4), atol=1e-12)
        np.testing.assert_allclose(sf.x, phi @ sf.v_beta, atol=1e-12)
        np.testing.assert_allclose(sf.y, c)

    def test_split_is_unitary(self):
        sf = simplify(make_problem())
        v = np.hstack([sf.v_alpha, sf.v_beta])
        np.testing.assert_allclose(v.T @ v, np.eye(5), atol=1e-10)

    def test_z_pinv_left_inverse(self):
        sf = simplify(make_problem())
        np.testing.assert_allclose(sf.z_pinv @ sf.z, np.eye(sf.rank_r), atol=1e-10)

    def test_projector_idempotent(self):
        sf = simplify(make_problem())
        a = sf.a
        proj = np.eye(sf.n) - a @ np.linalg.solve(a.T @ a, a.T)
        assert np.linalg.norm(proj @ proj - proj) <= 1e-10
        np.testing.assert_allclose(sf.x, proj @ sf.b, atol=1e-10)
        np.testing.assert_allclose(sf.y, proj @ sf.c, atol=1e-10)

    @pytest.mark.parametrize("seed", range(5))
    def test_objective_equivalence(self, seed):
        # min over the free part of the full quadratic equals the reduced
        # quadratic, for arbitrary sparse parts.
        prob = make_problem(seed=seed)
        sf = simplify(prob)
        rng = np.random.default_rng(100 + seed)
        for _ in range(10):
            beta = rng.standard_normal(sf.rank_r)
            alpha = least_squares(sf.a, prob.c - sf.b @ beta)
            full = 0.5 * np.linalg.norm(sf.a @ alpha + sf.b @ beta - prob.c) ** 2
            reduced = 0.5 * np.linalg.norm(sf.x @ beta - sf.y) ** 2
            assert abs(full - reduced) <= 1e-10 * (1.0 + full)

    def test_ground_truth_residual_is_projected_noise(self):
        prob = make_problem(noise=0.3, seed=4)
        sf = simplify(prob)
        beta_star = sf.sparse_part(prob.ground_truth.theta_star)
        resid = sf.x @ beta_star - sf.y
        assert np.linalg.norm(resid) <= np.linalg.norm(prob.ground_truth.epsilon) + 1e-12

    def test_underdetermined_free_part_raises(self):
        # p - r = 4 free directions but only n = 2 rows.
        rng = np.random.default_rng(5)
        d = rng.standard_normal((1, 5))
        phi = rng.standard_normal((2, 5))
        prob = DictionaryProblem(phi=phi, c=np.zeros(2), d=d, lam=0.0)
        with pytest.raises(SingularGram):
            simplify(prob)

    def test_degenerate_phi_raises(self):
        # phi kills the free directions, so A'A is singular.
        d = np.array([[1.0, 0.0]])
        phi = np.array([[1.0, 0.0], [2.0, 0.0], [3.0, 0.0]])
        prob = DictionaryProblem(phi=phi, c=np.zeros(3), d=d, lam=0.0)
        with pytest.raises(SingularGram):
            simplify(prob)

    def test_sigma_min_gram(self):
        sf = simplify(make_problem())
        expected = np.linalg.eigvalsh(sf.a.T @ sf.a).min()
        assert sf.sigma_min_gram() == pytest.approx(expected, rel=1e-8)


class TestRecoverAlpha:
    def test_exact_fit(self):
        rng = np.random.default_rng(6)
        d = rng.standard_normal((2, 4))  # rank 2, free dim 2
        phi = rng.standard_normal((7, 4))
        alpha0 = rng.standard_normal(2)
        sf_probe = simplify(
            DictionaryProblem(phi=phi, c=np.zeros(7), d=d, lam=0.0)
        )
        c = sf_probe.a @ alpha0
        sf = simplify(DictionaryProblem(phi=phi, c=c, d=d, lam=0.0))
        alpha_hat = recover_alpha(sf, np.zeros(sf.rank_r))
        np.testing.assert_allclose(alpha_hat, alpha0, atol=1e-10)

    def test_full_rank_returns_empty(self):
        prob = make_problem(rank=5, m=6)
        sf = simplify(prob)
        assert sf.free_dim == 0
        assert recover_alpha(sf, np.zeros(sf.rank_r)).shape == (0,)

    @pytest.mark.parametrize("seed", range(5))
    def test_matches_least_squares_oracle(self, seed):
        prob = make_problem(seed=seed)
        sf = simplify(prob)
        rng = np.random.default_rng(200 + seed)
        beta = rng.standard_normal(sf.rank_r)
        alpha = recover_alpha(sf, beta, prob.c)
        oracle = least_squares(sf.a, prob.c - sf.b @ beta)
        np.testing.assert_allclose(alpha, oracle, atol=1e-10)
        # Normal-equations optimality.
        grad = sf.a.T @ (sf.a @ alpha + sf.b @ beta - prob.c)
        np.testing.assert_allclose(grad, 0.0, atol=1e-9)

    def test_default_rhs_is_cached_c(self):
        prob = make_problem(seed=11)
        sf = simplify(prob)
        beta = np.ones(sf.rank_r)
        np.testing.assert_array_equal(
            recover_alpha(sf, beta), recover_alpha(sf, beta, prob.c)
        )


class TestAssembleTheta:
    def test_zero_parts(self):
        sf = simplify(make_problem())
        theta = assemble_theta(sf, np.zeros(sf.free_dim), np.zeros(sf.rank_r))
        np.testing.assert_array_equal(theta, np.zeros(5))

    def test_round_trip(self):
        sf = simplify(make_problem(seed=3))
        rng = np.random.default_rng(7)
        for _ in range(20):
            theta = rng.standard_normal(5)
            rebuilt = assemble_theta(sf, sf.free_part(theta), sf.sparse_part(theta))
            np.testing.assert_allclose(rebuilt, theta, atol=1e-12)

    def test_full_rank_case(self):
        prob = make_problem(rank=5, m=6, seed=9)
        sf = simplify(prob)
        theta = np.arange(5.0)
        rebuilt = assemble_theta(sf, np.empty(0), sf.sparse_part(theta))
        np.testing.assert_allclose(rebuilt, theta, atol=1e-12)
