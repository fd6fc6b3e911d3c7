import numpy as np
import pytest

from projspec import (
    Config,
    ContourSpec,
    ContourThroughSpectrumError,
    MultiplicityRegimeError,
    SingularPointError,
    eig_normal,
    eigenvalue_derivative,
    first_order_projection_term,
    operator_norm,
    projection_expansion_check,
    riesz_projection,
    separation_contour,
    tangent_mu,
)

from conftest import random_hermitian, random_normal_matrix, rng_for
from projspec.generate import commuting_normal_tuple, random_unitary


class TestRieszProjection:
    def test_diagonal_rank_one(self):
        P = riesz_projection(np.diag([1.0, 2.0]), ContourSpec(center=1.0, radius=0.4))
        assert P.rank == 1
        assert np.allclose(P.matrix, np.diag([1.0, 0.0]), atol=1e-10)

    def test_hermitian_multiplicity_two(self):
        rng = rng_for(3)
        U = random_unitary(4, rng)
        A = U @ np.diag([2.0, 2.0, -1.0, 0.5]) @ U.conj().T
        A = (A + A.conj().T) / 2
        P = riesz_projection(A, ContourSpec(center=2.0, radius=0.7))
        assert P.rank == 2
        assert P.hermiticity_residual <= 1e-8  # orthogonal for a normal matrix

    def test_oblique_projector_of_non_normal_matrix(self):
        # closed form for the triangular matrix [[1, 1], [0, 2]]:
        # the spectral projector for eigenvalue 1 is (A - 2I)/(1 - 2)
        A = np.array([[1.0, 1.0], [0.0, 2.0]])
        expected = (A - 2 * np.eye(2)) / (1.0 - 2.0)
        P = riesz_projection(A, ContourSpec(center=1.0, radius=0.4))
        assert np.allclose(P.matrix, expected, atol=1e-9)
        assert P.idempotency_residual <= 1e-9
        assert P.hermiticity_residual > 0.5  # genuinely oblique

    def test_contour_through_spectrum_rejected(self):
        with pytest.raises(ContourThroughSpectrumError):
            riesz_projection(np.diag([1.0, 2.0]), ContourSpec(center=1.0, radius=1.0))

    @pytest.mark.parametrize("seed", range(8))
    def test_idempotent_integer_trace(self, seed):
        rng = rng_for(100 + seed)
        M, diag, _ = random_normal_matrix(5, rng)
        dec = eig_normal(M)
        target = dec.clusters[seed % len(dec.clusters)].value
        spec = separation_contour(dec.values, target)
        spec.validate_against(dec.values)
        P = riesz_projection(M, spec)
        assert P.idempotency_residual < 1e-8
        assert abs(P.trace - P.rank) < 1e-6
        assert P.rank == sum(1 for v in dec.values if abs(v - target) < spec.radius)

    def test_contour_spec_validation(self):
        with pytest.raises(ValueError):
            ContourSpec(center=0.0, radius=-1.0)
        with pytest.raises(ValueError):
            ContourSpec(center=0.0, radius=1.0, nodes=4)
        with pytest.raises(ContourThroughSpectrumError):
            ContourSpec(center=0.0, radius=1.0).validate_against([1.05])


class TestEigenvalueDerivative:
    def test_diagonal_pair(self):
        probe = eigenvalue_derivative(np.diag([1.0, 2.0]), np.diag([5.0, 7.0]), 1.0)
        assert probe.inner == pytest.approx(5.0)
        assert abs(probe.fd_derivative - 5.0) < 1e-6
        assert probe.p0_rank == 1

    def test_offdiagonal_perturbation_has_zero_derivative(self):
        # eigenvalues of diag(1,2) + eps[[0,1],[1,0]] are (3 -/+ sqrt(1 + 4 eps^2))/2:
        # the branch through 1 moves only at second order
        B = np.array([[0.0, 1.0], [1.0, 0.0]])
        probe = eigenvalue_derivative(np.diag([1.0, 2.0]), B, 1.0)
        assert abs(probe.inner) < 1e-12
        assert abs(probe.fd_derivative) < 1e-6

    def test_degenerate_regime_matches_compression_oracle(self):
        # for a double eigenvalue the branch slopes are the eigenvalues of
        # the compressed perturbation; the probe follows the largest
        rng = rng_for(7)
        U = random_unitary(3, rng)
        A = U @ np.diag([2.0, 2.0, -1.0]) @ U.conj().T
        A = (A + A.conj().T) / 2
        B = random_hermitian(3, rng)
        probe = eigenvalue_derivative(A, B, 2.0)
        dec = eig_normal(A)
        k = next(i for i, c in enumerate(dec.clusters) if abs(c.value - 2.0) < 1e-8)
        V = dec.eigenspace_basis(k)
        slopes = np.linalg.eigvalsh(V.conj().T @ B @ V)
        assert probe.multiplicity == 2
        assert abs(probe.inner - slopes.max()) < 1e-8
        assert abs(probe.fd_derivative - probe.inner) < 1e-6

    def test_multiplicity_regime_enforced(self):
        rng = rng_for(9)
        U = random_unitary(3, rng)
        A = U @ np.diag([2.0, 2.0, -1.0]) @ U.conj().T
        B = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        with pytest.raises(MultiplicityRegimeError):
            eigenvalue_derivative(A, B, 2.0)

    def test_rejects_non_eigenvalue(self):
        with pytest.raises(ValueError):
            eigenvalue_derivative(np.diag([1.0, 2.0]), np.eye(2), 7.0)

    @pytest.mark.parametrize("seed", range(5))
    def test_constructed_line_returns_mu(self, seed):
        # self-adjoint pair with the spectral line lam z + mu w + 1 = 0
        mats, joint = commuting_normal_tuple(4, 2, seed=400 + seed, real_spectrum=True)
        A, B = mats
        k = seed % 4
        lam, mu = joint[0, k], joint[1, k]
        probe = eigenvalue_derivative(A, B, lam)
        assert abs(probe.inner - mu) < 1e-6
        assert abs(probe.fd_derivative - mu) < 1e-6


class TestTangentMu:
    def test_commuting_diagonal_pair(self):
        mu = tangent_mu(np.diag([1.0, 2.0]), np.diag([3.0, 7.0]), 1.0)
        assert abs(mu - 3.0) < 1e-8

    def test_counterexample_factor_slope(self, counterexample):
        # the curve through (-1, 0) is the line 1 + z + 3w = 0
        A, B = counterexample
        assert abs(tangent_mu(A, B, 1.0) - 3.0) < 1e-8

    @pytest.mark.parametrize("seed", range(5))
    def test_matches_inner_product_for_arbitrary_b(self, seed):
        rng = rng_for(500 + seed)
        A, _, _ = random_normal_matrix(4, rng)
        B = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        dec = eig_normal(A)
        lam = dec.clusters[0].value
        v = dec.eigenspace_basis(0)[:, 0]
        mu = tangent_mu(A, B, lam)
        assert abs(mu - np.vdot(v, B @ v)) < 1e-6 * (1 + abs(mu))

    def test_multiple_eigenvalue_rejected(self):
        A = np.diag([2.0, 2.0, 1.0])
        with pytest.raises(MultiplicityRegimeError):
            tangent_mu(A, np.eye(3), 2.0)

    def test_zero_eigenvalue_rejected(self):
        A = np.diag([0.0, 1.0])
        with pytest.raises(ValueError):
            tangent_mu(A, np.eye(2), 0.0)


class TestProjectionExpansion:
    def test_zero_perturbation(self):
        spec = ContourSpec(center=1.0, radius=0.4)
        chk = projection_expansion_check(np.diag([1.0, 2.0]), np.zeros((2, 2)), spec, 1e-3)
        assert chk.residual < 1e-12

    def test_quadratic_scaling_2x2(self):
        A = np.diag([1.0, 2.0])
        B = np.array([[0.0, 1.0], [1.0, 0.0]])
        spec = ContourSpec(center=1.0, radius=0.5)
        r1 = projection_expansion_check(A, B, spec, 1e-3).residual
        r2 = projection_expansion_check(A, B, spec, 5e-4).residual
        assert 3.0 <= r1 / r2 <= 5.0

    @pytest.mark.parametrize("seed", range(4))
    def test_quadratic_scaling_random_hermitian(self, seed):
        rng = rng_for(600 + seed)
        U = random_unitary(4, rng)
        A = U @ np.diag([0.0, 1.0, 2.5, 4.0]) @ U.conj().T
        A = (A + A.conj().T) / 2
        B = random_hermitian(4, rng)
        spec = separation_contour(np.array([0.0, 1.0, 2.5, 4.0]), 1.0)
        for eps in (1e-2, 1e-3):
            r1 = projection_expansion_check(A, B, spec, eps).residual
            r2 = projection_expansion_check(A, B, spec, eps / 2).residual
            assert 3.0 <= r1 / r2 <= 5.0

    def test_eigen_equation_residual_small(self):
        rng = rng_for(11)
        U = random_unitary(3, rng)
        A = U @ np.diag([1.0, 2.0, 4.0]) @ U.conj().T
        A = (A + A.conj().T) / 2
        B = random_hermitian(3, rng)
        spec = separation_contour(np.array([1.0, 2.0, 4.0]), 2.0)
        chk = projection_expansion_check(A, B, spec, 1e-3)
        assert chk.rank_eps == 1
        assert chk.eigen_residual < 1e-8

    def test_first_order_correction_is_orthogonal_to_v(self):
        # the first-order change T v of an eigenvector has no component
        # along v itself
        rng = rng_for(13)
        mats, _ = commuting_normal_tuple(4, 2, seed=700, real_spectrum=True)
        A, _ = mats
        B = random_hermitian(4, rng)
        dec = eig_normal(A)
        lam = dec.clusters[0].value
        v = dec.eigenspace_basis(0)[:, 0]
        spec = separation_contour(dec.values, lam)
        T = first_order_projection_term(A, B, spec)
        assert abs(np.vdot(v, T @ v)) < 1e-7


class TestRegularityGuard:
    def test_singular_base_point_refused(self):
        # equal diagonals square the factor, so every point of the line is
        # singular; the simple-eigenvalue precondition already rejects it
        A = np.diag([2.0, 2.0])
        B = np.diag([5.0, 5.0])
        with pytest.raises(MultiplicityRegimeError):
            tangent_mu(A, B, 2.0)

    def test_vanishing_z_partial_refused(self):
        # direct guard check on a crafted polynomial with d/dz = 0 at the
        # base point of interest
        from projspec import MultiPoly, classify_point, SINGULAR

        base = MultiPoly(2, {(0, 0): 1.0, (1, 0): 1.0, (0, 1): 3.0})
        sq = {}
        for e1, c1 in base.terms.items():
            for e2, c2 in base.terms.items():
                key = (e1[0] + e2[0], e1[1] + e2[1])
                sq[key] = sq.get(key, 0.0) + c1 * c2
        p = MultiPoly(2, sq)
        assert classify_point(p, [-1.0, 0.0]) == SINGULAR
        assert abs(p.partial(0).evaluate(np.array([-1.0, 0.0]))) < 1e-12
