import numpy as np
import pytest

from projspec import (
    ArityMismatchError,
    ChangeOfBasis,
    MultiPoly,
    OFF_VARIETY,
    OperatorTuple,
    REGULAR,
    SINGULAR,
    SingularTransformError,
    ZeroNormalError,
    charpoly,
    classify_point,
    eig_normal,
    factor_linear,
    hyperplane_membership,
    membership,
    sample_curve,
    smallest_singular_value,
    transform_tuple,
)
from projspec.spectra import CURVE_CSV_HEADER

from conftest import random_normal_matrix, rng_for
from projspec.generate import commuting_normal_tuple


class TestMembership:
    def test_origin_is_never_in_the_spectrum(self, counterexample):
        pt = membership(counterexample, [0.0, 0.0])
        assert pt.witness == pytest.approx(1.0)
        assert not pt.member

    def test_point_on_factor_line(self, counterexample):
        pt = membership(counterexample, [-1.0, 0.0])
        assert pt.member
        assert pt.witness <= 1e-10

    @pytest.mark.parametrize("seed", range(4))
    def test_reciprocal_eigenvalue_axis_points(self, seed):
        # (-1/lambda, 0, ..., 0) lies in the spectrum for eigenvalues of A_1
        rng = rng_for(seed)
        M, diag, _ = random_normal_matrix(4, rng)
        tup = OperatorTuple([M, np.eye(4)])
        lam = diag[0]
        pt = membership(tup, [-1.0 / lam, 0.0])
        assert pt.member

    def test_arity_checked(self, counterexample):
        with pytest.raises(ArityMismatchError):
            membership(counterexample, [1.0])

    @pytest.mark.parametrize("seed", range(4))
    def test_sigma_min_and_determinant_agree(self, seed):
        # sigma = sigma_p in finite dimension: both witnesses classify alike
        rng = rng_for(500 + seed)
        mats, joint = commuting_normal_tuple(4, 2, seed=510 + seed)
        tup = OperatorTuple(mats)
        for _ in range(50):
            z = rng.standard_normal(2) + 1j * rng.standard_normal(2)
            w = smallest_singular_value(tup.pencil(z))
            d = abs(np.linalg.det(tup.pencil(z)))
            assert (w <= 1e-7) == (d <= 1e-7 * max(1.0, d + w))
        # and a point genuinely on the variety
        a = joint[:, 0]
        z_on = -np.conj(a) / np.vdot(a, a).real
        assert smallest_singular_value(tup.pencil(z_on)) <= 1e-7
        assert abs(np.linalg.det(tup.pencil(z_on))) <= 1e-7


class TestHyperplaneMembership:
    def test_counterexample_factor_plane(self, counterexample):
        rep = hyperplane_membership(counterexample, [1.0, 3.0])
        assert rep.contained
        assert rep.max_poly_residual <= 1e-10

    def test_plane_without_matching_eigenvalue(self):
        # a = (1, 0): needs eigenvalue 1 in the first matrix, absent here
        tup = OperatorTuple([np.diag([2.0, 3.0]), np.diag([5.0, 7.0])])
        rep = hyperplane_membership(tup, [1.0, 0.0])
        assert not rep.contained
        assert rep.max_witness > 1e-3

    def test_recovered_factors_are_contained(self):
        mats, _ = commuting_normal_tuple(4, 3, seed=21)
        p = charpoly(mats)
        f = factor_linear(p)
        assert f.reducible
        for fac in f.factors:
            rep = hyperplane_membership(mats, fac.coeffs, poly=p)
            assert rep.contained

    def test_zero_normal_rejected(self, counterexample):
        with pytest.raises(ZeroNormalError):
            hyperplane_membership(counterexample, [0.0, 0.0])

    def test_deterministic_given_seed(self, counterexample):
        r1 = hyperplane_membership(counterexample, [1.0, 3.0], seed=3)
        r2 = hyperplane_membership(counterexample, [1.0, 3.0], seed=3)
        assert r1.max_witness == r2.max_witness


class TestSampleCurve:
    def test_counterexample_at_zero(self, counterexample):
        A, B = counterexample
        sample = sample_curve(A, B, [0.0])
        zs = sorted(r.z.real for r in sample.rows)
        assert np.allclose(zs, [-1.0, -0.5], atol=1e-8)

    def test_zero_second_matrix_gives_vertical_lines(self):
        A = np.diag([1.0, 2.0])
        sample = sample_curve(A, np.zeros((2, 2)), np.linspace(-1, 1, 5))
        for w in np.linspace(-1, 1, 5):
            zs = sorted(r.z.real for r in sample.rows if abs(r.w - w) < 1e-12)
            assert np.allclose(zs, [-1.0, -0.5], atol=1e-8)

    def test_samples_lie_on_the_factor_lines(self):
        mats, joint = commuting_normal_tuple(3, 2, seed=33)
        A, B = mats
        sample = sample_curve(A, B, np.linspace(-0.8, 0.8, 7))
        for row in sample.rows:
            # each sampled point zeroes one of the joint-eigenvalue lines
            best = min(
                abs(1.0 + joint[0, k] * row.z + joint[1, k] * row.w)
                for k in range(3)
            )
            assert best <= 1e-8

    def test_residuals_are_small(self, counterexample):
        A, B = counterexample
        sample = sample_curve(A, B, np.linspace(-1, 1, 9))
        assert all(r.residual <= 1e-10 for r in sample.rows)

    def test_crossing_flagged_as_multiple(self, counterexample):
        # the two factor lines of the counterexample cross at w = -1, z = 2
        A, B = counterexample
        sample = sample_curve(A, B, [-1.0])
        assert any(r.multiple for r in sample.rows)

    def test_csv_header_and_shape(self, counterexample):
        A, B = counterexample
        text = sample_curve(A, B, [0.0, 0.5]).to_csv()
        lines = text.strip().splitlines()
        assert lines[0] == CURVE_CSV_HEADER
        assert all(len(line.split(",")) == 6 for line in lines[1:])

    def test_hermitian_pair_conjugation_symmetry(self):
        # real-w rows of a self-adjoint pair come in conjugate pairs
        mats, _ = commuting_normal_tuple(3, 2, seed=44, real_spectrum=True)
        A, B = mats
        sample = sample_curve(A, B, np.linspace(-0.5, 0.5, 5))
        for row in sample.rows:
            mirror = min(
                abs(np.conj(row.z) - other.z)
                for other in sample.rows
                if abs(other.w - row.w) < 1e-12
            )
            assert mirror <= 1e-8


class TestClassifyPoint:
    def test_regular_point_on_simple_line(self, counterexample):
        p = charpoly(counterexample)
        assert classify_point(p, [-1.0, 0.0]) == REGULAR

    def test_squared_factor_is_singular_on_its_line(self):
        # (1 + z + 3w)^2 has vanishing gradient along its zero line
        base = MultiPoly(2, {(0, 0): 1.0, (1, 0): 1.0, (0, 1): 3.0})
        sq = {}
        for e1, c1 in base.terms.items():
            for e2, c2 in base.terms.items():
                key = (e1[0] + e2[0], e1[1] + e2[1])
                sq[key] = sq.get(key, 0.0) + c1 * c2
        p = MultiPoly(2, sq)
        assert classify_point(p, [-1.0, 0.0]) == SINGULAR

    def test_off_variety_at_origin(self, counterexample):
        assert classify_point(charpoly(counterexample), [0.0, 0.0]) == OFF_VARIETY

    def test_line_crossing_is_singular(self, counterexample):
        # the node where the two factor lines meet: gradient vanishes
        p = charpoly(counterexample)
        assert classify_point(p, [2.0, -1.0]) == SINGULAR

    def test_constant_rejected(self):
        with pytest.raises(ValueError):
            classify_point(MultiPoly(1, {(0,): 1.0}), [0.0])


class TestTransformTuple:
    def test_identity(self, counterexample):
        out = transform_tuple(counterexample, np.eye(2))
        assert np.allclose(out[0], counterexample[0])
        assert np.allclose(out[1], counterexample[1])

    def test_adjoint_pair_rotation(self):
        # (A, A*) -> (A + A*, i(A - A*)) via C = [[1, 1], [i, -i]];
        # pencils at corresponding points are identical matrices
        rng = rng_for(8)
        A = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        tup = OperatorTuple([A, A.conj().T])
        C = np.array([[1.0, 1.0], [1j, -1j]])
        rotated = transform_tuple(tup, C)
        assert np.allclose(rotated[0], A + A.conj().T)
        assert np.allclose(rotated[1], 1j * (A - A.conj().T))
        for _ in range(10):
            z = rng.standard_normal(2) + 1j * rng.standard_normal(2)
            w = z @ C
            assert np.allclose(rotated.pencil(z), tup.pencil(w), atol=1e-12)

    @pytest.mark.parametrize("seed", range(4))
    def test_membership_correspondence(self, seed):
        # z in sigma(transformed) iff zC in sigma(original), equal witnesses
        rng = rng_for(600 + seed)
        mats, _ = commuting_normal_tuple(3, 2, seed=610 + seed)
        tup = OperatorTuple(mats)
        C = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        rotated = transform_tuple(tup, C)
        for _ in range(10):
            z = rng.standard_normal(2) + 1j * rng.standard_normal(2)
            w1 = membership(rotated, z).witness
            w2 = membership(tup, z @ C).witness
            assert abs(w1 - w2) <= 1e-10 * (1.0 + w1)

    def test_singular_transform_rejected(self, counterexample):
        with pytest.raises(SingularTransformError):
            transform_tuple(counterexample, np.array([[1.0, 2.0], [2.0, 4.0]]))

    def test_change_of_basis_validates_inverse(self):
        cb = ChangeOfBasis.from_matrix(np.array([[2.0, 0.0], [0.0, 0.5]]))
        assert np.allclose(cb.matrix @ cb.inverse, np.eye(2))
