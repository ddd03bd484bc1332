import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rrdps import security_bounds
from rrdps.errors import ResourceLimitError
from rrdps.spectral_oracle import (
    SymMatrix,
    build_joint_operators,
    build_lambda_minus,
    build_lambda_plus,
    build_m1,
    build_m2,
    combination,
    det_bruteforce,
    det_closed_form,
    jacobi_eigenvalues,
    joint_structure_deviations,
    max_eigenvalue,
    permuted_sector_spread,
    povm_identity_deviations,
    verify_sector_decomposition,
)


def test_sym_matrix_rejects_asymmetric():
    with pytest.raises(ValueError):
        SymMatrix(np.array([[1.0, 2.0], [0.0, 1.0]]))


def test_sym_matrix_is_read_only():
    m = build_m1(2)
    with pytest.raises(ValueError):
        m.entries[0, 0] = 5.0


class TestBuilders:
    def test_m1(self):
        assert build_m1(1).entries.tolist() == [[1.0]]
        assert build_m1(2).entries.tolist() == [[1.0, 1.0], [1.0, 1.0]]
        assert max_eigenvalue(build_m1(3)) == pytest.approx(3.0)

    def test_m2(self):
        assert not build_m2(3, 0).entries.any()
        np.testing.assert_array_equal(build_m2(3, 3).entries, np.eye(3))
        np.testing.assert_array_equal(build_m2(3, 1).entries, np.diag([1.0, 0, 0]))
        with pytest.raises(ValueError):
            build_m2(3, 4)
        with pytest.raises(ValueError):
            build_m1(0)

    def test_lambda_minus(self):
        assert not build_lambda_minus(3, 0, 0.0).entries.any()
        assert max_eigenvalue(build_lambda_minus(6, 2, 1.0)) == pytest.approx(np.sqrt(3) / 5, abs=1e-12)
        assert max_eigenvalue(build_lambda_minus(6, 2, 0.0)) == pytest.approx(0.4, abs=1e-12)

    def test_lambda_plus(self):
        assert max_eigenvalue(build_lambda_plus(6, 4, 1.0)) == pytest.approx(0.4, abs=1e-12)
        assert max_eigenvalue(build_lambda_plus(6, 4, 0.0)) == pytest.approx(0.6, abs=1e-12)
        assert build_lambda_plus(3, 1, 0.0).entries.tolist() == [[0.0]]
        with pytest.raises(ValueError):
            build_lambda_plus(6, 0, 1.0)


class TestDeterminant:
    def test_closed_form_examples(self):
        assert det_closed_form(1, 1, 1, 2, 1) == pytest.approx(5.0)
        assert det_closed_form(0, 0, 2, 3, 1) == pytest.approx(8.0)
        assert det_closed_form(1, 0, 0, 3, 0) == 0.0

    def test_bruteforce_examples(self):
        assert det_bruteforce(SymMatrix(np.eye(4))) == pytest.approx(1.0)
        assert det_bruteforce(SymMatrix(np.diag([2.0, 3.0]))) == pytest.approx(6.0)
        # [[3,1],[1,2]] by hand: 6 - 1
        assert det_bruteforce(combination(1, 1, 1, 2, 1)) == pytest.approx(5.0)

    def test_bruteforce_pivot_sign(self):
        assert det_bruteforce(SymMatrix(np.array([[0.0, 1.0], [1.0, 0.0]]))) == pytest.approx(-1.0)

    def test_bruteforce_limit(self):
        with pytest.raises(ResourceLimitError):
            det_bruteforce(SymMatrix(np.eye(13)))

    @pytest.mark.parametrize("d", range(1, 9))
    def test_edge_m(self, d):
        for m in (0, d):
            for alpha, beta, gamma in [(0.3, -1.2, 0.0), (1.0, 0.0, 0.0), (0.7, -0.7, 0.7), (-1.5, 0.4, 1.1)]:
                closed = det_closed_form(alpha, beta, gamma, d, m)
                brute = det_bruteforce(combination(alpha, beta, gamma, d, m))
                assert closed == pytest.approx(brute, rel=1e-9, abs=1e-12)

    @given(
        st.floats(-2, 2), st.floats(-2, 2), st.floats(-2, 2),
        st.integers(1, 8).flatmap(lambda d: st.tuples(st.just(d), st.integers(0, d))),
    )
    def test_matches_numpy(self, alpha, beta, gamma, dm):
        d, m = dm
        closed = det_closed_form(alpha, beta, gamma, d, m)
        ref = np.linalg.det(combination(alpha, beta, gamma, d, m).entries)
        assert closed == pytest.approx(ref, rel=1e-8, abs=1e-10)


class TestEigen:
    def test_examples(self):
        assert max_eigenvalue(SymMatrix(np.eye(5))) == pytest.approx(1.0)
        assert max_eigenvalue(build_m1(6)) == pytest.approx(6.0, abs=1e-10)

    @settings(max_examples=50, deadline=None)
    @given(st.integers(1, 12), st.integers(0, 2**32 - 1))
    def test_jacobi_matches_lapack(self, n, seed):
        a = np.random.default_rng(seed).normal(size=(n, n))
        m = SymMatrix(0.5 * (a + a.T))
        np.testing.assert_allclose(jacobi_eigenvalues(m), np.linalg.eigvalsh(m.entries), atol=1e-10)

    def test_unknown_method(self):
        with pytest.raises(ValueError):
            max_eigenvalue(build_m1(2), method="power")

    @pytest.mark.parametrize("L", range(3, 13))
    def test_closure(self, L):
        for nu in range(1, L - 1):
            for lam in (0.0, 0.1, 1.0, 10.0):
                assert max_eigenvalue(build_lambda_minus(L, nu - 1, lam)) == pytest.approx(
                    security_bounds.omega_minus(L, nu, lam), abs=1e-9
                )
                assert max_eigenvalue(build_lambda_plus(L, nu + 1, lam)) == pytest.approx(
                    security_bounds.omega_plus(L, nu, lam), abs=1e-9
                )

    def test_permutation_symmetry(self):
        assert permuted_sector_spread(8, 4, 1.0) < 1e-12


class TestPovm:
    @pytest.mark.parametrize("L", range(3, 9))
    def test_identities(self, L):
        for dev in povm_identity_deviations(L).values():
            assert dev <= 1e-12


@pytest.fixture(scope="module", params=[3, 4, 5])
def ops(request):
    return build_joint_operators(request.param)


class TestJointSpace:
    def test_structure(self, ops):
        assert ops.dim == 2**ops.L * ops.L
        for dev in joint_structure_deviations(ops).values():
            assert dev <= 1e-12

    def test_eph_and_e_are_psd_and_bounded(self, ops):
        for m in (ops.e_bit, ops.e_ph):
            vals = np.linalg.eigvalsh(m.entries)
            assert vals[0] >= -1e-12
            assert vals[-1] <= 1 + 1e-12

    def test_decomposition(self, ops):
        for nu in range(1, ops.L - 1):
            report = verify_sector_decomposition(ops.L, nu, [0.0, 0.1, 1.0, 10.0], ops=ops)
            assert report.passed, [c.as_dict() for c in report.checks]

    def test_l3_examples(self):
        report = verify_sector_decomposition(3, 1, [0.5, 10.0])
        (lam1, got1, _), (lam2, got2, _) = report.eigenvalues
        assert got1 == pytest.approx(0.375, abs=1e-12)
        assert got2 == pytest.approx(0.0, abs=1e-12)

    def test_l4_lambda_zero(self):
        report = verify_sector_decomposition(4, 2, [0.0])
        assert report.eigenvalues[0][1] == pytest.approx(2 / 3, abs=1e-12)

    def test_u_is_involution_l3(self):
        ops = build_joint_operators(3)
        np.testing.assert_allclose(ops.u @ ops.u, np.eye(ops.dim), atol=0)

    def test_perturbed_closed_form_is_reported(self, monkeypatch):
        real = security_bounds.omega_minus
        monkeypatch.setattr(security_bounds, "omega_minus", lambda L, nu, lam: real(L, nu, lam) + 1e-3)
        report = verify_sector_decomposition(4, 2, [10.0])
        assert not report.passed

    def test_size_limit(self):
        with pytest.raises(ResourceLimitError):
            build_joint_operators(6)
