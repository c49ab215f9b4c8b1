"""
Tests for covariance construction, eigenvalues and multiplicities.
"""

import unittest

import numpy as np

from core import (
    CovarianceMatrix,
    EigenError,
    EigenSpectrum,
    MultiplicityPartition,
    SampleMatrix,
    ValueCase,
    batch_eigenvalues,
    batch_sample_covariance,
    eigenvalues,
    multiplicity_partition,
    population_covariance,
    sample_covariance,
)


def _random_hermitian(rng, K, complex_valued=False):
    A = rng.standard_normal((K, K))
    if complex_valued:
        A = A + 1j * rng.standard_normal((K, K))
    return A @ A.conj().T / K


class TestCovariance(unittest.TestCase):
    """Test covariance matrices."""

    def test_sample_covariance_example(self):
        """Test X = [[1, -1], [1, 1]] gives the identity."""
        X = SampleMatrix(np.array([[1.0, -1.0], [1.0, 1.0]]))
        np.testing.assert_allclose(sample_covariance(X).data, np.eye(2))

    def test_single_column(self):
        """Test N = 1 gives the rank-one outer product."""
        X = SampleMatrix(np.array([[1.0], [2.0]]))
        np.testing.assert_allclose(sample_covariance(X).data, [[1.0, 2.0], [2.0, 4.0]])

    def test_sample_covariance_is_exactly_hermitian(self):
        """Test the symmetrized covariance equals its conjugate transpose."""
        rng = np.random.default_rng(0)
        X = SampleMatrix(rng.standard_normal((3, 7)) + 1j * rng.standard_normal((3, 7)),
                         ValueCase.COMPLEX)
        C = sample_covariance(X).data
        np.testing.assert_array_equal(C, C.conj().T)

    def test_batch_matches_single(self):
        """Test the stacked covariance agrees with one-at-a-time."""
        rng = np.random.default_rng(1)
        X = rng.standard_normal((4, 3, 20))
        stacked = batch_sample_covariance(X)
        for m in range(4):
            np.testing.assert_allclose(stacked[m], sample_covariance(SampleMatrix(X[m])).data)

    def test_population_covariance(self):
        """Test R = sigma_s2 H H^T + sigma_u2 I for H = [1; 1]."""
        R = population_covariance([[1.0], [1.0]], 1.0, 1.0)
        np.testing.assert_allclose(R.data, [[2.0, 1.0], [1.0, 2.0]])
        np.testing.assert_allclose(eigenvalues(R).values, (3.0, 1.0))

    def test_population_without_signal(self):
        """Test sigma_s2 = 0 leaves sigma_u2 I."""
        R = population_covariance([[1.0], [1.0]], 0.0, 2.5)
        np.testing.assert_allclose(R.data, 2.5 * np.eye(2))

    def test_non_hermitian_rejected(self):
        """Test a non-symmetric matrix is refused."""
        with self.assertRaises(EigenError):
            CovarianceMatrix(np.array([[1.0, 2.0], [0.0, 1.0]]))

    def test_non_square_rejected(self):
        """Test a non-square matrix is refused."""
        with self.assertRaises(EigenError):
            CovarianceMatrix(np.ones((2, 3)))

    def test_trace(self):
        """Test the trace of a covariance matrix."""
        self.assertAlmostEqual(CovarianceMatrix(np.diag([3.0, 1.0, 0.5])).trace(), 4.5)


class TestEigenvalues(unittest.TestCase):
    """Test ordered eigenvalue computation."""

    def test_two_by_two_example(self):
        """Test [[2, 1], [1, 2]] has eigenvalues (3, 1)."""
        spec = eigenvalues(CovarianceMatrix(np.array([[2.0, 1.0], [1.0, 2.0]])))
        self.assertAlmostEqual(spec.largest, 3.0, places=12)
        self.assertAlmostEqual(spec.smallest, 1.0, places=12)

    def test_identity(self):
        """Test the identity has all-one eigenvalues."""
        spec = eigenvalues(CovarianceMatrix(np.eye(4)))
        np.testing.assert_allclose(spec.values, np.ones(4), atol=1e-14)

    def test_complex_two_by_two(self):
        """Test [[2, i], [-i, 2]] has eigenvalues (3, 1)."""
        C = np.array([[2.0, 1j], [-1j, 2.0]])
        spec = eigenvalues(CovarianceMatrix(C, ValueCase.COMPLEX))
        np.testing.assert_allclose(spec.values, (3.0, 1.0), atol=1e-12)

    def test_complex_three_by_three(self):
        """Test the complex embedding halves the doubled spectrum correctly."""
        rng = np.random.default_rng(2)
        C = _random_hermitian(rng, 3, complex_valued=True)
        ours = eigenvalues(CovarianceMatrix(C, ValueCase.COMPLEX)).values
        reference = np.sort(np.linalg.eigvalsh(C))[::-1]
        np.testing.assert_allclose(ours, reference, rtol=1e-10, atol=1e-12)

    def test_descending_order(self):
        """Test eigenvalues come out largest first."""
        rng = np.random.default_rng(3)
        values = batch_eigenvalues(np.stack([_random_hermitian(rng, 5) for _ in range(10)]))
        self.assertTrue(np.all(np.diff(values, axis=1) <= 0))

    def test_jacobi_against_lapack(self):
        """Test Jacobi agrees with LAPACK for K = 3..6, real and complex."""
        rng = np.random.default_rng(4)
        for K in range(3, 7):
            for complex_valued in (False, True):
                stack = np.stack([_random_hermitian(rng, K, complex_valued) for _ in range(20)])
                ours = batch_eigenvalues(stack)
                reference = np.sort(np.linalg.eigvalsh(stack), axis=1)[:, ::-1]
                scale = np.max(np.abs(reference), axis=1, keepdims=True)
                np.testing.assert_allclose(ours / scale, reference / scale, atol=1e-10)

    def test_characteristic_polynomial_roots(self):
        """Test K = 3 eigenvalues are the roots of det(C - x I)."""
        rng = np.random.default_rng(5)
        C = _random_hermitian(rng, 3)
        roots = np.sort(np.real(np.roots(np.poly(C))))[::-1]
        np.testing.assert_allclose(eigenvalues(CovarianceMatrix(C)).values, roots, rtol=1e-8)

    def test_orthogonal_invariance(self):
        """Test Q C Q^T has the same spectrum as C."""
        rng = np.random.default_rng(6)
        C = _random_hermitian(rng, 4)
        Q, _ = np.linalg.qr(rng.standard_normal((4, 4)))
        rotated = Q @ C @ Q.T
        rotated = 0.5 * (rotated + rotated.T)
        np.testing.assert_allclose(
            eigenvalues(CovarianceMatrix(rotated)).values,
            eigenvalues(CovarianceMatrix(C)).values,
            rtol=1e-10,
        )

    def test_trace_preserved(self):
        """Test the eigenvalues sum to the trace."""
        rng = np.random.default_rng(7)
        C = CovarianceMatrix(_random_hermitian(rng, 5))
        self.assertAlmostEqual(sum(eigenvalues(C).values), C.trace(), places=10)

    def test_rank_deficient_psd(self):
        """Test a rank-one covariance keeps a (numerically) zero eigenvalue."""
        X = SampleMatrix(np.array([[1.0], [2.0], [3.0]]))
        spec = eigenvalues(sample_covariance(X))
        self.assertAlmostEqual(spec.largest, 14.0, places=10)
        self.assertAlmostEqual(spec.smallest, 0.0, places=10)

    def test_bad_stack_shape(self):
        """Test a non-square stack is refused."""
        with self.assertRaises(EigenError):
            batch_eigenvalues(np.ones((2, 3, 4)))


class TestEigenSpectrum(unittest.TestCase):
    """Test the spectrum value type."""

    def test_ascending_rejected(self):
        """Test values must be descending."""
        with self.assertRaises(EigenError):
            EigenSpectrum((1.0, 2.0))

    def test_negative_rejected(self):
        """Test a clearly negative eigenvalue is refused."""
        with self.assertRaises(EigenError):
            EigenSpectrum((1.0, -0.5))

    def test_rounding_slack_allowed(self):
        """Test a tiny negative value from rounding is tolerated."""
        spec = EigenSpectrum((1.0, -1e-13))
        self.assertEqual(len(spec), 2)

    def test_scaled(self):
        """Test positive scaling multiplies every value."""
        self.assertEqual(EigenSpectrum((3.0, 1.0)).scaled(2.0).values, (6.0, 2.0))
        with self.assertRaises(EigenError):
            EigenSpectrum((3.0, 1.0)).scaled(0.0)


class TestMultiplicityPartition(unittest.TestCase):
    """Test grouping of equal population eigenvalues."""

    def test_one_signal(self):
        """Test (3, 1) is two simple blocks."""
        p = multiplicity_partition(EigenSpectrum((3.0, 1.0)))
        self.assertEqual(p.mus, (3.0, 1.0))
        self.assertEqual(p.qs, (1, 1))
        self.assertEqual(p.r, 2)

    def test_repeated_noise(self):
        """Test (5, 2, 2) groups the noise eigenvalues."""
        p = multiplicity_partition(EigenSpectrum((5.0, 2.0, 2.0)))
        self.assertEqual(p.mus, (5.0, 2.0))
        self.assertEqual(p.qs, (1, 2))
        self.assertEqual(p.K, 3)

    def test_all_equal(self):
        """Test identical eigenvalues form one block."""
        p = multiplicity_partition(EigenSpectrum((1.0, 1.0, 1.0)))
        self.assertEqual(p.qs, (3,))

    def test_rounding_gap_merged(self):
        """Test gaps below the relative tolerance count as equal."""
        p = multiplicity_partition(EigenSpectrum((2.0 + 1e-12, 2.0, 1.0)))
        self.assertEqual(p.qs, (2, 1))

    def test_block_slices(self):
        """Test block slices cover the spectrum in order."""
        p = MultiplicityPartition(mus=(4.0, 2.0, 1.0), qs=(1, 2, 1))
        self.assertEqual([(s.start, s.stop) for s in p.block_slices()], [(0, 1), (1, 3), (3, 4)])

    def test_invalid_partition(self):
        """Test non-decreasing mus are refused."""
        with self.assertRaises(EigenError):
            MultiplicityPartition(mus=(1.0, 2.0), qs=(1, 1))


if __name__ == '__main__':
    unittest.main()
