import unittest

import numpy as np

from src.svarmsh.model import (
    ModelParameters,
    RestrictionScheme,
    UnstableSystemError,
    build_design,
    companion_matrix,
    implied_covariances,
    simulate_data,
    simulate_path,
    structural_residuals,
)
from tests.helpers import bivariate_truth


class TestSimulation(unittest.TestCase):

    def test_shapes_and_presample(self):
        params, _ = bivariate_truth()
        data, states = simulate_data(params, T=120, seed=1, variable_names=["x", "y"])
        self.assertEqual(data.Y.shape, (2, 120))
        self.assertEqual(data.initial_conditions.shape, (2, 1))
        self.assertEqual(len(states), 120)
        self.assertEqual(data.variable_names, ("x", "y"))

    def test_seeded_reproducibility(self):
        params, _ = bivariate_truth()
        first, s1 = simulate_data(params, T=50, seed=9)
        second, s2 = simulate_data(params, T=50, seed=9)
        np.testing.assert_array_equal(first.Y, second.Y)
        np.testing.assert_array_equal(s1.s, s2.s)

    def test_single_state_residual_covariance(self):
        params, _ = bivariate_truth(n_states=1)
        data, _ = simulate_data(params, T=100_000, seed=3)
        design = build_design(data, 1)
        reduced_residuals = np.linalg.solve(params.A0, structural_residuals(params, data, design))
        sample = np.cov(reduced_residuals)
        np.testing.assert_allclose(sample, implied_covariances(params)[0], atol=0.03)

    def test_absorbing_chain(self):
        params, _ = bivariate_truth()
        params.P = np.eye(2)
        _, states = simulate_data(params, T=200, seed=0, initial_state=1)
        self.assertTrue(np.all(states.s == 1))

    def test_transition_frequencies(self):
        params, _ = bivariate_truth()
        params.P = np.array([[0.9, 0.1], [0.25, 0.75]])
        _, states = simulate_data(params, T=100_000, seed=6)
        counts = states.transition_counts
        visits = counts.sum(axis=1)
        for i in range(2):
            for j in range(2):
                estimate = counts[i, j] / visits[i]
                se = np.sqrt(params.P[i, j] * (1 - params.P[i, j]) / visits[i])
                self.assertLess(abs(estimate - params.P[i, j]), 4 * se)

    def test_shocks_match_residuals(self):
        params, _ = bivariate_truth()
        path = simulate_path(params, T=300, seed=2)
        design = build_design(path.data, 1)
        np.testing.assert_allclose(
            structural_residuals(params, path.data, design), path.shocks, atol=1e-10
        )

    def test_unstable_rejected(self):
        params, _ = bivariate_truth()
        params.A[:, 1:] = 1.2 * params.A0
        with self.assertRaises(UnstableSystemError) as cm:
            simulate_data(params, T=10, seed=0)
        self.assertGreaterEqual(cm.exception.spectral_radius, 1.0)

    def test_companion_matrix_layout(self):
        scheme = RestrictionScheme.unrestricted(2)
        A = np.zeros((2, 5))
        A[:, 1:3] = 0.5 * np.eye(2)
        A[:, 3:5] = 0.2 * np.eye(2)
        params = ModelParameters.from_alpha(np.zeros(2), scheme, A, np.ones(2))
        companion = companion_matrix(params)
        np.testing.assert_array_equal(companion[:2], np.hstack([0.5 * np.eye(2), 0.2 * np.eye(2)]))
        np.testing.assert_array_equal(companion[2:, :2], np.eye(2))
        np.testing.assert_array_equal(companion[2:, 2:], np.zeros((2, 2)))


if __name__ == "__main__":
    unittest.main(argv=["first-arg-is-ignored"], exit=False)
