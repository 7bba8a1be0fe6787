import unittest

import numpy as np
from scipy import stats

from src.svarmsh.model import (
    EvaluationStatus,
    ModelParameters,
    ReducibleChainError,
    RestrictionScheme,
    StateSequence,
    TimeSeriesData,
    build_alpha_regression,
    build_design,
    ergodic_distribution,
    evaluate_log_likelihood,
    filtered_log_likelihood,
    implied_covariances,
    log_likelihood,
    log_likelihood_alpha_form,
    log_likelihood_alpha_gradient,
    simulate_path,
    state_log_densities,
    structural_residuals,
)
from tests.helpers import bivariate_truth, random_parameters, trivariate_truth


class TestLikelihood(unittest.TestCase):

    def setUp(self):
        self.params, self.scheme = trivariate_truth()
        path = simulate_path(self.params, T=200, seed=4)
        self.data, self.states, self.shocks = path.data, path.states, path.shocks
        self.design = build_design(self.data, 2)

    def test_residuals_recover_shocks(self):
        residuals = structural_residuals(self.params, self.data, self.design)
        np.testing.assert_allclose(residuals, self.shocks, atol=1e-10)

    def test_identity_parameters_give_data(self):
        params = self.params.copy()
        params.set_alpha(np.zeros(self.scheme.n_free), self.scheme)
        params.A = np.zeros_like(params.A)
        np.testing.assert_array_equal(structural_residuals(params, self.data, self.design), self.data.Y)

    def test_row_call_matches_full(self):
        full = structural_residuals(self.params, self.data, self.design)
        for n in range(3):
            np.testing.assert_allclose(
                structural_residuals(self.params, self.data, self.design, row=n), full[n]
            )

    def test_row_and_alpha_forms_agree(self):
        rng = np.random.default_rng(10)
        regression = build_alpha_regression(self.data, self.scheme)
        for _ in range(100):
            params = random_parameters(rng, self.scheme, n_states=2, p=2)
            states = StateSequence(rng.integers(0, 2, size=self.data.n_observations), 2)
            row_form = log_likelihood(params, states, self.data, self.design)
            alpha_form = log_likelihood_alpha_form(
                params.alpha, params, states, self.data, self.design, self.scheme, regression
            )
            self.assertLess(abs(row_form - alpha_form), 1e-9)

    def test_alpha_form_at_identity(self):
        params = self.params.copy()
        params.set_alpha(np.zeros(self.scheme.n_free), self.scheme)
        value = log_likelihood_alpha_form(
            params.alpha, params, self.states, self.data, self.design, self.scheme
        )
        residual = self.data.Y - params.A @ self.design.X
        lam = params.lambda_matrix[self.states.s].T
        expected = -0.5 * np.sum(np.log(2 * np.pi * lam)) - 0.5 * np.sum(residual**2 / lam)
        self.assertAlmostEqual(value, expected, places=8)

    def test_gradient_matches_finite_differences(self):
        regression = build_alpha_regression(self.data, self.scheme)
        alpha = self.params.alpha + 0.05
        gradient = log_likelihood_alpha_gradient(
            alpha, self.params, self.states, self.data, self.design, self.scheme, regression
        )
        step = 1e-6
        for c in range(self.scheme.n_free):
            shift = np.zeros_like(alpha)
            shift[c] = step
            upper = log_likelihood_alpha_form(
                alpha + shift, self.params, self.states, self.data, self.design, self.scheme, regression
            )
            lower = log_likelihood_alpha_form(
                alpha - shift, self.params, self.states, self.data, self.design, self.scheme, regression
            )
            numeric = (upper - lower) / (2 * step)
            self.assertLess(abs(numeric - gradient[c]), 1e-5 * max(1.0, abs(gradient[c])))

    def test_scalar_case_matches_normal_densities(self):
        scheme = RestrictionScheme.unrestricted(1)
        params = ModelParameters.from_alpha(
            np.zeros(0), scheme, np.array([[0.2, 0.5]]), np.array([1.5]),
            np.array([[3.0]]), np.array([[0.9, 0.1], [0.2, 0.8]]),
        )
        rng = np.random.default_rng(3)
        data = TimeSeriesData.from_observations(rng.normal(size=(1, 41)), lags=1)
        design = build_design(data, 1)
        states = StateSequence(rng.integers(0, 2, size=40), 2)
        means = 0.2 + 0.5 * design.X[1]
        sd = np.sqrt(np.where(states.s == 1, 4.5, 1.5))
        expected = np.sum(stats.norm.logpdf(data.Y[0], loc=means, scale=sd))
        self.assertAlmostEqual(log_likelihood(params, states, data, design), expected, places=9)

    def test_doubling_variances_with_zero_residuals(self):
        params = self.params.copy()
        design = self.design
        zero_data = TimeSeriesData(
            Y=np.linalg.solve(params.A0, params.A @ design.X),
            initial_conditions=self.data.initial_conditions,
        )
        base = log_likelihood(params, self.states, zero_data, design)
        params.lambda1 = 2.0 * params.lambda1
        doubled = log_likelihood(params, self.states, zero_data, design)
        self.assertAlmostEqual(base - doubled, 0.5 * 200 * 3 * np.log(2.0), places=8)

    def test_singular_A0_flagged(self):
        scheme = RestrictionScheme.unrestricted(2)
        params = ModelParameters.from_alpha(np.array([1.0, 1.0]), scheme, np.zeros((2, 3)), np.ones(2))
        data = TimeSeriesData.from_observations(np.ones((2, 10)), lags=1)
        design = build_design(data, 1)
        result = evaluate_log_likelihood(params, StateSequence.constant(9, 1), data, design)
        self.assertEqual(result.status, EvaluationStatus.SINGULAR_A0)
        self.assertEqual(result.value, -np.inf)
        self.assertEqual(filtered_log_likelihood(params, data, design).status, EvaluationStatus.SINGULAR_A0)


class TestStateMarginalLikelihood(unittest.TestCase):

    def test_ergodic_distribution(self):
        P = np.array([[0.9, 0.1], [0.3, 0.7]])
        np.testing.assert_allclose(ergodic_distribution(P), [0.75, 0.25], atol=1e-12)
        np.testing.assert_array_equal(ergodic_distribution(np.ones((1, 1))), [1.0])

    def test_reducible_chain(self):
        with self.assertRaises(ReducibleChainError) as cm:
            ergodic_distribution(np.eye(3))
        self.assertEqual(cm.exception.rank, 0)

    def test_forward_filter_matches_enumeration(self):
        params, _ = bivariate_truth()
        data = simulate_path(params, T=6, seed=2, burn=10).data
        design = build_design(data, 1)
        log_dens = state_log_densities(params, data, design)
        pi = ergodic_distribution(params.P)
        total = -np.inf
        for code in range(2**6):
            s = np.array([(code >> t) & 1 for t in range(6)])
            log_prob = np.log(pi[s[0]]) + np.sum(np.log(params.P[s[:-1], s[1:]]))
            total = np.logaddexp(total, log_prob + log_dens[np.arange(6), s].sum())
        self.assertAlmostEqual(filtered_log_likelihood(params, data, design).value, total, places=9)

    def test_state_densities_sum_to_likelihood(self):
        params, _ = bivariate_truth()
        path = simulate_path(params, T=50, seed=1)
        design = build_design(path.data, 1)
        log_dens = state_log_densities(params, path.data, design)
        self.assertAlmostEqual(
            log_dens[np.arange(50), path.states.s].sum(),
            log_likelihood(params, path.states, path.data, design),
            places=9,
        )


class TestImpliedCovariances(unittest.TestCase):

    def test_identity_A0(self):
        scheme = RestrictionScheme.unrestricted(2)
        params = ModelParameters.from_alpha(
            np.zeros(2), scheme, np.zeros((2, 3)), np.array([1.0, 2.0]),
            np.array([[3.0, 0.5]]), np.array([[0.9, 0.1], [0.1, 0.9]]),
        )
        sigmas = implied_covariances(params)
        np.testing.assert_allclose(sigmas[0], np.diag([1.0, 2.0]))
        np.testing.assert_allclose(sigmas[1], np.diag([3.0, 1.0]))

    def test_positive_definite(self):
        rng = np.random.default_rng(5)
        scheme = RestrictionScheme.unrestricted(3)
        for _ in range(20):
            params = random_parameters(rng, scheme, n_states=3, p=1)
            for sigma in implied_covariances(params):
                np.testing.assert_allclose(sigma, sigma.T)
                self.assertGreater(np.linalg.eigvalsh(sigma).min(), 0.0)


if __name__ == "__main__":
    unittest.main(argv=["first-arg-is-ignored"], exit=False)
