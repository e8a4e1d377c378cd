import math

import numpy as np
import pytest

from synq import (ConfigurationError, IntegratorConfig, NumericalFailureError,
                  make_benchmark, make_linear, rk4_step)


class TestBenchmark:
    def test_drift_vanishes_at_origin(self):
        model = make_benchmark()
        assert np.array_equal(model.drift(np.zeros(2)), np.zeros(2))

    def test_input_gain_by_substitution(self):
        # cos(0) + 2 = 3 regardless of x2
        model = make_benchmark()
        g = model.input_gain(np.array([0.0, 0.7]))
        assert g.shape == (2, 1)
        assert np.allclose(g, [[0.0], [3.0]], atol=1e-15)

    def test_oracle_policy_by_substitution(self):
        model = make_benchmark()
        mu = model.oracle_policy(np.array([0.0, 1.0]))
        assert mu.shape == (1,)
        assert abs(mu[0] + 3.0) < 1e-15

    def test_dimensions(self):
        model = make_benchmark()
        rng = np.random.default_rng(0)
        for _ in range(20):
            x = rng.uniform(-2, 2, size=2)
            assert model.drift(x).shape == (2,)
            assert model.input_gain(x).shape == (2, 1)

    def test_hjb_consistency_with_analytic_gradient(self):
        # S(x) + grad(V)'f - (1/4) grad(V)'g R^-1 g' grad(V) must vanish
        model = make_benchmark()
        rng = np.random.default_rng(42)
        for _ in range(100):
            x = rng.uniform(-1, 1, size=2)
            grad = model.oracle_value_grad(x)
            assert np.allclose(grad, [x[0], 2.0 * x[1]])
            S = x[0] ** 2 + x[1] ** 2
            f = model.drift(x)
            g = model.input_gain(x)
            residual = S + grad @ f - 0.25 * float(grad @ g @ g.T @ grad)
            assert abs(residual) < 1e-10

    def test_oracle_policy_is_hamiltonian_minimizer(self):
        # mu* = -(1/2) R^-1 g' grad(V) for R = 1
        model = make_benchmark()
        rng = np.random.default_rng(3)
        for _ in range(20):
            x = rng.uniform(-1, 1, size=2)
            mu_formula = -0.5 * model.input_gain(x).T @ model.oracle_value_grad(x)
            assert np.allclose(model.oracle_policy(x), mu_formula, atol=1e-13)


class TestMakeLinear:
    def test_zero_drift_matrix(self):
        model = make_linear(np.zeros((2, 2)), np.eye(2))
        assert np.array_equal(model.drift(np.array([1.0, 2.0])), np.zeros(2))

    def test_drift_is_matrix_vector_product(self):
        model = make_linear([[0, 1], [-1, -2]], [[0], [1]])
        assert np.allclose(model.drift(np.array([1.0, 0.0])), [0.0, -1.0])

    def test_input_gain_constant(self):
        B = np.array([[0.5], [2.0]])
        model = make_linear(np.zeros((2, 2)), B)
        for x in (np.zeros(2), np.array([3.0, -4.0])):
            assert np.array_equal(model.input_gain(x), B)

    def test_no_oracles(self):
        model = make_linear(np.zeros((2, 2)), np.eye(2))
        assert not model.has_oracles

    def test_dimension_mismatch_rejected(self):
        with pytest.raises(ConfigurationError):
            make_linear(np.zeros((2, 3)), np.eye(2))
        with pytest.raises(ConfigurationError):
            make_linear(np.zeros((2, 2)), np.zeros((3, 1)))


class TestRK4:
    def test_constant_solution(self):
        z = rk4_step(lambda t, z: np.zeros(2), 0.0, np.array([1.0, 1.0]), 0.5)
        assert np.array_equal(z, [1.0, 1.0])

    def test_exponential_against_math_exp(self):
        z = rk4_step(lambda t, z: z, 0.0, np.array([1.0]), 0.1)
        assert abs(z[0] - math.exp(0.1)) < 1e-7

    def test_harmonic_oscillator_period(self):
        h = 2.0 * math.pi / 1000.0
        z = np.array([1.0, 0.0])
        deriv = lambda t, z: np.array([-z[1], z[0]])
        for i in range(1000):
            z = rk4_step(deriv, i * h, z, h)
        assert np.linalg.norm(z - [1.0, 0.0]) < 1e-8

    def test_fourth_order_convergence(self):
        # halving h must reduce the global error on z' = z by about 16x
        def final_error(h):
            steps = int(round(1.0 / h))
            z = np.array([1.0])
            for i in range(steps):
                z = rk4_step(lambda t, y: y, i * h, z, h)
            return abs(z[0] - math.e)

        ratio = final_error(0.02) / final_error(0.01)
        assert 12.0 < ratio < 20.0

    def test_determinism(self):
        deriv = lambda t, z: np.sin(z) + t
        a = rk4_step(deriv, 0.3, np.array([0.2, -0.4]), 0.05)
        b = rk4_step(deriv, 0.3, np.array([0.2, -0.4]), 0.05)
        assert np.array_equal(a, b)

    def test_nonfinite_derivative_raises_with_location(self):
        def bad(t, z):
            return np.array([np.inf])

        with pytest.raises(NumericalFailureError) as exc:
            rk4_step(bad, 1.5, np.array([2.0]), 0.1)
        assert exc.value.t == 1.5
        assert np.array_equal(exc.value.state, [2.0])

    def test_nonpositive_step_rejected(self):
        with pytest.raises(ConfigurationError):
            rk4_step(lambda t, z: z, 0.0, np.array([1.0]), 0.0)


class TestIntegratorConfig:
    def test_valid(self):
        cfg = IntegratorConfig(h=1e-3)
        assert cfg.method == "rk4"

    def test_bad_step(self):
        with pytest.raises(ConfigurationError):
            IntegratorConfig(h=-1.0)

    def test_bad_method(self):
        with pytest.raises(ConfigurationError):
            IntegratorConfig(h=1e-3, method="euler")
