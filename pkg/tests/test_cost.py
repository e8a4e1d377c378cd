import numpy as np
import pytest

from synq import (ConfigurationError, CostSpec, NumericalFailureError,
                  benchmark_cost, quadratic_cost, running_cost, validate_cost)


class TestRunningCost:
    def test_benchmark_value(self):
        # S = x1^2 + x2^2 = 2, u'Ru = 4
        cost = benchmark_cost()
        assert running_cost(cost, [1.0, 1.0], 2.0) == pytest.approx(6.0, abs=1e-14)

    def test_zero_at_origin(self):
        cost = benchmark_cost()
        assert running_cost(cost, [0.0, 0.0], 0.0) == 0.0

    def test_benchmark_selection(self):
        cost = benchmark_cost()
        assert cost.R.shape == (1, 1) and cost.R[0, 0] == 1.0
        assert cost.state_cost(np.array([0.3, -0.4])) == pytest.approx(0.25)

    def test_quadratic_in_u(self):
        cost = quadratic_cost(np.eye(2), np.diag([2.0, 0.5]))
        rng = np.random.default_rng(0)
        for _ in range(20):
            x = rng.uniform(-1, 1, 2)
            u = rng.uniform(-1, 1, 2)
            S = cost.state_cost(x)
            lhs = running_cost(cost, x, 2.0 * u) - S
            rhs = 4.0 * (running_cost(cost, x, u) - S)
            assert lhs == pytest.approx(rhs, rel=1e-12)

    def test_nonnegative_when_valid(self):
        cost = quadratic_cost(np.eye(2), np.eye(2))
        rng = np.random.default_rng(1)
        for _ in range(100):
            x = rng.uniform(-3, 3, 2)
            u = rng.uniform(-3, 3, 2)
            assert running_cost(cost, x, u) >= 0.0

    def test_nonfinite_input_raises(self):
        cost = benchmark_cost()
        with pytest.raises(NumericalFailureError):
            running_cost(cost, [np.nan, 0.0], 0.0)
        with pytest.raises(NumericalFailureError):
            running_cost(cost, [0.0, 0.0], np.inf)


class TestCostSpec:
    def test_asymmetric_r_rejected(self):
        with pytest.raises(ConfigurationError):
            CostSpec(state_cost=lambda x: 0.0, R=np.array([[1.0, 0.1], [0.0, 1.0]]))

    def test_scalar_r_promoted(self):
        cost = CostSpec(state_cost=lambda x: 0.0, R=1.0)
        assert cost.R.shape == (1, 1)
        assert cost.m == 1


class TestValidateCost:
    def test_benchmark_passes(self):
        report = validate_cost(benchmark_cost(), (np.full(2, -1.0), np.full(2, 1.0)))
        assert report.passed
        assert report.min_state_cost_ratio > 0.1
        assert report.warnings == ()

    def test_indefinite_r_names_eigenvalue(self):
        cost = quadratic_cost(np.eye(2), np.array([[1.0, 2.0], [2.0, 1.0]]))
        with pytest.raises(ConfigurationError) as exc:
            validate_cost(cost, (np.full(2, -1.0), np.full(2, 1.0)))
        assert "-1" in str(exc.value)

    def test_semidefinite_s_flagged_as_warning(self):
        # S = x1^2 vanishes along the x2 axis; caught by the axis probes
        cost = quadratic_cost(np.diag([1.0, 0.0]), np.eye(1))
        report = validate_cost(cost, (np.full(2, -1.0), np.full(2, 1.0)))
        assert report.passed
        assert report.min_state_cost_ratio == pytest.approx(0.0, abs=1e-15)
        assert any("positive definite" in w for w in report.warnings)

    def test_nonzero_origin_flagged(self):
        cost = CostSpec(state_cost=lambda x: float(x @ x) + 0.5, R=1.0)
        report = validate_cost(cost, (np.full(2, -1.0), np.full(2, 1.0)))
        assert any("S(0)" in w for w in report.warnings)

    def test_bad_region(self):
        with pytest.raises(ConfigurationError):
            validate_cost(benchmark_cost(), (np.ones(2), np.ones(2)))
