"""Synchronous integral Q-learning for continuous-time optimal control.

A model-free actor-critic learner for input-affine plants (continuously
updated from windowed integral reinforcement under a probing signal),
together with verifiable baselines: a closed-form benchmark plant, a
Kleinman/Riccati LQR solver, and batch least-squares policy iteration.
"""

from importlib import resources

from .errors import (SynqError, ConfigurationError, NumericalFailureError,
                     DivergenceError, SolverError, ExcitationError)
from .dynamics import (SystemModel, IntegratorConfig, make_benchmark,
                       make_linear, rk4_step)
from .basis import (BasisSet, quadratic_basis, case1_actor_basis,
                    case2_actor_basis, poly_basis, resolve_basis, eval_basis,
                    eval_basis_gradient, quad_weights_from_matrix,
                    matrix_from_quad_weights)
from .cost import (CostSpec, CostValidationReport, quadratic_cost,
                   benchmark_cost, running_cost, validate_cost)
from .exploration import (ExplorationSignal, PEReport, make_sinusoid_sum,
                          no_exploration, pe_gram, symmetric_eigen)
from .learner import (WeightState, RegressorSample, LearnerConfig,
                      WindowBuffer, TrajectoryLog, run_episode,
                      assemble_regressor, bellman_residual, weight_derivative,
                      value_estimate, policy_estimate)
from .baselines import (LQRSolution, PIIterationRecord, gaussian_solve,
                        solve_lyapunov, kleinman_iteration, riccati_residual,
                        batch_ls_pi)
from .harness import (ExperimentConfig, GridSpec, GridEvalReport, load_config,
                      run_experiment, eval_error_grid, write_csv,
                      read_log_csv, analyze_pe_log)

__version__ = "0.1.0"


def bundled_config_path(name: str):
    """Filesystem path of a bundled experiment config (e.g. "case1.cfg")."""
    return resources.files(__name__).joinpath("configs", name)


__all__ = [
    "SynqError", "ConfigurationError", "NumericalFailureError",
    "DivergenceError", "SolverError", "ExcitationError",
    "SystemModel", "IntegratorConfig", "make_benchmark", "make_linear",
    "rk4_step",
    "BasisSet", "quadratic_basis", "case1_actor_basis", "case2_actor_basis",
    "poly_basis", "resolve_basis", "eval_basis", "eval_basis_gradient",
    "quad_weights_from_matrix", "matrix_from_quad_weights",
    "CostSpec", "CostValidationReport", "quadratic_cost", "benchmark_cost",
    "running_cost", "validate_cost",
    "ExplorationSignal", "PEReport", "make_sinusoid_sum", "no_exploration",
    "pe_gram", "symmetric_eigen",
    "WeightState", "RegressorSample", "LearnerConfig", "WindowBuffer",
    "TrajectoryLog", "run_episode", "assemble_regressor", "bellman_residual",
    "weight_derivative", "value_estimate", "policy_estimate",
    "LQRSolution", "PIIterationRecord", "gaussian_solve", "solve_lyapunov",
    "kleinman_iteration", "riccati_residual", "batch_ls_pi",
    "ExperimentConfig", "GridSpec", "GridEvalReport", "load_config",
    "run_experiment", "eval_error_grid", "write_csv", "read_log_csv",
    "analyze_pe_log",
    "bundled_config_path",
]
