"""Verifiable reference solvers for cross-checking the synchronous learner.

``kleinman_iteration`` is offline policy iteration specialized to LQR:
repeated dense Lyapunov solves converging quadratically to the Riccati
solution. ``batch_ls_pi`` is the windowed least-squares policy iteration
that solves the same exploration identity as the synchronous learner, one
batch of windows per iteration, and simultaneously evaluates and improves
the current policy. Both give independent targets for the learner's
converged weights.

The dense linear solves are in-repo Gaussian elimination with partial
pivoting; problem sizes here are tiny (Kronecker-vectorized Lyapunov solves
reach dimension n^2, i.e. about 100 for n = 10).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from .basis import BasisSet
from .cost import CostSpec
from .dynamics import SystemModel, rk4_step
from .errors import (ConfigurationError, DivergenceError, ExcitationError,
                     SolverError)
from .exploration import ExplorationSignal, symmetric_eigen
from .learner import RegressorSample, WeightState, WindowBuffer, assemble_regressor

Array = np.ndarray


def gaussian_solve(A, b) -> Array:
    """Solve A x = b by Gaussian elimination with partial pivoting.

    ``b`` may be a vector or a matrix of right-hand sides. Raises
    SolverError when a pivot is numerically zero (singular system).
    """
    A = np.array(A, dtype=float)
    b = np.array(b, dtype=float)
    n = A.shape[0]
    if A.shape != (n, n):
        raise ConfigurationError(f"A must be square, got shape {A.shape}")
    vector_rhs = b.ndim == 1
    if vector_rhs:
        b = b[:, None]
    if b.shape[0] != n:
        raise ConfigurationError(f"rhs has {b.shape[0]} rows, expected {n}")

    scale = np.abs(A).max()
    if scale == 0.0:
        raise SolverError("singular system: zero matrix")
    for k in range(n):
        pivot_row = k + int(np.argmax(np.abs(A[k:, k])))
        pivot = A[pivot_row, k]
        if abs(pivot) <= 1e-13 * scale:
            raise SolverError(f"singular system: pivot {pivot:g} at column {k}")
        if pivot_row != k:
            A[[k, pivot_row]] = A[[pivot_row, k]]
            b[[k, pivot_row]] = b[[pivot_row, k]]
        factors = A[k + 1:, k] / A[k, k]
        A[k + 1:, k:] -= np.outer(factors, A[k, k:])
        b[k + 1:] -= np.outer(factors, b[k])

    x = np.zeros_like(b)
    for k in range(n - 1, -1, -1):
        x[k] = (b[k] - A[k, k + 1:] @ x[k + 1:]) / A[k, k]
    return x[:, 0] if vector_rhs else x


def solve_lyapunov(A_cl, Q_total) -> Array:
    """Solve A_cl' P + P A_cl + Q_total = 0 for symmetric P.

    Kronecker vectorization with a dense pivoted solve. A non-Hurwitz A_cl
    whose spectrum contains mirrored eigenvalues makes the Kronecker system
    singular and raises SolverError.
    """
    A_cl = np.atleast_2d(np.asarray(A_cl, dtype=float))
    Q_total = np.atleast_2d(np.asarray(Q_total, dtype=float))
    n = A_cl.shape[0]
    if A_cl.shape != (n, n) or Q_total.shape != (n, n):
        raise ConfigurationError("A_cl and Q_total must be square of equal size")
    if not np.allclose(Q_total, Q_total.T, rtol=0.0, atol=1e-10):
        raise ConfigurationError("Q_total must be symmetric")

    # row-major vectorization: vec(A'P) = (A' kron I) vec(P),
    # vec(PA) = (I kron A') vec(P)
    eye = np.eye(n)
    kron = np.kron(A_cl.T, eye) + np.kron(eye, A_cl.T)
    p = gaussian_solve(kron, -Q_total.reshape(-1))
    P = p.reshape(n, n)
    P = 0.5 * (P + P.T)
    residual = np.linalg.norm(A_cl.T @ P + P @ A_cl + Q_total)
    if residual > 1e-10:
        raise SolverError(
            f"Lyapunov solve left residual {residual:g} > 1e-10", residual=residual
        )
    return P


@dataclass(frozen=True)
class LQRSolution:
    """Riccati solution pair with the iterates that produced it."""

    P: Array
    K: Array
    iterations: int
    residual: float
    history: Tuple[Array, ...]


def _is_hurwitz(A: Array) -> bool:
    return bool(np.max(np.linalg.eigvals(A).real) < 0.0)


def riccati_residual(A, B, S, R, P) -> float:
    """Frobenius norm of A'P + PA - P B R^-1 B' P + S."""
    BRinvBt = B @ gaussian_solve(np.asarray(R, dtype=float), B.T)
    return float(np.linalg.norm(A.T @ P + P @ A - P @ BRinvBt @ P + S))


def kleinman_iteration(A, B, S, R, K0, tol: float = 1e-12,
                       max_iter: int = 50) -> LQRSolution:
    """Policy iteration for LQR: Lyapunov solves with gain updates.

    Starting from a stabilizing gain K0, iterate
    P_i = lyapunov(A - B K_i, S + K_i' R K_i), K_{i+1} = R^-1 B' P_i
    until the change in P drops below ``tol``. The P_i sequence is
    monotonically non-increasing in the Loewner order and converges
    quadratically to the stabilizing Riccati solution.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    B = np.asarray(B, dtype=float)
    if B.ndim == 0:
        B = B.reshape(1, 1)
    elif B.ndim == 1:
        B = B[:, None]
    S = np.atleast_2d(np.asarray(S, dtype=float))
    R = np.atleast_2d(np.asarray(R, dtype=float))
    n, m = B.shape
    K = np.asarray(K0, dtype=float).reshape(m, n)
    if not _is_hurwitz(A - B @ K):
        raise ConfigurationError(
            "initial gain K0 does not stabilize the plant "
            "(A - B K0 has an eigenvalue with nonnegative real part)"
        )

    history: List[Array] = []
    P_prev: Optional[Array] = None
    for it in range(1, max_iter + 1):
        A_cl = A - B @ K
        P = solve_lyapunov(A_cl, S + K.T @ R @ K)
        history.append(P)
        K = gaussian_solve(R, B.T @ P)
        if P_prev is not None and np.linalg.norm(P - P_prev) <= tol:
            residual = riccati_residual(A, B, S, R, P)
            return LQRSolution(P=P, K=K, iterations=it, residual=residual,
                               history=tuple(history))
        P_prev = P
    residual = riccati_residual(A, B, S, R, history[-1])
    raise SolverError(
        f"Kleinman iteration did not converge in {max_iter} iterations "
        f"(Riccati residual {residual:g})", residual=residual,
    )


@dataclass(frozen=True)
class PIIterationRecord:
    """One batch least-squares policy-iteration step."""

    iteration: int
    w_c: Array
    w_a: Array
    condition_number: float
    residual: float
    diverged: bool = False


def _collect_windows(model: SystemModel, cost: CostSpec, phi_c: BasisSet,
                     phi_a: BasisSet, expl: ExplorationSignal, w_a: Array,
                     window_count: int, T: float, h: float, x0: Array,
                     state_cap: float) -> Tuple[List[RegressorSample], bool]:
    """Simulate under a fixed actor with exploration; collect one sample per
    consecutive non-overlapping window. Returns (samples, diverged)."""
    n, m = model.n, model.m
    K = int(round(T / h))
    if abs(K - T / h) > 1e-6 * max(1.0, T / h) or K < 1:
        raise ConfigurationError(f"T={T} must be an integer multiple of h={h}")
    n_am = phi_a.dim_out * m
    R = cost.R
    w_a = np.asarray(w_a, dtype=float).reshape(phi_a.dim_out, m)

    def aug_deriv(t, z):
        xs = z[:n]
        fa = phi_a.eval(xs)
        mu = fa @ w_a
        ev = expl.eval(t)
        out = np.empty(n + 1 + n_am)
        out[:n] = model.drift(xs) + model.input_gain(xs) @ (mu + ev)
        out[n] = cost.state_cost(xs) + mu @ R @ mu
        out[n + 1:] = 2.0 * np.outer(fa, R @ ev).reshape(-1)
        return out

    ring = WindowBuffer(K, phi_c.dim_out, n_am)
    z = np.concatenate([np.asarray(x0, dtype=float), [0.0], np.zeros(n_am)])
    samples: List[RegressorSample] = []
    total_steps = window_count * K
    for i in range(total_steps + 1):
        t = i * h
        xs = z[:n]
        ring.push(t, phi_c.eval(xs), float(z[n]), z[n + 1:])
        if i >= K and i % K == 0:
            samples.append(assemble_regressor(ring, t))
        if i == total_steps:
            break
        z = rk4_step(aug_deriv, t, z, h)
        if not np.isfinite(z).all() or np.linalg.norm(z[:n]) > state_cap:
            return samples, True
    return samples, False


def batch_ls_pi(model: SystemModel, cost: CostSpec, phi_c: BasisSet,
                phi_a: BasisSet, expl: ExplorationSignal, window_count: int,
                T: float, h: float, initial_weights: WeightState,
                iterations: int = 8, x0=None,
                state_cap: float = 50.0) -> List[PIIterationRecord]:
    """Batch least-squares policy iteration on windowed integral data.

    Each iteration simulates under the current actor plus exploration,
    stacks one equation delta' W = -rho per window, and solves for the full
    stacked weight vector in the least-squares sense (normal equations with
    1e-12 diagonal regularization). The solved actor block is the improved
    policy, so evaluation and improvement happen in one solve. Divergence of
    the collection trajectory flags the record and stops further iterations.
    """
    n, m = model.n, model.m
    dim = phi_c.dim_out + phi_a.dim_out * m
    if window_count < dim:
        raise ConfigurationError(
            f"window_count={window_count} gives fewer equations than the "
            f"{dim} unknowns"
        )
    if x0 is None:
        x0 = np.zeros(n)
    w_a = np.asarray(initial_weights.w_a, dtype=float).copy()

    records: List[PIIterationRecord] = []
    for it in range(1, iterations + 1):
        samples, diverged = _collect_windows(
            model, cost, phi_c, phi_a, expl, w_a, window_count, T, h, x0,
            state_cap,
        )
        if diverged:
            records.append(PIIterationRecord(
                iteration=it, w_c=np.full(phi_c.dim_out, np.nan),
                w_a=w_a.copy(), condition_number=float("inf"),
                residual=float("inf"), diverged=True,
            ))
            return records

        X = np.stack([s.delta for s in samples])
        rho = np.array([s.rho for s in samples])
        gram = X.T @ X
        eigs = symmetric_eigen(gram)
        lam_min, lam_max = float(eigs[0]), float(eigs[-1])
        if lam_min <= 1e-12 * max(lam_max, 1.0):
            cond = float("inf") if lam_min <= 0 else float(np.sqrt(lam_max / lam_min))
            raise ExcitationError(
                f"rank-deficient regressor in iteration {it} "
                f"(condition number {cond:g}); the exploration signal does "
                f"not excite all parameters", condition_number=cond,
            )
        cond = float(np.sqrt(lam_max / lam_min))
        W = gaussian_solve(gram + 1e-12 * np.eye(dim), -X.T @ rho)
        residual = float(np.linalg.norm(X @ W + rho))
        w_c = W[:phi_c.dim_out]
        w_a = W[phi_c.dim_out:].reshape(phi_a.dim_out, m)
        records.append(PIIterationRecord(
            iteration=it, w_c=w_c.copy(), w_a=w_a.copy(),
            condition_number=cond, residual=residual,
        ))
    return records
