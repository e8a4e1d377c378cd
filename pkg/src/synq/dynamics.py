"""Input-affine plant models and a deterministic fixed-step RK4 integrator.

Plants have the form ``xdot = f(x) + g(x) u``. The built-in benchmark is a
second-order system constructed (via the converse-HJB route) so that its
optimal value function and policy are known in closed form; both are attached
to the model as oracles, which makes every learning result on it checkable
without any numerical HJB solve.

Only classical fixed-step RK4 is provided. Fixed stepping keeps episodes
seed-reproducible and keeps the learner's sliding window aligned exactly
with the integration grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import ConfigurationError, NumericalFailureError

Array = np.ndarray


@dataclass(frozen=True)
class SystemModel:
    """Input-affine plant ``xdot = f(x) + g(x) u``.

    ``drift`` maps an n-vector to an n-vector and must vanish at the origin;
    ``input_gain`` maps an n-vector to an (n, m) matrix. The oracle fields
    are optional closed-form solutions (value function, its gradient, and
    the optimal policy) used for error grids and consistency tests.
    """

    n: int
    m: int
    drift: Callable[[Array], Array]
    input_gain: Callable[[Array], Array]
    oracle_value: Optional[Callable[[Array], float]] = None
    oracle_policy: Optional[Callable[[Array], Array]] = None
    oracle_value_grad: Optional[Callable[[Array], Array]] = None
    name: str = "system"

    @property
    def has_oracles(self) -> bool:
        return self.oracle_value is not None and self.oracle_policy is not None

    def with_oracles(self, value, policy, value_grad=None) -> "SystemModel":
        """Copy of this model with closed-form oracles attached."""
        return SystemModel(
            n=self.n,
            m=self.m,
            drift=self.drift,
            input_gain=self.input_gain,
            oracle_value=value,
            oracle_policy=policy,
            oracle_value_grad=value_grad,
            name=self.name,
        )


@dataclass(frozen=True)
class IntegratorConfig:
    """Fixed-step integrator settings. ``method`` is always classical RK4."""

    h: float
    method: str = "rk4"

    def __post_init__(self):
        if not (self.h > 0.0):
            raise ConfigurationError(f"integrator step h must be > 0, got {self.h}")
        if self.method != "rk4":
            raise ConfigurationError(
                f"only the classical 'rk4' method is supported, got {self.method!r}"
            )


def make_benchmark() -> SystemModel:
    """Second-order benchmark plant with known optimal solution.

    f(x) = [-x1 + x2, -0.5 x1 - 0.5 x2 (1 - (cos(2 x1) + 2)^2)],
    g(x) = [0, cos(2 x1) + 2], and for the cost S(x) = x1^2 + x2^2, R = 1
    the optimal value function is V(x) = 0.5 x1^2 + x2^2 with policy
    mu(x) = -(cos(2 x1) + 2) x2. The gradient [x1, 2 x2] is attached
    analytically for HJB-consistency checks.
    """

    def drift(x):
        c = math.cos(2.0 * x[0]) + 2.0
        return np.array([-x[0] + x[1], -0.5 * x[0] - 0.5 * x[1] * (1.0 - c * c)])

    def input_gain(x):
        return np.array([[0.0], [math.cos(2.0 * x[0]) + 2.0]])

    def value(x):
        return 0.5 * x[0] * x[0] + x[1] * x[1]

    def value_grad(x):
        return np.array([x[0], 2.0 * x[1]])

    def policy(x):
        return np.array([-(math.cos(2.0 * x[0]) + 2.0) * x[1]])

    return SystemModel(
        n=2,
        m=1,
        drift=drift,
        input_gain=input_gain,
        oracle_value=value,
        oracle_policy=policy,
        oracle_value_grad=value_grad,
        name="benchmark",
    )


def make_linear(A, B) -> SystemModel:
    """Linear plant ``xdot = A x + B u`` with constant input gain.

    No oracles are attached; for LQR instances they can be filled in later
    from the Riccati solution (see baselines.kleinman_iteration).
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    B = np.asarray(B, dtype=float)
    if B.ndim == 1:
        B = B[:, None]
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ConfigurationError(f"A must be square, got shape {A.shape}")
    if B.ndim != 2 or B.shape[0] != A.shape[0]:
        raise ConfigurationError(
            f"B must have {A.shape[0]} rows to match A, got shape {B.shape}"
        )
    n, m = B.shape
    A = A.copy()
    B = B.copy()

    def drift(x):
        return A @ x

    def input_gain(x):
        return B

    return SystemModel(n=n, m=m, drift=drift, input_gain=input_gain,
                       name=f"linear_{n}x{m}")


def rk4_step(deriv, t: float, z: Array, h: float) -> Array:
    """One classical 4th-order Runge-Kutta step of size ``h`` from ``(t, z)``.

    ``deriv(t, z)`` must return the state derivative. Deterministic for
    identical inputs. Raises NumericalFailureError (carrying ``t`` and the
    offending state) if any stage derivative is non-finite.
    """
    if not (h > 0.0):
        raise ConfigurationError(f"step size h must be > 0, got {h}")
    z = np.asarray(z, dtype=float)
    half = 0.5 * h

    k1 = np.asarray(deriv(t, z), dtype=float)
    if not np.isfinite(k1).all():
        raise NumericalFailureError("non-finite derivative at stage 1", t=t, state=z)
    z2 = z + half * k1
    k2 = np.asarray(deriv(t + half, z2), dtype=float)
    if not np.isfinite(k2).all():
        raise NumericalFailureError("non-finite derivative at stage 2", t=t + half, state=z2)
    z3 = z + half * k2
    k3 = np.asarray(deriv(t + half, z3), dtype=float)
    if not np.isfinite(k3).all():
        raise NumericalFailureError("non-finite derivative at stage 3", t=t + half, state=z3)
    z4 = z + h * k3
    k4 = np.asarray(deriv(t + h, z4), dtype=float)
    if not np.isfinite(k4).all():
        raise NumericalFailureError("non-finite derivative at stage 4", t=t + h, state=z4)

    return z + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
