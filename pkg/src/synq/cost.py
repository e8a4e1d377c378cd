"""Running cost r(x, u) = S(x) + u'Ru and validation of its positivity.

CostSpec construction checks only symmetry of R (cheap and always required);
positive definiteness and positivity of S over a region are established by
``validate_cost``, which the experiment harness runs at load time.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Tuple

import numpy as np

from .errors import ConfigurationError, NumericalFailureError
from .exploration import symmetric_eigen

Array = np.ndarray


@dataclass(frozen=True)
class CostSpec:
    """State cost S(x) plus quadratic input penalty u'Ru."""

    state_cost: Callable[[Array], float]
    R: Array
    name: str = ""

    def __post_init__(self):
        R = np.atleast_2d(np.asarray(self.R, dtype=float))
        if R.shape[0] != R.shape[1]:
            raise ConfigurationError(f"R must be square, got shape {R.shape}")
        if not np.allclose(R, R.T, rtol=0.0, atol=1e-12):
            raise ConfigurationError("R must be symmetric within 1e-12")
        object.__setattr__(self, "R", R)

    @property
    def m(self) -> int:
        return self.R.shape[0]


@dataclass(frozen=True)
class CostValidationReport:
    """Outcome of sampling-based positivity checks for a CostSpec."""

    r_cholesky_ok: bool
    min_state_cost_ratio: float
    state_cost_at_origin: float
    warnings: Tuple[str, ...]

    @property
    def passed(self) -> bool:
        return self.r_cholesky_ok


def quadratic_cost(Q, R) -> CostSpec:
    """CostSpec with S(x) = x'Qx."""
    Q = np.atleast_2d(np.asarray(Q, dtype=float))
    if Q.shape[0] != Q.shape[1]:
        raise ConfigurationError(f"Q must be square, got shape {Q.shape}")

    def state_cost(x):
        return float(x @ Q @ x)

    return CostSpec(state_cost=state_cost, R=R, name="quadratic")


def benchmark_cost() -> CostSpec:
    """The benchmark selection S(x) = x1^2 + x2^2, R = 1."""

    def state_cost(x):
        return x[0] * x[0] + x[1] * x[1]

    return CostSpec(state_cost=state_cost, R=np.array([[1.0]]), name="benchmark")


def running_cost(cost: CostSpec, x, u) -> float:
    """r(x, u) = S(x) + u'Ru. Raises NumericalFailureError on non-finite input."""
    x = np.asarray(x, dtype=float)
    u = np.atleast_1d(np.asarray(u, dtype=float))
    if not (np.isfinite(x).all() and np.isfinite(u).all()):
        raise NumericalFailureError("non-finite input to running_cost", state=x)
    return float(cost.state_cost(x)) + float(u @ cost.R @ u)


def validate_cost(cost: CostSpec, sample_region, samples: int = 1000,
                  seed: int = 0) -> CostValidationReport:
    """Check R > 0 (Cholesky) and sample S(x)/||x||^2 over a box.

    ``sample_region`` is (lo, hi) per state dimension. The unit axis vectors
    are probed first so a merely positive-semidefinite S is caught
    deterministically; the remaining points are drawn uniformly. An
    indefinite R raises ConfigurationError naming the offending eigenvalue;
    a vanishing S ratio or S(0) != 0 is reported as a warning, not an error.
    """
    lo, hi = (np.asarray(b, dtype=float) for b in sample_region)
    lo = np.atleast_1d(lo)
    hi = np.atleast_1d(hi)
    if lo.shape != hi.shape or np.any(lo >= hi):
        raise ConfigurationError("sample_region must be a nonempty box (lo, hi)")
    n = lo.size

    try:
        np.linalg.cholesky(cost.R)
        chol_ok = True
    except np.linalg.LinAlgError:
        eigs = symmetric_eigen(cost.R)
        raise ConfigurationError(
            f"input weight R is not positive definite: eigenvalue {eigs[0]:g} <= 0"
        )

    warnings = []
    s0 = float(cost.state_cost(np.zeros(n)))
    if s0 != 0.0:
        warnings.append(f"S(0) = {s0:g}, expected 0")

    rng = np.random.default_rng(seed)
    points = [np.eye(n)[i] * s for i in range(n) for s in (1.0, -1.0)]
    while len(points) < samples:
        x = lo + (hi - lo) * rng.random(n)
        if np.linalg.norm(x) > 1e-9:
            points.append(x)

    min_ratio = np.inf
    for x in points:
        ratio = float(cost.state_cost(x)) / float(x @ x)
        if ratio < min_ratio:
            min_ratio = ratio
    if min_ratio < 1e-12:
        warnings.append(
            f"state cost is not positive definite on the sampled region "
            f"(min S(x)/|x|^2 = {min_ratio:g})"
        )

    return CostValidationReport(
        r_cholesky_ok=chol_ok,
        min_state_cost_ratio=min_ratio,
        state_cost_at_origin=s0,
        warnings=tuple(warnings),
    )
