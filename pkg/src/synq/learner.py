"""Synchronous integral Q-learning core.

One coupled loop advances (i) the plant state under the current actor plus
the probing signal, (ii) cumulative integrals of the running cost and of the
exploration pairing term, and (iii) the stacked critic/actor weight vector.
Window quantities are differences of the cumulative integrals taken from a
ring buffer, so each step costs O(1) and the window is exactly aligned with
the integration grid. The plant moves by classical RK4 with weights frozen
within the step; the weight ODE

    Wdot = -alpha * delta * E / (1 + delta'delta)^2,   E = W'delta + rho

is advanced by explicit Euler at the same step (delta and E are history
functionals, unavailable at RK4 sub-stages). The effective discrete gain of
the weight update is therefore alpha * h.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .basis import BasisSet
from .cost import CostSpec
from .dynamics import SystemModel
from .errors import ConfigurationError, DivergenceError
from .exploration import ExplorationSignal, PEReport, _gram_report

Array = np.ndarray


class WeightState:
    """Critic and actor weights with a consistent stacked view.

    The stacked vector [w_c; rowvec(w_a)] is the single source of truth;
    ``w_c`` and ``w_a`` are writable views into it. Actor weights vectorize
    row-major so that pairing the stacked vector with the regressor block
    phi_a kron (R e) reproduces the scalar phi_a' w_a R e; for m = 1 the
    vectorization degenerates to the plain actor weight vector.
    """

    __slots__ = ("stacked", "n_c", "n_a", "m")

    def __init__(self, w_c, w_a):
        w_c = np.asarray(w_c, dtype=float).reshape(-1)
        w_a = np.asarray(w_a, dtype=float)
        if w_a.ndim == 1:
            w_a = w_a[:, None]
        if w_a.ndim != 2:
            raise ConfigurationError(f"w_a must be a vector or matrix, got ndim={w_a.ndim}")
        self.n_c = w_c.size
        self.n_a, self.m = w_a.shape
        self.stacked = np.concatenate([w_c, w_a.reshape(-1)])

    @classmethod
    def from_stacked(cls, stacked, n_c: int, n_a: int, m: int) -> "WeightState":
        stacked = np.asarray(stacked, dtype=float).reshape(-1)
        if stacked.size != n_c + n_a * m:
            raise ConfigurationError(
                f"stacked length {stacked.size} != n_c + n_a*m = {n_c + n_a * m}"
            )
        return cls(stacked[:n_c], stacked[n_c:].reshape(n_a, m))

    @property
    def w_c(self) -> Array:
        return self.stacked[: self.n_c]

    @property
    def w_a(self) -> Array:
        return self.stacked[self.n_c:].reshape(self.n_a, self.m)

    @property
    def dim(self) -> int:
        return self.stacked.size

    def copy(self) -> "WeightState":
        return WeightState.from_stacked(self.stacked.copy(), self.n_c, self.n_a, self.m)

    def __repr__(self) -> str:
        return f"WeightState(w_c={self.w_c!r}, w_a={self.w_a!r})"


@dataclass(frozen=True)
class RegressorSample:
    """Windowed quantities at time t.

    delta_c is the critic feature difference over [t-T, t], delta_a the
    integral of 2 phi_a kron (R e) over the window, rho the integral
    reinforcement (windowed running cost), and m_s the normalizer
    1 + delta'delta.
    """

    t: float
    delta_c: Array
    delta_a: Array
    rho: float
    delta: Array = field(init=False)
    m_s: float = field(init=False)

    def __post_init__(self):
        delta = np.concatenate([self.delta_c, self.delta_a])
        object.__setattr__(self, "delta", delta)
        object.__setattr__(self, "m_s", 1.0 + float(delta @ delta))


@dataclass
class LearnerConfig:
    """Episode parameters for the synchronous learner.

    T must be an exact integer multiple of the integrator step h. Weight
    updates start after the first full window unless
    ``hold_until_full_window`` is False, in which case the partial window
    [0, t] is used from the second step on. Caps abort the run (divergence
    is reported, never clipped); ``u_max``, when set, saturates the actor
    output only, never the probing signal.

    The excitation monitor integrates the normalized regressor over
    ``pe_window`` steps (default 40 sampling windows) and reports every
    ``pe_stride`` steps (default one report per monitor window). Grams over
    a single sampling window are numerically rank-deficient because
    consecutive regressor samples share almost all of their integration
    support, so the monitor horizon is deliberately longer.
    """

    alpha: float
    T: float
    h: float
    t_final: float
    x0: Array
    w_c0: Array
    w_a0: Array
    hold_until_full_window: bool = True
    state_cap: float = 50.0
    weight_cap: float = 100.0
    u_max: Optional[float] = None
    pe_window: Optional[int] = None
    pe_stride: Optional[int] = None
    log_stride: int = 1

    def __post_init__(self):
        self.x0 = np.asarray(self.x0, dtype=float).reshape(-1)
        self.w_c0 = np.asarray(self.w_c0, dtype=float).reshape(-1)
        self.w_a0 = np.asarray(self.w_a0, dtype=float)

    @property
    def window_steps(self) -> int:
        return int(round(self.T / self.h))

    def validate(self) -> None:
        if self.alpha < 0.0:
            raise ConfigurationError(f"learning rate alpha must be >= 0, got {self.alpha}")
        if not (self.h > 0.0):
            raise ConfigurationError(f"step h must be > 0, got {self.h}")
        if not (self.T > 0.0):
            raise ConfigurationError(f"window length T must be > 0, got {self.T}")
        k = self.T / self.h
        if abs(k - round(k)) > 1e-6 * max(1.0, k) or round(k) < 1:
            raise ConfigurationError(
                f"window length T={self.T} must be an integer multiple of h={self.h}"
            )
        if self.t_final < self.T:
            raise ConfigurationError(
                f"episode length t_final={self.t_final} must be >= T={self.T}"
            )
        if not (self.state_cap > 0.0 and self.weight_cap > 0.0):
            raise ConfigurationError("state and weight caps must be > 0")
        if self.u_max is not None and not (self.u_max > 0.0):
            raise ConfigurationError(f"u_max must be > 0 when set, got {self.u_max}")
        if self.log_stride < 1:
            raise ConfigurationError(f"log_stride must be >= 1, got {self.log_stride}")
        if self.pe_stride is not None and self.pe_stride < 1:
            raise ConfigurationError(f"pe_stride must be >= 1, got {self.pe_stride}")
        if self.pe_window is not None and self.pe_window < 1:
            raise ConfigurationError(f"pe_window must be >= 1, got {self.pe_window}")
        if not np.isfinite(self.x0).all():
            raise ConfigurationError("x0 must be finite")


class WindowBuffer:
    """Ring buffer of per-step (t, phi_c(x), cumulative cost, cumulative
    exploration pairing) holding exactly one window plus its endpoint."""

    def __init__(self, window_steps: int, n_c: int, n_am: int):
        if window_steps < 1:
            raise ConfigurationError(f"window_steps must be >= 1, got {window_steps}")
        self.window_steps = window_steps
        self.capacity = window_steps + 1
        self.t = np.zeros(self.capacity)
        self.phi_c = np.zeros((self.capacity, n_c))
        self.cum_cost = np.zeros(self.capacity)
        self.cum_pair = np.zeros((self.capacity, n_am))
        self.count = 0

    def push(self, t: float, phi_c_x: Array, cum_cost: float, cum_pair: Array) -> None:
        slot = self.count % self.capacity
        self.t[slot] = t
        self.phi_c[slot] = phi_c_x
        self.cum_cost[slot] = cum_cost
        self.cum_pair[slot] = cum_pair
        self.count += 1

    @property
    def full(self) -> bool:
        return self.count >= self.capacity

    @property
    def latest_time(self) -> float:
        if self.count == 0:
            raise ConfigurationError("buffer is empty")
        return float(self.t[(self.count - 1) % self.capacity])


def assemble_regressor(buffer: WindowBuffer, t: float) -> Optional[RegressorSample]:
    """Window-difference sample ending at time t, or None while the buffer
    has not yet seen a full window (not-ready is a signal, not an error)."""
    if buffer.count == 0:
        raise ConfigurationError("cannot assemble a regressor from an empty buffer")
    head = (buffer.count - 1) % buffer.capacity
    if abs(buffer.t[head] - t) > 1e-9:
        raise ConfigurationError(
            f"buffer head is at t={buffer.t[head]:g}, not the requested t={t:g}"
        )
    if not buffer.full:
        return None
    tail = buffer.count % buffer.capacity  # oldest slot, exactly one window back
    return RegressorSample(
        t=float(t),
        delta_c=buffer.phi_c[head] - buffer.phi_c[tail],
        delta_a=buffer.cum_pair[head] - buffer.cum_pair[tail],
        rho=float(buffer.cum_cost[head] - buffer.cum_cost[tail]),
    )


def bellman_residual(W: WeightState, sample: RegressorSample) -> float:
    """Windowed Bellman error E = W'delta + rho."""
    if W.dim != sample.delta.size:
        raise ConfigurationError(
            f"weight dimension {W.dim} != regressor dimension {sample.delta.size}"
        )
    return float(W.stacked @ sample.delta + sample.rho)


def weight_derivative(W: WeightState, sample: RegressorSample, alpha: float) -> Array:
    """Normalized-gradient tuning law: -alpha * delta * E / m_s^2.

    This is exactly -alpha times the gradient of K = E^2 / 2 with the
    normalization 1/m_s^2 applied, and algebraically equals
    -alpha * dbar * (dbar'W + rho / m_s) with dbar = delta / m_s.
    """
    E = bellman_residual(W, sample)
    return (-alpha * E / (sample.m_s * sample.m_s)) * sample.delta


def value_estimate(W: WeightState, phi_c: BasisSet, x) -> float:
    """Critic evaluation w_c . phi_c(x)."""
    x = np.asarray(x, dtype=float)
    if W.n_c != phi_c.dim_out:
        raise ConfigurationError(
            f"critic weights ({W.n_c}) do not match basis size ({phi_c.dim_out})"
        )
    return float(W.w_c @ phi_c.eval(x))


def policy_estimate(W: WeightState, phi_a: BasisSet, x) -> Array:
    """Actor evaluation w_a' phi_a(x), shape (m,)."""
    x = np.asarray(x, dtype=float)
    if W.n_a != phi_a.dim_out:
        raise ConfigurationError(
            f"actor weights ({W.n_a}) do not match basis size ({phi_a.dim_out})"
        )
    return phi_a.eval(x) @ W.w_a


@dataclass
class TrajectoryLog:
    """Time-indexed episode records plus a summary.

    Rows are logged every ``log_stride`` steps (the final step is always
    included). ``bellman`` and ``m_s`` are NaN before the first full window;
    ``beta1`` is NaN except at rows where a PE report was computed. ``u`` is
    the actor output (after saturation if enabled); the total plant input is
    u + e. ``cum_cost`` is the running integral of r from episode start.
    """

    t: Array
    x: Array
    u: Array
    e: Array
    weights: Array
    bellman: Array
    m_s: Array
    beta1: Array
    cum_cost: Array
    pe_reports: List[PEReport]
    weight_labels: tuple
    summary: dict

    @property
    def n(self) -> int:
        return self.x.shape[1]

    @property
    def m(self) -> int:
        return self.u.shape[1]

    @property
    def final_weights(self) -> Array:
        return self.weights[-1]


def _weight_labels(phi_c: BasisSet, phi_a: BasisSet, m: int) -> tuple:
    labels = [f"wc_{lab}" for lab in phi_c.labels]
    for lab in phi_a.labels:
        if m == 1:
            labels.append(f"wa_{lab}")
        else:
            labels.extend(f"wa_{lab}_u{j + 1}" for j in range(m))
    return tuple(labels)


def run_episode(model: SystemModel, cost: CostSpec, phi_c: BasisSet,
                phi_a: BasisSet, expl: ExplorationSignal,
                cfg: LearnerConfig) -> TrajectoryLog:
    """Run one synchronous-learning episode and return its log.

    Raises DivergenceError (carrying the last valid record and the partial
    log) if the state or weights go non-finite or exceed the configured
    caps, and ConfigurationError for dimension or stepping inconsistencies.
    """
    cfg.validate()
    n, m = model.n, model.m
    if phi_c.dim_in != n or phi_a.dim_in != n:
        raise ConfigurationError(
            f"basis input dimensions ({phi_c.dim_in}, {phi_a.dim_in}) "
            f"do not match the state dimension {n}"
        )
    if cost.m != m:
        raise ConfigurationError(f"cost R is {cost.m}x{cost.m} but the model has m={m}")
    if expl.channels != m:
        raise ConfigurationError(
            f"exploration signal has {expl.channels} channels but the model has m={m}"
        )
    if cfg.x0.size != n:
        raise ConfigurationError(f"x0 has length {cfg.x0.size}, expected {n}")

    weights = WeightState(cfg.w_c0, cfg.w_a0)
    if weights.n_c != phi_c.dim_out:
        raise ConfigurationError(
            f"w_c0 has length {weights.n_c}, critic basis has {phi_c.dim_out}"
        )
    if weights.n_a != phi_a.dim_out or weights.m != m:
        raise ConfigurationError(
            f"w_a0 has shape ({weights.n_a}, {weights.m}), "
            f"expected ({phi_a.dim_out}, {m})"
        )

    start_time = time.perf_counter()
    h = cfg.h
    K = cfg.window_steps
    steps = int(round(cfg.t_final / h))
    n_c = phi_c.dim_out
    n_am = phi_a.dim_out * m
    dim = n_c + n_am
    stacked = weights.stacked
    w_a_view = stacked[n_c:].reshape(phi_a.dim_out, m)
    alpha = cfg.alpha
    R = cost.R
    u_max = cfg.u_max
    state_cost = cost.state_cost
    drift = model.drift
    gain = model.input_gain
    phi_a_eval = phi_a.eval
    phi_c_eval = phi_c.eval
    e_eval = expl.eval
    pe_window = cfg.pe_window if cfg.pe_window is not None else 40 * K
    pe_stride = cfg.pe_stride if cfg.pe_stride is not None else pe_window
    log_stride = cfg.log_stride
    half_h = 0.5 * h
    sixth_h = h / 6.0

    if m == 1:
        # scalar-input fast path: identical arithmetic, no matrix temporaries
        R00 = float(R[0, 0])
        w_a_flat = stacked[n_c:]
        e_scalar = expl.scalar_eval_fn()

        def aug_deriv(t, z):
            # z = [x, cumulative cost, cumulative exploration pairing]
            xs = z[:n]
            fa = phi_a_eval(xs)
            mu = fa @ w_a_flat
            if u_max is not None and not -u_max <= mu <= u_max:
                mu = u_max if mu > u_max else -u_max
            ev = e_scalar(t)
            out = np.empty(n + 1 + n_am)
            out[:n] = drift(xs) + gain(xs)[:, 0] * (mu + ev)
            out[n] = state_cost(xs) + R00 * mu * mu
            out[n + 1:] = (2.0 * R00 * ev) * fa
            return out
    else:
        def aug_deriv(t, z):
            xs = z[:n]
            fa = phi_a_eval(xs)
            mu = fa @ w_a_view
            if u_max is not None:
                mu = np.clip(mu, -u_max, u_max)
            ev = e_eval(t)
            out = np.empty(n + 1 + n_am)
            out[:n] = drift(xs) + gain(xs) @ (mu + ev)
            out[n] = state_cost(xs) + mu @ R @ mu
            out[n + 1:] = 2.0 * np.outer(fa, R @ ev).reshape(-1)
            return out

    ring = WindowBuffer(K, n_c, n_am)
    dbar_ring = np.zeros((pe_window, dim))

    n_rows = steps // log_stride + 1 + (1 if steps % log_stride else 0)
    log_t = np.zeros(n_rows)
    log_x = np.zeros((n_rows, n))
    log_u = np.zeros((n_rows, m))
    log_e = np.zeros((n_rows, m))
    log_w = np.zeros((n_rows, dim))
    log_E = np.full(n_rows, np.nan)
    log_ms = np.full(n_rows, np.nan)
    log_b1 = np.full(n_rows, np.nan)
    log_cc = np.zeros(n_rows)
    pe_reports: List[PEReport] = []
    row = 0
    max_state_norm = 0.0
    max_weight_norm = float(np.linalg.norm(stacked))

    z = np.concatenate([cfg.x0, [0.0], np.zeros(n_am)])

    def partial_log(rows_filled):
        return TrajectoryLog(
            t=log_t[:rows_filled].copy(), x=log_x[:rows_filled].copy(),
            u=log_u[:rows_filled].copy(), e=log_e[:rows_filled].copy(),
            weights=log_w[:rows_filled].copy(), bellman=log_E[:rows_filled].copy(),
            m_s=log_ms[:rows_filled].copy(), beta1=log_b1[:rows_filled].copy(),
            cum_cost=log_cc[:rows_filled].copy(), pe_reports=list(pe_reports),
            weight_labels=_weight_labels(phi_c, phi_a, m),
            summary={"completed": False},
        )

    for i in range(steps + 1):
        t = i * h
        xs = z[:n]
        cum_cost = float(z[n])
        cum_pair = z[n + 1:]
        fc = phi_c_eval(xs)
        ring.push(t, fc, cum_cost, cum_pair)

        state_norm = math.sqrt(float(xs @ xs))
        if state_norm > max_state_norm:
            max_state_norm = state_norm

        # window difference against the slot exactly one window back (or the
        # initial slot, for the optional partial-window startup)
        delta = None
        E = math.nan
        ms = math.nan
        if i >= K:
            tail = ring.count % ring.capacity
        elif not cfg.hold_until_full_window and i >= 1:
            tail = 0
        else:
            tail = None
        if tail is not None:
            delta = np.concatenate([fc - ring.phi_c[tail],
                                    cum_pair - ring.cum_pair[tail]])
            rho = cum_cost - ring.cum_cost[tail]
            ms = 1.0 + float(delta @ delta)
            E = float(stacked @ delta) + rho
            if i >= K:
                dbar_ring[i % pe_window] = delta / ms
                if i >= K + pe_window and i % pe_stride == 0:
                    G = (dbar_ring.T @ dbar_ring) * h
                    report = _gram_report(G, window_start=(i - pe_window) * h,
                                          window_end=t)
                    pe_reports.append(report)

        logged = (i % log_stride == 0) or (i == steps)
        if logged:
            fa = phi_a_eval(xs)
            mu = fa @ w_a_view
            if u_max is not None:
                mu = np.clip(mu, -u_max, u_max)
            log_t[row] = t
            log_x[row] = xs
            log_u[row] = mu
            log_e[row] = e_eval(t)
            log_w[row] = stacked
            log_E[row] = E
            log_ms[row] = ms
            log_cc[row] = cum_cost
            if pe_reports and i >= K + pe_window and i % pe_stride == 0:
                log_b1[row] = pe_reports[-1].beta1
            row += 1

        if i == steps:
            break

        # classical RK4 on the augmented state, inlined; non-finite stage
        # output propagates into z_new and is caught below
        try:
            k1 = aug_deriv(t, z)
            k2 = aug_deriv(t + half_h, z + half_h * k1)
            k3 = aug_deriv(t + half_h, z + half_h * k2)
            k4 = aug_deriv(t + h, z + h * k3)
        except FloatingPointError as err:
            raise DivergenceError(
                f"non-finite dynamics at t={t:g}: {err}",
                t=t, state=xs.copy(), weights=stacked.copy(),
                partial_log=partial_log(row),
            ) from err
        z_new = z + sixth_h * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.isfinite(z_new).all():
            raise DivergenceError(
                f"state integration produced non-finite values at t={t + h:g}",
                t=t, state=xs.copy(), weights=stacked.copy(),
                partial_log=partial_log(row),
            )
        new_norm = math.sqrt(float(z_new[:n] @ z_new[:n]))
        if new_norm > cfg.state_cap:
            raise DivergenceError(
                f"state norm {new_norm:g} exceeded cap {cfg.state_cap:g} at t={t + h:g}",
                t=t, state=xs.copy(), weights=stacked.copy(),
                partial_log=partial_log(row),
            )

        if delta is not None and alpha != 0.0:
            stacked += (h * -alpha * E / (ms * ms)) * delta
            wnorm = math.sqrt(float(stacked @ stacked))
            if not np.isfinite(stacked).all() or wnorm > cfg.weight_cap:
                raise DivergenceError(
                    f"weight norm {wnorm:g} exceeded cap {cfg.weight_cap:g} "
                    f"at t={t + h:g}",
                    t=t, state=xs.copy(), weights=stacked.copy(),
                    partial_log=partial_log(row),
                )
            if wnorm > max_weight_norm:
                max_weight_norm = wnorm
        z = z_new

    wall_time = time.perf_counter() - start_time
    final = WeightState.from_stacked(stacked.copy(), n_c, phi_a.dim_out, m)
    explore_b1 = [r.beta1 for r in pe_reports if r.window_end <= expl.active_until]
    summary = {
        "completed": True,
        "model": model.name,
        "seed": expl.seed,
        "alpha": alpha,
        "T": cfg.T,
        "h": h,
        "t_final": steps * h,
        "steps": steps,
        "window_steps": K,
        "final_w_c": final.w_c.tolist(),
        "final_w_a": final.w_a.tolist(),
        "max_state_norm": max_state_norm,
        "max_weight_norm": max_weight_norm,
        "caps": {
            "state_cap": cfg.state_cap,
            "weight_cap": cfg.weight_cap,
            "ok": True,
        },
        "pe": {
            "reports": len(pe_reports),
            "beta1_min": min((r.beta1 for r in pe_reports), default=None),
            "beta1_min_explore": min(explore_b1, default=None),
            "beta1_median_explore": (float(np.median(explore_b1))
                                     if explore_b1 else None),
        },
        "wall_time_s": wall_time,
    }
    return TrajectoryLog(
        t=log_t[:row], x=log_x[:row], u=log_u[:row], e=log_e[:row],
        weights=log_w[:row], bellman=log_E[:row], m_s=log_ms[:row],
        beta1=log_b1[:row], cum_cost=log_cc[:row], pe_reports=pe_reports,
        weight_labels=_weight_labels(phi_c, phi_a, m), summary=summary,
    )
