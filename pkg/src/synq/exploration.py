"""Probing-signal generation and persistence-of-excitation measurement.

The probing signal is a frozen sum of sinusoids per input channel: the
frequencies are drawn once at construction from a seeded generator and never
re-randomized, so a given (seed, count, range) triple always produces the
same signal. Excitation is monitored, never enforced: ``pe_gram`` reports
the extreme eigenvalues of the windowed Gram matrix of the normalized
regressor, and it is up to the harness to flag windows whose smallest
eigenvalue falls below a threshold. No verifiable construction guarantees
excitation for nonlinear problems, so a monitor is the honest tool.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .errors import ConfigurationError, SolverError

Array = np.ndarray


@dataclass(frozen=True)
class ExplorationSignal:
    """Per-channel sum of sinusoids, active until a fixed cutoff time.

    e_j(t) = amplitudes[j] * sum_k sin(frequencies[j, k] * t + phases[j, k])
    for t < active_until, and exactly zero afterwards. Bounded by
    sum over channels of |amplitude| * count.
    """

    frequencies: Array   # (channels, count), rad/s
    amplitudes: Array    # (channels,)
    phases: Array        # (channels, count), rad
    active_until: float
    seed: Optional[int] = None

    def __post_init__(self):
        freqs = np.atleast_2d(np.asarray(self.frequencies, dtype=float))
        phases = np.atleast_2d(np.asarray(self.phases, dtype=float))
        amps = np.atleast_1d(np.asarray(self.amplitudes, dtype=float))
        if freqs.shape != phases.shape:
            raise ConfigurationError("frequencies and phases must have equal shape")
        if amps.shape != (freqs.shape[0],):
            raise ConfigurationError("need one amplitude per channel")
        object.__setattr__(self, "frequencies", freqs)
        object.__setattr__(self, "phases", phases)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def channels(self) -> int:
        return self.frequencies.shape[0]

    def eval(self, t: float) -> Array:
        """Signal value at time t, shape (channels,)."""
        if t >= self.active_until:
            return np.zeros(self.channels)
        return self.amplitudes * np.sin(self.frequencies * t + self.phases).sum(axis=1)

    def scalar_eval_fn(self):
        """Float-valued evaluator for single-channel signals (hot loops).

        Matches eval(t)[0] bit for bit: same contiguous summation order,
        same scalar multiply.
        """
        if self.channels != 1:
            raise ConfigurationError("scalar evaluator requires a 1-channel signal")
        freqs = self.frequencies[0]
        phases = self.phases[0]
        amp = float(self.amplitudes[0])
        cutoff = self.active_until

        def eval_scalar(t: float) -> float:
            if t >= cutoff:
                return 0.0
            return amp * np.sin(freqs * t + phases).sum()

        return eval_scalar

    def bound(self) -> float:
        """Triangle-inequality bound on the euclidean norm of e(t)."""
        per_channel = np.abs(self.amplitudes) * self.frequencies.shape[1]
        return float(np.linalg.norm(per_channel))


def make_sinusoid_sum(count: int, freq_range, seed: Optional[int],
                      active_until: float, amplitude: float = 1.0,
                      channels: int = 1) -> ExplorationSignal:
    """Sum of ``count`` sinusoids per channel with frequencies ~ U[lo, hi].

    Phases are zero, so e(0) = 0. The draw is reproducible for a given seed;
    each channel consumes its own frequencies from the same stream.
    """
    if count < 1:
        raise ConfigurationError(f"need at least one sinusoid, got count={count}")
    lo, hi = (float(v) for v in freq_range)
    if not lo < hi:
        raise ConfigurationError(f"freq_range must satisfy lo < hi, got [{lo}, {hi}]")
    if channels < 1:
        raise ConfigurationError(f"need channels >= 1, got {channels}")
    rng = np.random.default_rng(seed)
    freqs = lo + (hi - lo) * rng.random((channels, count))
    return ExplorationSignal(
        frequencies=freqs,
        amplitudes=np.full(channels, float(amplitude)),
        phases=np.zeros((channels, count)),
        active_until=float(active_until),
        seed=seed,
    )


def no_exploration(channels: int = 1) -> ExplorationSignal:
    """Identically-zero probing signal."""
    return ExplorationSignal(
        frequencies=np.zeros((channels, 1)),
        amplitudes=np.zeros(channels),
        phases=np.zeros((channels, 1)),
        active_until=0.0,
        seed=None,
    )


@dataclass(frozen=True)
class PEReport:
    """Extreme eigenvalues of a windowed Gram matrix of the regressor."""

    window_start: float
    window_end: float
    beta1: float
    beta2: float
    gram_dim: int


def symmetric_eigen(M, tol: float = 1e-12) -> Array:
    """Eigenvalues of a small dense symmetric matrix, sorted ascending.

    Cyclic Jacobi sweeps run until the off-diagonal Frobenius norm drops
    below ``tol`` (or no rotation makes progress, i.e. machine precision).
    Intended for dimensions up to 64; asymmetric input is rejected.
    """
    A = np.atleast_2d(np.asarray(M, dtype=float))
    n = A.shape[0]
    if A.shape != (n, n):
        raise ConfigurationError(f"matrix must be square, got shape {A.shape}")
    if n > 64:
        raise ConfigurationError(f"symmetric_eigen supports dimension <= 64, got {n}")
    if not np.allclose(A, A.T, rtol=0.0, atol=1e-10):
        raise ConfigurationError("matrix is not symmetric within 1e-10")
    A = 0.5 * (A + A.T)
    if n == 1:
        return A[0, :1].copy()

    for _ in range(100):
        off_sq = (A * A).sum() - (np.diag(A) ** 2).sum()
        if off_sq < tol * tol:
            break
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                # skip rotations that cannot change the matrix in float64
                if abs(apq) <= 1e-18 * (abs(A[p, p]) + abs(A[q, q]) + 1e-300):
                    continue
                tau = (A[q, q] - A[p, p]) / (2.0 * apq)
                if tau >= 0.0:
                    t = 1.0 / (tau + math.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                col_p = A[:, p].copy()
                col_q = A[:, q].copy()
                A[:, p] = c * col_p - s * col_q
                A[:, q] = s * col_p + c * col_q
                row_p = A[p, :].copy()
                row_q = A[q, :].copy()
                A[p, :] = c * row_p - s * row_q
                A[q, :] = s * row_p + c * row_q
                A[p, q] = 0.0
                A[q, p] = 0.0
                rotated = True
        if not rotated:
            break
    else:
        raise SolverError("Jacobi sweeps did not reach the off-diagonal tolerance")

    return np.sort(np.diag(A).copy())


def _gram_report(G: Array, window_start: float, window_end: float) -> PEReport:
    eigs = symmetric_eigen(G)
    beta1 = float(eigs[0])
    beta2 = float(eigs[-1])
    # Gram matrices are PSD by construction; clamp eigenvalue roundoff only.
    if beta1 < 0.0:
        if beta1 < -1e-10:
            raise SolverError(f"Gram matrix unexpectedly indefinite (beta1={beta1:g})")
        beta1 = 0.0
    if beta2 < 0.0:
        beta2 = 0.0
    return PEReport(window_start=window_start, window_end=window_end,
                    beta1=beta1, beta2=beta2, gram_dim=G.shape[0])


def pe_gram(samples: Sequence[Tuple[Array, float]],
            window_start: Optional[float] = None,
            window_end: Optional[float] = None) -> PEReport:
    """Left-Riemann Gram matrix of normalized regressor samples.

    ``samples`` is a sequence of (delta_bar, dtau) pairs logged at step
    resolution; the Gram is sum of outer(delta_bar, delta_bar) * dtau, so the
    result does not depend on sample order. Window times default to
    [0, sum dtau].
    """
    samples = list(samples)
    if not samples:
        raise ConfigurationError("pe_gram needs at least one sample")
    first = np.asarray(samples[0][0], dtype=float)
    dim = first.size
    G = np.zeros((dim, dim))
    total = 0.0
    for vec, dtau in samples:
        v = np.asarray(vec, dtype=float)
        if v.shape != (dim,):
            raise ConfigurationError("all regressor samples must share one dimension")
        G += np.outer(v, v) * dtau
        total += dtau
    if window_start is None:
        window_start = 0.0
    if window_end is None:
        window_end = window_start + total
    return _gram_report(G, float(window_start), float(window_end))
