"""Feature maps for the critic and actor networks.

Every built-in basis ships an analytic gradient and vanishes at the origin,
so a fitted value function satisfies V(0) = 0 by construction. Feature
ordering is part of the public contract (see ``labels``), which keeps logged
weight vectors comparable across runs.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations_with_replacement
from typing import Callable

import math

import numpy as np

from .errors import ConfigurationError

Array = np.ndarray


@dataclass(frozen=True)
class BasisSet:
    """Feature map phi: R^dim_in -> R^dim_out with analytic gradient.

    ``eval(x)`` returns the feature vector, ``grad(x)`` the (dim_out, dim_in)
    Jacobian. Both are pure functions of x.
    """

    dim_in: int
    dim_out: int
    eval: Callable[[Array], Array]
    grad: Callable[[Array], Array]
    labels: tuple
    name: str = ""


def _monomial_label(idx_tuple, n) -> str:
    """Human-readable label for a monomial given its factor indices."""
    counts = {}
    for i in idx_tuple:
        counts[i] = counts.get(i, 0) + 1
    parts = []
    for i in sorted(counts):
        if counts[i] == 1:
            parts.append(f"x{i + 1}")
        else:
            parts.append(f"x{i + 1}^{counts[i]}")
    return "*".join(parts)


def quadratic_basis(n: int) -> BasisSet:
    """Symmetry-reduced quadratic monomials x_i x_j, i <= j, in lex order.

    Size n(n+1)/2. For n = 2 this is [x1^2, x1*x2, x2^2]. The full Kronecker
    square is deliberately avoided: its repeated cross terms make the
    regressor rank-deficient and break identifiability under excitation.
    """
    if n < 1:
        raise ConfigurationError(f"quadratic_basis needs n >= 1, got {n}")
    pairs = list(combinations_with_replacement(range(n), 2))
    i_idx = np.array([p[0] for p in pairs])
    j_idx = np.array([p[1] for p in pairs])
    N = len(pairs)
    rows = np.arange(N)

    def feat(x):
        return x[i_idx] * x[j_idx]

    def grad(x):
        G = np.zeros((N, n))
        np.add.at(G, (rows, i_idx), x[j_idx])
        np.add.at(G, (rows, j_idx), x[i_idx])
        return G

    labels = tuple(_monomial_label(p, n) for p in pairs)
    return BasisSet(dim_in=n, dim_out=N, eval=feat, grad=grad, labels=labels,
                    name="quadratic")


def case1_actor_basis() -> BasisSet:
    """Four-feature actor set [x1*cos(2x1), x1, x2*cos(2x1), x2] on R^2.

    Spans the benchmark's optimal policy exactly, so learning on the
    benchmark with this set is a pure parameter-estimation problem.
    """

    def feat(x):
        c = math.cos(2.0 * x[0])
        return np.array([x[0] * c, x[0], x[1] * c, x[1]])

    def grad(x):
        c = math.cos(2.0 * x[0])
        s = math.sin(2.0 * x[0])
        return np.array([
            [c - 2.0 * x[0] * s, 0.0],
            [1.0, 0.0],
            [-2.0 * x[1] * s, c],
            [0.0, 1.0],
        ])

    labels = ("x1*cos(2x1)", "x1", "x2*cos(2x1)", "x2")
    return BasisSet(dim_in=2, dim_out=4, eval=feat, grad=grad, labels=labels,
                    name="case1_actor")


def case2_actor_basis() -> BasisSet:
    """Ten-feature polynomial actor set [x1..x1^5, x2, x1*x2..x1^4*x2] on R^2."""

    def feat(x):
        x1, x2 = x[0], x[1]
        p2 = x1 * x1
        p3 = p2 * x1
        p4 = p3 * x1
        p5 = p4 * x1
        return np.array([x1, p2, p3, p4, p5, x2, x1 * x2, p2 * x2, p3 * x2, p4 * x2])

    def grad(x):
        x1, x2 = x[0], x[1]
        p2 = x1 * x1
        p3 = p2 * x1
        p4 = p3 * x1
        return np.array([
            [1.0, 0.0],
            [2.0 * x1, 0.0],
            [3.0 * p2, 0.0],
            [4.0 * p3, 0.0],
            [5.0 * p4, 0.0],
            [0.0, 1.0],
            [x2, x1],
            [2.0 * x1 * x2, p2],
            [3.0 * p2 * x2, p3],
            [4.0 * p3 * x2, p4],
        ])

    labels = ("x1", "x1^2", "x1^3", "x1^4", "x1^5",
              "x2", "x1*x2", "x1^2*x2", "x1^3*x2", "x1^4*x2")
    return BasisSet(dim_in=2, dim_out=10, eval=feat, grad=grad, labels=labels,
                    name="case2_actor")


def poly_basis(n: int, degree: int) -> BasisSet:
    """All monomials of total degree 1..degree in n variables.

    Within each degree, features follow combinations-with-replacement order,
    so poly(n, 2) lists the linear terms followed by the quadratic_basis
    ordering. Degree 1 is the plain linear feature map x -> x.
    """
    if n < 1 or degree < 1:
        raise ConfigurationError(
            f"poly_basis needs n >= 1 and degree >= 1, got n={n}, degree={degree}"
        )
    tuples = []
    for d in range(1, degree + 1):
        tuples.extend(combinations_with_replacement(range(n), d))
    # exponent matrix: E[k, i] = power of x_i in feature k
    E = np.zeros((len(tuples), n), dtype=int)
    for k, tup in enumerate(tuples):
        for i in tup:
            E[k, i] += 1
    N = len(tuples)

    if degree == 1:
        def feat(x):
            return np.asarray(x, dtype=float).copy()

        def grad(x):
            return np.eye(n)
    else:
        def feat(x):
            return np.prod(np.asarray(x, dtype=float) ** E, axis=1)

        def grad(x):
            x = np.asarray(x, dtype=float)
            G = np.empty((N, n))
            for i in range(n):
                Ei = E.copy()
                Ei[:, i] = np.maximum(Ei[:, i] - 1, 0)
                G[:, i] = E[:, i] * np.prod(x ** Ei, axis=1)
            return G

    labels = tuple(_monomial_label(tup, n) for tup in tuples)
    return BasisSet(dim_in=n, dim_out=N, eval=feat, grad=grad, labels=labels,
                    name=f"poly:{degree}")


def resolve_basis(name: str, n: int) -> BasisSet:
    """Look up a basis by its config-file name.

    Known names: "quadratic", "case1_actor", "case2_actor", "poly:<degree>".
    """
    if name == "quadratic":
        return quadratic_basis(n)
    if name == "case1_actor":
        if n != 2:
            raise ConfigurationError("case1_actor basis is defined on R^2 only")
        return case1_actor_basis()
    if name == "case2_actor":
        if n != 2:
            raise ConfigurationError("case2_actor basis is defined on R^2 only")
        return case2_actor_basis()
    if name.startswith("poly:"):
        try:
            degree = int(name.split(":", 1)[1])
        except ValueError:
            raise ConfigurationError(f"bad polynomial degree in basis name {name!r}")
        return poly_basis(n, degree)
    raise ConfigurationError(f"unknown basis name {name!r}")


def eval_basis(basis: BasisSet, x) -> Array:
    """Evaluate phi(x), checking the input dimension."""
    x = np.asarray(x, dtype=float)
    if x.shape != (basis.dim_in,):
        raise ConfigurationError(
            f"basis {basis.name!r} expects input of shape ({basis.dim_in},), "
            f"got {x.shape}"
        )
    return basis.eval(x)


def eval_basis_gradient(basis: BasisSet, x) -> Array:
    """Evaluate the Jacobian of phi at x, checking the input dimension."""
    x = np.asarray(x, dtype=float)
    if x.shape != (basis.dim_in,):
        raise ConfigurationError(
            f"basis {basis.name!r} expects input of shape ({basis.dim_in},), "
            f"got {x.shape}"
        )
    return basis.grad(x)


def quad_weights_from_matrix(P) -> Array:
    """Critic weights w with w . quadratic_basis(n)(x) = x' P x.

    Diagonal entries map directly; off-diagonal entries are doubled because
    the reduced basis carries each cross term once.
    """
    P = np.asarray(P, dtype=float)
    n = P.shape[0]
    if P.shape != (n, n):
        raise ConfigurationError(f"P must be square, got shape {P.shape}")
    w = []
    for i, j in combinations_with_replacement(range(n), 2):
        w.append(P[i, i] if i == j else P[i, j] + P[j, i])
    return np.array(w)


def matrix_from_quad_weights(w, n: int) -> Array:
    """Inverse of quad_weights_from_matrix: symmetric P from critic weights."""
    w = np.asarray(w, dtype=float)
    pairs = list(combinations_with_replacement(range(n), 2))
    if w.shape != (len(pairs),):
        raise ConfigurationError(
            f"expected {len(pairs)} weights for n={n}, got shape {w.shape}"
        )
    P = np.zeros((n, n))
    for w_k, (i, j) in zip(w, pairs):
        if i == j:
            P[i, i] = w_k
        else:
            P[i, j] = 0.5 * w_k
            P[j, i] = 0.5 * w_k
    return P
