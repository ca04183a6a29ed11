"""
Quadrature representation of the deformed oscillator.

The polynomials ``J_n`` obey

    J_{n+1} = ( 2X/sqrt(1+q^2) J_n - sqrt([n]) J_{n-1} ) / sqrt([n+1]),

i.e. they are orthonormal for the spectral measure of the Jacobi operator
with zero diagonal and off-diagonal ``b_n = sqrt(1+q^2)/2 sqrt([n])``.
That measure is the continuous q-Hermite weight in base ``p = q^2``
stretched onto ``(-L, L)``; it is the vacuum quadrature density.

Gauss rules for it come from Golub-Welsch on the same Jacobi matrix.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, eigh_tridiagonal

from . import qmath
from .errors import EigenFailure, InvalidParameter
from .qmath import DeformationParam


def eval_J(n_max: int, X, d: DeformationParam) -> np.ndarray:
    """Values ``J_0(X) .. J_{n_max}(X)``.

    Returns an array of shape ``(n_max + 1,) + np.shape(X)``.
    """
    X = np.asarray(X, dtype=float)
    out = np.empty((n_max + 1,) + X.shape)
    out[0] = 1.0
    if n_max == 0:
        return out
    sq = np.sqrt(qmath.q_ints(n_max, d))
    y = (2.0 / math.sqrt(1.0 + d.p)) * X
    out[1] = y
    for n in range(1, n_max):
        out[n + 1] = (y * out[n] - sq[n] * out[n - 1]) / sq[n + 1]
    return out


def jacobi_offdiag(order: int, d: DeformationParam) -> np.ndarray:
    """Off-diagonal ``b_1 .. b_{order-1}`` of the Jacobi matrix."""
    return 0.5 * math.sqrt(1.0 + d.p) * np.sqrt(qmath.q_ints(order - 1, d)[1:])


def support_bound(d: DeformationParam) -> float:
    """Half-width L of the support of the vacuum quadrature density."""
    return d.L


def vacuum_density(X, d: DeformationParam, tol: float = 1e-16):
    """Vacuum quadrature density ``|Psi_0(X)|^2``; zero outside ``(-L, L)``.

    With ``X = L cos(t)`` the density is

        (p;p)_inf / (2 pi L) * |(e^{2it}; p)_inf|^2 / sin(t).

    The leading factor ``|1 - e^{2it}|^2 = 4 sin^2 t`` is split off so the
    expression stays finite at the endpoints, and the products are summed in
    log scale since they under/overflow separately as q -> 1.
    """
    scalar = np.ndim(X) == 0
    X = np.atleast_1d(np.asarray(X, dtype=float))
    out = np.zeros(X.shape)
    inside = np.abs(X) < d.L
    if np.any(inside):
        t = np.arccos(X[inside] / d.L)
        log_rest = qmath.q_pochhammer_inf_logabs(d.p * np.exp(2j * t), d.p, tol)
        log_pp = qmath.q_pochhammer_inf_logabs(d.p, d.p, tol)
        out[inside] = (2.0 / (math.pi * d.L)) * np.sin(t) * np.exp(log_pp + 2.0 * log_rest)
    return float(out[0]) if scalar else out


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Gauss rule for the vacuum density: ``sum w_k f(X_k) ~ int f |Psi_0|^2 dX``."""

    d: DeformationParam
    nodes: np.ndarray
    weights: np.ndarray

    @property
    def order(self) -> int:
        return self.nodes.size

    @property
    def exact_degree(self) -> int:
        return 2 * self.order - 1

    def integrate(self, values: np.ndarray) -> np.ndarray:
        """Apply the rule along the last axis of ``values`` sampled at the nodes."""
        return np.asarray(values) @ self.weights


@functools.lru_cache(maxsize=64)
def _gauss_rule_cached(q: float, order: int) -> QuadratureRule:
    d = DeformationParam(q)
    if order == 1:
        nodes, weights = np.zeros(1), np.ones(1)
    else:
        try:
            nodes, vecs = eigh_tridiagonal(np.zeros(order), jacobi_offdiag(order, d))
        except LinAlgError as exc:  # pragma: no cover - LAPACK failure
            raise EigenFailure(f"tridiagonal eigensolver failed for q={q}, order={order}") from exc
        weights = vecs[0] ** 2
        # the measure is even; enforce exact mirror symmetry
        nodes = 0.5 * (nodes - nodes[::-1])
        weights = 0.5 * (weights + weights[::-1])
        weights = weights / weights.sum()
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return QuadratureRule(d, nodes, weights)


def gauss_rule(d: DeformationParam, order: int) -> QuadratureRule:
    """Golub-Welsch rule with ``order`` nodes, exact to polynomial degree ``2*order-1``."""
    if order < 1:
        raise InvalidParameter("order must be at least 1")
    return _gauss_rule_cached(d.q, int(order))


def rule_for_degree(d: DeformationParam, degree: int) -> QuadratureRule:
    """Default rule for integrands whose polynomial part has the given degree."""
    return gauss_rule(d, max(8, 4 * degree))


def dense_integrate(f, d: DeformationParam, n_points: int = 4000) -> np.ndarray:
    """``int f(X) |Psi_0(X)|^2 dX`` by the midpoint rule in ``t = arccos(X/L)``.

    Independent of the Gauss rule: it samples the closed-form density on a
    fine grid.  ``f`` maps an array of X to an array whose last axis runs
    over X.
    """
    t = (np.arange(n_points) + 0.5) * (math.pi / n_points)
    X = d.L * np.cos(t)
    dens = vacuum_density(X, d)
    jac = d.L * np.sin(t) * (math.pi / n_points)
    return np.asarray(f(X)) @ (dens * jac)


def orthonormality_error(n_max: int, d: DeformationParam, rule: QuadratureRule | None = None, dense_points: int | None = None) -> float:
    """Max deviation of the Gram matrix of ``J_0..J_{n_max}`` from the identity.

    Uses ``rule`` if given, otherwise dense integration.
    """
    if rule is not None:
        J = eval_J(n_max, rule.nodes, d)
        gram = (J * rule.weights) @ J.T
    else:
        gram = dense_integrate(
            lambda X: np.einsum("mx,nx->mnx", eval_J(n_max, X, d), eval_J(n_max, X, d)),
            d,
            dense_points or 4000,
        )
    return float(np.max(np.abs(gram - np.eye(n_max + 1))))
