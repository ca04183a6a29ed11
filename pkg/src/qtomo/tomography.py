"""
Optical tomograms of deformed states.

``omega(X, theta)`` is the density of the rotated quadrature.  In the
deformed number basis ``<X_theta|n> = e^{-i n theta} J_n(X) Psi_0(X)``, so
every tomogram is the vacuum density times a polynomial in X (its
"reduced" part).  Keeping that factorization explicit lets the moment
extraction integrate exactly with Gauss rules.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from . import qmath
from .fock import DEFAULT_TRUNC_EPS, DensityMatrix, FockState, MomentTable
from .quadrature import QuadratureRule, eval_J, gauss_rule, vacuum_density
from .qmath import DeformationParam
from .states import StateSpec, build_state

log = logging.getLogger(__name__)


def _grid_shape(theta, X):
    return np.shape(theta) + np.shape(X)


class Tomogram:
    """``omega(theta, X)`` for a FockState, DensityMatrix or MomentTable.

    Calling the object returns the tomogram on the outer product of
    ``theta`` and ``X`` (shape ``theta.shape + X.shape``).  ``reduced`` gives
    the same values divided by the vacuum density, which is a polynomial of
    degree ``self.degree`` in X.
    """

    def __init__(self, source, gamma_max: int | None = None):
        if not isinstance(source, (FockState, DensityMatrix, MomentTable)):
            raise TypeError(f"cannot build a tomogram from {type(source).__name__}")
        self.source = source
        self.d: DeformationParam = source.d
        if isinstance(source, (FockState, DensityMatrix)):
            self.degree = 2 * source.cutoff
        else:
            self.gamma_max = source.gamma_max if gamma_max is None else gamma_max
            source.require_complete(self.gamma_max)
            self.degree = self.gamma_max
            self._coeffs = _moment_coeffs(source, self.gamma_max)

    def reduced(self, theta, X) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        X = np.asarray(X, dtype=float)
        src = self.source
        if isinstance(src, FockState):
            N = src.cutoff
            J = eval_J(N, X, self.d)
            ph = np.exp(-1j * np.multiply.outer(theta, np.arange(N + 1))) * src.amps
            amp = np.tensordot(ph, J, axes=(-1, 0))
            return np.abs(amp) ** 2
        if isinstance(src, DensityMatrix):
            N = src.cutoff
            J = eval_J(N, X, self.d)
            ph = np.exp(-1j * np.multiply.outer(theta, np.arange(N + 1)))
            # u_n = e^{-i n theta} J_n(X);  omega/W = u^T rho conj(u)
            u = np.einsum("...n,nx->...nx", ph, J.reshape(N + 1, -1))
            val = np.einsum("...nx,nm,...mx->...x", u, src.mat, u.conj())
            imag = float(np.max(np.abs(val.imag))) if val.size else 0.0
            if imag > 1e-10:
                log.warning("tomogram_density: imaginary residue %.3g discarded", imag)
            return val.real.reshape(_grid_shape(theta, X))
        # moment table: sum_gamma J_gamma(X) * S_gamma(theta)
        G = self.gamma_max
        J = eval_J(G, X, self.d)
        S = np.zeros(theta.shape + (G + 1,), dtype=complex)
        for g in range(G + 1):
            a = np.arange(g + 1)
            ph = np.exp(1j * np.multiply.outer(theta, 2 * a - g))
            S[..., g] = ph @ self._coeffs[g]
        val = np.tensordot(S, J, axes=(-1, 0))
        return val.real

    def __call__(self, theta, X):
        out = self.reduced(theta, X) * vacuum_density(np.atleast_1d(X), self.d).reshape(np.shape(X))
        return float(out) if out.ndim == 0 else out


def _moment_coeffs(t: MomentTable, gamma_max: int) -> list[np.ndarray]:
    # coefficient sqrt([g]!)/([a]![g-a]!) * t(a, g-a) for each order g
    lf = qmath.log_q_factorials(gamma_max, t.d)
    out = []
    for g in range(gamma_max + 1):
        a = np.arange(g + 1)
        scale = np.exp(0.5 * lf[g] - lf[a] - lf[g - a])
        out.append(scale * np.array([t[int(i), g - int(i)] for i in a]))
    return out


def tomogram_pure(s: FockState, theta, X):
    """``W(X) |sum_n c_n e^{-i n theta} J_n(X)|^2``."""
    return Tomogram(s)(theta, X)


def tomogram_density(rho: DensityMatrix, theta, X):
    """``W(X) sum_{n,m} rho_{nm} J_n J_m e^{i(m-n) theta}``, real part."""
    return Tomogram(rho)(theta, X)


def tomogram_from_moments(t: MomentTable, theta, X, gamma_max: int | None = None):
    """Tomogram as a series in normally ordered moments, truncated at total order ``gamma_max``."""
    return Tomogram(t, gamma_max)(theta, X)


@dataclass(frozen=True, eq=False)
class TomogramGrid:
    """Tomogram sampled on ``thetas x xs``; ``values[i, j] = omega(xs[j], thetas[i])``.

    ``x_kind`` is ``"gauss"`` when ``xs`` are the nodes of the Gauss rule of
    order ``len(xs)`` (then ``weights`` holds its weights) and ``"uniform"``
    for an open uniform grid on ``(-L, L)``.
    """

    d: DeformationParam
    thetas: np.ndarray
    xs: np.ndarray
    values: np.ndarray
    x_kind: str = "uniform"
    weights: np.ndarray | None = None
    provenance: dict = field(default_factory=dict)

    def normalization(self) -> np.ndarray:
        """Integral of omega over X for each theta row."""
        if self.x_kind == "gauss":
            W = vacuum_density(self.xs, self.d)
            return (self.values / W) @ self.weights
        return np.trapezoid(self.values, self.xs, axis=1)

    def reflection_error(self) -> float:
        """Max of ``|omega(-X, theta+pi) - omega(X, theta)|`` over the grid."""
        n = self.thetas.size
        if n % 2 or not np.allclose(self.xs, -self.xs[::-1], atol=1e-13):
            raise ValueError("reflection check needs an even theta count and a symmetric X grid")
        shifted = np.roll(self.values, -n // 2, axis=0)[:, ::-1]
        return float(np.max(np.abs(shifted - self.values)))

    def pi_periodicity_error(self) -> float:
        n = self.thetas.size
        if n % 2:
            raise ValueError("pi-periodicity check needs an even theta count")
        return float(np.max(np.abs(np.roll(self.values, -n // 2, axis=0) - self.values)))

    def peak(self) -> float:
        return float(self.values.max())


def x_grid(d: DeformationParam, n_x: int, kind: str = "gauss"):
    """X sample points (and Gauss weights, if any) on ``(-L, L)``."""
    if kind == "gauss":
        rule = gauss_rule(d, n_x)
        return rule.nodes, rule.weights
    if kind == "uniform":
        # open grid: cell midpoints, never touching +-L
        h = 2 * d.L / n_x
        xs = -d.L + h * (np.arange(n_x) + 0.5)
        return 0.5 * (xs - xs[::-1]), None
    raise ValueError(f"unknown X grid kind {kind!r}")


def make_grid(
    source,
    n_theta: int,
    n_x: int,
    d: DeformationParam | None = None,
    x_kind: str = "gauss",
    eps_trunc: float = DEFAULT_TRUNC_EPS,
    gamma_max: int | None = None,
) -> TomogramGrid:
    """Sample a tomogram on a uniform theta grid over ``[0, 2 pi)``.

    ``source`` may be a StateSpec (built at ``d``), a FockState, a
    DensityMatrix or a MomentTable.
    """
    if n_theta < 2 or n_x < 2:
        raise ValueError("grid needs at least 2 points along each axis")
    if isinstance(source, StateSpec):
        if d is None:
            raise ValueError("a StateSpec needs the deformation parameter")
        provenance = {"state": source.to_dict()}
        source = build_state(source, d, eps_trunc)
    elif isinstance(source, MomentTable):
        provenance = {"state": "from-moments", "gamma_max": source.gamma_max if gamma_max is None else gamma_max}
    else:
        provenance = {"state": type(source).__name__}
    d = source.d
    tomo = Tomogram(source, gamma_max) if isinstance(source, MomentTable) else Tomogram(source)
    thetas = 2 * math.pi * np.arange(n_theta) / n_theta
    xs, weights = x_grid(d, n_x, x_kind)
    values = tomo(thetas, xs)
    if isinstance(source, DensityMatrix):
        values = np.maximum(values, 0.0)
    return TomogramGrid(d, thetas, np.array(xs), values, x_kind, None if weights is None else np.array(weights), provenance)


def janus_score(a: TomogramGrid, b: TomogramGrid, shift: float = math.pi / 2) -> dict:
    """Descriptive similarity of two grids after rotating ``b`` by ``shift`` in theta.

    Returns the Pearson correlation at the requested shift, the best
    correlation over all grid shifts and the shift achieving it.
    """
    if a.values.shape != b.values.shape or not np.allclose(a.xs, b.xs):
        raise ValueError("grids must share the same sampling")
    n = a.thetas.size
    step = 2 * math.pi / n

    def corr(k):
        bb = np.roll(b.values, -k, axis=0)
        return float(np.corrcoef(a.values.ravel(), bb.ravel())[0, 1])

    scores = [corr(k) for k in range(n)]
    k_req = int(round(shift / step)) % n
    best = int(np.argmax(scores))
    return {"shift": shift, "score": scores[k_req], "best_shift": best * step, "best_score": scores[best]}
