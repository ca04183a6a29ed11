"""
Normally ordered moments from optical tomograms.

Projecting a tomogram slice onto ``J_gamma`` isolates the moments of total
order ``gamma``:

    I_gamma(theta) = int omega(X, theta) J_gamma(X) dX
                   = sum_{a=0}^{gamma} e^{i(2a-gamma) theta} c(gamma, a) <A^dag^a A^{gamma-a}>,

with ``c(gamma, a) = sqrt([gamma]!) / ([a]! [gamma-a]!)``.  Sampling
``gamma + 1`` angles distinct modulo pi gives a square linear system for the
``gamma + 1`` moments.  With the default angles ``k pi / (gamma + 1)`` the
phase part is a discrete Fourier matrix.

Tomograms can be given as a :class:`~qtomo.tomography.Tomogram`, anything
it wraps (FockState, DensityMatrix, MomentTable), a plain callable
``omega(theta, X)``, or a sampled :class:`~qtomo.tomography.TomogramGrid`.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import FloaterHormannInterpolator

from . import qmath
from .errors import DegenerateAngles, IllConditioned, InsufficientRule, InvalidParameter
from .fock import DensityMatrix, FockState, MomentTable
from .quadrature import QuadratureRule, eval_J, gauss_rule, rule_for_degree, vacuum_density
from .tomography import Tomogram, TomogramGrid

log = logging.getLogger(__name__)

COND_LIMIT = 1e8
_MAX_AUTO_ORDER = 4096


@dataclass(frozen=True)
class ProjectionVector:
    gamma: int
    angles: np.ndarray
    values: np.ndarray


class _CallableTomogram:
    """Adapter for a bare ``omega(theta, X)`` callable of unknown degree."""

    degree = None

    def __init__(self, func, d):
        self.func = func
        self.d = d

    def reduced(self, theta, X):
        X = np.asarray(X, dtype=float)
        vals = np.asarray(self.func(np.asarray(theta, dtype=float), X), dtype=float)
        return vals / vacuum_density(np.atleast_1d(X), self.d).reshape(X.shape)


class GridTomogram:
    """Tomogram backed by sampled data.

    Rows are looked up by angle (only sampled angles are available).  When
    the requested X points are not the grid's own, the reduced values
    ``omega / W`` are interpolated with a Floater-Hormann barycentric
    rational interpolant; ``interpolation_error`` holds a held-out estimate
    of its accuracy.
    """

    degree = None

    def __init__(self, grid: TomogramGrid, blend: int = 8):
        self.grid = grid
        self.d = grid.d
        W = vacuum_density(grid.xs, grid.d)
        self._reduced = grid.values / W
        self._blend = blend
        self.interpolation_error = 0.0
        self._interp = None
        if grid.x_kind != "gauss":
            self._interp = FloaterHormannInterpolator(grid.xs, self._reduced.T, d=blend)
            half = FloaterHormannInterpolator(grid.xs[::2], self._reduced[:, ::2].T, d=blend)
            self.interpolation_error = float(np.max(np.abs(half(grid.xs[1::2]) - self._reduced[:, 1::2].T)))

    @property
    def thetas(self):
        return self.grid.thetas

    def native_rule(self) -> QuadratureRule | None:
        if self.grid.x_kind == "gauss":
            return gauss_rule(self.d, self.grid.xs.size)
        return None

    def _rows(self, theta):
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        diff = np.angle(np.exp(1j * np.subtract.outer(theta, self.grid.thetas)))
        idx = np.argmin(np.abs(diff), axis=1)
        if np.any(np.abs(diff[np.arange(theta.size), idx]) > 1e-9):
            raise InvalidParameter("requested angle is not sampled in the tomogram grid")
        return idx

    def reduced(self, theta, X):
        idx = self._rows(theta)
        X = np.asarray(X, dtype=float)
        if X.shape == self.grid.xs.shape and np.allclose(X, self.grid.xs, rtol=0, atol=1e-13):
            out = self._reduced[idx]
        else:
            out = self._interp(X).T[idx] if self._interp is not None else None
            if out is None:
                raise InvalidParameter("Gauss-sampled grid can only be integrated with its own rule")
        return out.reshape(np.shape(theta) + X.shape)

    def pick_angles(self, gamma: int) -> np.ndarray:
        """Sampled angles closest to ``k pi / (gamma+1)``, distinct modulo pi."""
        targets = math.pi * np.arange(gamma + 1) / (gamma + 1)
        chosen = []
        for t in targets:
            diff = np.abs(np.angle(np.exp(1j * (self.grid.thetas - t))))
            for j in np.argsort(diff, kind="stable"):
                th = self.grid.thetas[j]
                if all(abs(math.sin(th - c)) > 1e-6 for c in chosen):
                    chosen.append(th)
                    break
            else:
                raise DegenerateAngles(f"grid has fewer than {gamma + 1} angles distinct modulo pi")
        return np.array(chosen)


def as_tomogram(omega, d=None):
    if isinstance(omega, (Tomogram, GridTomogram, _CallableTomogram)):
        return omega
    if isinstance(omega, (FockState, DensityMatrix, MomentTable)):
        return Tomogram(omega)
    if isinstance(omega, TomogramGrid):
        return GridTomogram(omega)
    if callable(omega):
        if d is None:
            raise InvalidParameter("a bare callable tomogram needs the deformation parameter")
        return _CallableTomogram(omega, d)
    raise TypeError(f"cannot interpret {type(omega).__name__} as a tomogram")


def _projections(tomo, thetas, gamma: int, rule: QuadratureRule) -> np.ndarray:
    red = tomo.reduced(np.asarray(thetas, dtype=float), rule.nodes)
    Jg = eval_J(gamma, rule.nodes, rule.d)[gamma]
    return red @ (rule.weights * Jg)


def _check_rule(tomo, gamma, rule):
    if tomo.degree is not None and rule.exact_degree < tomo.degree + gamma:
        raise InsufficientRule(
            f"rule of order {rule.order} is exact to degree {rule.exact_degree}, "
            f"need {tomo.degree + gamma}"
        )


def _default_rule(tomo, gamma):
    if isinstance(tomo, GridTomogram) and tomo.native_rule() is not None:
        return tomo.native_rule()
    if tomo.degree is not None:
        return rule_for_degree(tomo.d, tomo.degree + gamma)
    return None


def _converged_projection(tomo, thetas, gamma, tol=1e-12):
    # unknown degree: double the rule until the projections settle
    order = 64
    prev = _projections(tomo, thetas, gamma, gauss_rule(tomo.d, order))
    while order < _MAX_AUTO_ORDER:
        order *= 2
        cur = _projections(tomo, thetas, gamma, gauss_rule(tomo.d, order))
        if np.max(np.abs(cur - prev)) <= tol * max(1.0, np.max(np.abs(cur))):
            return cur
        prev = cur
    log.warning("projection not converged at Gauss order %d", order)
    return prev


def projections(omega, thetas, gamma: int, rule: QuadratureRule | None = None, d=None) -> ProjectionVector:
    """``I_gamma(theta_k)`` for every angle in ``thetas``."""
    tomo = as_tomogram(omega, d)
    thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
    rule = rule if rule is not None else _default_rule(tomo, gamma)
    if rule is None:
        vals = _converged_projection(tomo, thetas, gamma)
    else:
        _check_rule(tomo, gamma, rule)
        vals = _projections(tomo, thetas, gamma, rule)
    return ProjectionVector(gamma, thetas, vals.astype(complex))


def project(omega, theta: float, gamma: int, rule: QuadratureRule | None = None, d=None) -> complex:
    """``int omega(X, theta) J_gamma(X) dX``.

    Integrates the reduced tomogram ``omega / W`` against the Gauss rule of
    the vacuum density, which is exact when the rule covers the degree of
    ``omega / W`` plus ``gamma``.
    """
    return complex(projections(omega, [theta], gamma, rule, d).values[0])


def extract_first_moment(omega, theta1: float, theta2: float, rule: QuadratureRule | None = None, d=None) -> complex:
    """``<A>`` from two tomogram slices.

    ``<A> = (e^{i th2} I_1(th1) - e^{i th1} I_1(th2)) / (2 i sin(th2 - th1))``
    """
    s = math.sin(theta2 - theta1)
    if abs(s) < 1e-6:
        raise DegenerateAngles("theta1 and theta2 must differ by something other than a multiple of pi")
    I1, I2 = projections(omega, [theta1, theta2], 1, rule, d).values
    return complex((np.exp(1j * theta2) * I1 - np.exp(1j * theta1) * I2) / (2j * s))


def order_matrix(gamma: int, angles, d) -> tuple[np.ndarray, np.ndarray]:
    """Phase matrix ``e^{i(2a-gamma) theta_k}`` and the column scales ``c(gamma, a)``."""
    a = np.arange(gamma + 1)
    lf = qmath.log_q_factorials(gamma, d)
    scales = np.exp(0.5 * lf[gamma] - lf[a] - lf[gamma - a])
    phases = np.exp(1j * np.multiply.outer(np.asarray(angles, dtype=float), 2 * a - gamma))
    return phases, scales


def default_angles(gamma: int) -> np.ndarray:
    return math.pi * np.arange(gamma + 1) / (gamma + 1)


def extract_order(omega, gamma: int, rule: QuadratureRule | None = None, angles=None, d=None, full_output: bool = False):
    """Moments ``<A^dag^a A^{gamma-a}>`` for ``a = 0..gamma``.

    Parameters
    ----------
    omega
        Tomogram (see module docstring).
    gamma : int
        Total order.
    rule : QuadratureRule, optional
        Gauss rule for the projections.  Chosen from the tomogram's degree
        when omitted.
    angles : array_like, optional
        ``gamma + 1`` angles distinct modulo pi; defaults to ``k pi/(gamma+1)``
        (or the nearest sampled angles for grid data).
    full_output : bool
        Also return a dict with the projections, the condition number of the
        column-scaled system and the Hermitian-pairing deviation.

    Returns
    -------
    moments : ndarray of complex, shape (gamma + 1,)
    info : dict, only if ``full_output``
    """
    if gamma < 0:
        raise InvalidParameter("gamma must be non-negative")
    tomo = as_tomogram(omega, d)
    if angles is None:
        angles = tomo.pick_angles(gamma) if isinstance(tomo, GridTomogram) else default_angles(gamma)
    angles = np.asarray(angles, dtype=float)
    if angles.shape != (gamma + 1,):
        raise InvalidParameter(f"need exactly {gamma + 1} angles")
    phases, scales = order_matrix(gamma, angles, tomo.d)
    cond = float(np.linalg.cond(phases))
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise IllConditioned(f"angle system condition number {cond:.3g} exceeds {COND_LIMIT:g}")
    proj = projections(tomo, angles, gamma, rule)
    y = np.linalg.solve(phases, proj.values)
    m = y / scales
    pairing = float(np.max(np.abs(m - m[::-1].conj())))
    m = 0.5 * (m + m[::-1].conj())
    if full_output:
        return m, {"projections": proj, "cond": cond, "pairing_deviation": pairing}
    return m


def moment_table_from_tomogram(omega, gamma_max: int, rule: QuadratureRule | None = None, d=None, report: dict | None = None) -> MomentTable:
    """Table of all moments with ``a + b <= gamma_max`` recovered from a tomogram.

    ``report`` (if a dict) receives the normalization deviation of the
    order-0 projection and the worst Hermitian-pairing deviation.
    """
    tomo = as_tomogram(omega, d)
    if rule is None:
        # one rule that is exact for the highest order serves every order
        rule = _default_rule(tomo, gamma_max)
    vals = MomentTable.blank(gamma_max)
    worst_pair = 0.0
    norm_dev = 0.0
    for g in range(gamma_max + 1):
        m, info = extract_order(tomo, g, rule, full_output=True)
        worst_pair = max(worst_pair, info["pairing_deviation"])
        if g == 0:
            norm_dev = abs(m[0] - 1.0)
            m = np.ones(1, dtype=complex)
        a = np.arange(g + 1)
        vals[a, g - a] = m
    if report is not None:
        report["normalization_deviation"] = float(norm_dev)
        report["pairing_deviation"] = worst_pair
    return MomentTable(tomo.d, gamma_max, vals)
