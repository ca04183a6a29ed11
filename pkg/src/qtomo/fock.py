"""
Truncated q-deformed Fock space.

States are amplitude vectors over ``|0>_q .. |N>_q``; density matrices are
``(N+1) x (N+1)`` arrays in the same basis.  Everything here returns new
objects, nothing is mutated in place.

The normal-ordering helpers implement the expansion
``F = sum F_{a,b} A^dag^a A^b`` together with its inversion, and the
reconstruction of a density matrix from a table of normally ordered moments.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from . import qmath
from .errors import IncompleteTable, OrderTooHigh, TruncationOverflow
from .qmath import DeformationParam

log = logging.getLogger(__name__)

MAX_CUTOFF = 512
DEFAULT_TRUNC_EPS = 1e-12


def _frozen(a, dtype=complex):
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class FockState:
    """Complex amplitudes ``c_0..c_N`` of a (possibly unnormalized) state."""

    d: DeformationParam
    amps: np.ndarray
    eps_trunc: float = DEFAULT_TRUNC_EPS

    def __post_init__(self):
        amps = _frozen(self.amps)
        if amps.ndim != 1 or amps.size < 1:
            raise ValueError("amplitudes must be a non-empty vector")
        object.__setattr__(self, "amps", amps)

    @property
    def cutoff(self) -> int:
        return self.amps.size - 1

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def normalized(self) -> "FockState":
        return FockState(self.d, self.amps / self.norm(), self.eps_trunc)

    def tail_mass(self, guard: int = 5) -> float:
        """Probability carried by the top ``guard`` levels."""
        return float(np.sum(np.abs(self.amps[max(0, self.cutoff - guard + 1):]) ** 2))

    def padded(self, cutoff: int) -> "FockState":
        if cutoff < self.cutoff:
            raise ValueError("padding cannot shrink a state")
        amps = np.zeros(cutoff + 1, dtype=complex)
        amps[: self.amps.size] = self.amps
        return FockState(self.d, amps, self.eps_trunc)

    def __sub__(self, other: "FockState") -> "FockState":
        n = max(self.cutoff, other.cutoff)
        return FockState(self.d, self.padded(n).amps - other.padded(n).amps, self.eps_trunc)

    def __mul__(self, z) -> "FockState":
        return FockState(self.d, self.amps * z, self.eps_trunc)

    __rmul__ = __mul__


def number_state(n: int, d: DeformationParam, cutoff: int | None = None) -> FockState:
    cutoff = n + 5 if cutoff is None else cutoff
    if cutoff < n:
        raise ValueError("cutoff below the occupied level")
    amps = np.zeros(cutoff + 1, dtype=complex)
    amps[n] = 1.0
    return FockState(d, amps)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    d: DeformationParam
    mat: np.ndarray

    def __post_init__(self):
        mat = _frozen(self.mat)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError("density matrix must be square")
        object.__setattr__(self, "mat", mat)

    @property
    def cutoff(self) -> int:
        return self.mat.shape[0] - 1

    @classmethod
    def from_state(cls, s: FockState) -> "DensityMatrix":
        c = s.amps
        return cls(s.d, np.outer(c, c.conj()))

    def padded(self, cutoff: int) -> "DensityMatrix":
        out = np.zeros((cutoff + 1, cutoff + 1), dtype=complex)
        n = min(cutoff, self.cutoff) + 1
        out[:n, :n] = self.mat[:n, :n]
        return DensityMatrix(self.d, out)

    def violations(self, herm_tol=1e-12, trace_tol=1e-10, eig_tol=1e-10) -> list[str]:
        """Names of the density-matrix invariants that fail at the given tolerances."""
        bad = []
        m = self.mat
        if np.max(np.abs(m - m.conj().T)) > herm_tol:
            bad.append("hermitian")
        if abs(np.trace(m) - 1.0) > trace_tol:
            bad.append("trace")
        if np.min(np.linalg.eigvalsh((m + m.conj().T) / 2)) < -eig_tol:
            bad.append("positive")
        return bad


def trace_distance(a: DensityMatrix, b: DensityMatrix) -> float:
    n = max(a.cutoff, b.cutoff)
    diff = a.padded(n).mat - b.padded(n).mat
    diff = (diff + diff.conj().T) / 2
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(diff))))


# ladder operators

def annihilation_matrix(d: DeformationParam, cutoff: int) -> np.ndarray:
    return np.diag(np.sqrt(qmath.q_ints(cutoff, d)[1:]), 1)


def creation_matrix(d: DeformationParam, cutoff: int) -> np.ndarray:
    return annihilation_matrix(d, cutoff).T


def apply_annihilation(s: FockState) -> FockState:
    """``A |psi>``; the result is not renormalized."""
    out = np.zeros_like(s.amps)
    out[:-1] = np.sqrt(qmath.q_ints(s.cutoff, s.d)[1:]) * s.amps[1:]
    return FockState(s.d, out, s.eps_trunc)


def apply_creation(s: FockState) -> FockState:
    """``A^dag |psi>`` on the same cutoff.

    Raises TruncationOverflow when the top amplitude is not negligible,
    since it would be pushed out of the truncated space.
    """
    if abs(s.amps[-1]) >= s.eps_trunc:
        raise TruncationOverflow(
            f"|c_{s.cutoff}| = {abs(s.amps[-1]):.3g} >= {s.eps_trunc:g}; raise the cutoff first"
        )
    out = np.zeros_like(s.amps)
    out[1:] = np.sqrt(qmath.q_ints(s.cutoff, s.d)[1:]) * s.amps[:-1]
    return FockState(s.d, out, s.eps_trunc)


def _apply_tao(s: FockState, odd: bool) -> FockState:
    ints = qmath.q_ints(s.cutoff, s.d)
    out = np.zeros_like(s.amps)
    if s.cutoff >= 2:
        n = np.arange(2, s.cutoff + 1)
        ratio = ints[n - 1] / ints[n] if odd else ints[n] / ints[n - 1]
        out[: s.cutoff - 1] = np.sqrt(ratio) * s.amps[2:]
    return FockState(s.d, out, s.eps_trunc)


def apply_tao_even(s: FockState) -> FockState:
    """Two-photon annihilator ``A^dag^-1 A``; components on |0>, |1> are annihilated."""
    return _apply_tao(s, odd=False)


def apply_tao_odd(s: FockState) -> FockState:
    """Two-photon annihilator ``A A^dag^-1``; components on |0>, |1> are annihilated."""
    return _apply_tao(s, odd=True)


# moments

def _ladder_ratio(log_fact: np.ndarray, j: np.ndarray, a: int) -> np.ndarray:
    # sqrt([j+a]! / [j]!)
    return np.exp(0.5 * (log_fact[j + a] - log_fact[j]))


def moment_direct(s, alpha: int, beta: int) -> complex:
    """``<A^dag^alpha A^beta>`` for a FockState or DensityMatrix.

    Moments of a truncated state are exact for any order; orders above twice
    the cutoff are rejected because they carry no information about it.
    """
    if alpha < 0 or beta < 0:
        raise ValueError("moment orders must be non-negative")
    n = s.cutoff
    if alpha + beta > 2 * n:
        raise OrderTooHigh(f"order {alpha}+{beta} exceeds twice the cutoff {n}")
    if isinstance(s, FockState):
        c = s.amps
        lf = qmath.log_q_factorials(n, s.d)
        # (A^k psi)_j = sqrt([j+k]!/[j]!) c_{j+k}
        m = n - max(alpha, beta)
        if m < 0:
            return 0j
        j = np.arange(m + 1)
        left = _ladder_ratio(lf, j, alpha) * c[j + alpha]
        right = _ladder_ratio(lf, j, beta) * c[j + beta]
        return complex(np.vdot(left, right))
    rho = s.mat
    m = n - max(alpha, beta)
    if m < 0:
        return 0j
    lf = qmath.log_q_factorials(n, s.d)
    j = np.arange(m + 1)
    weights = _ladder_ratio(lf, j, alpha) * _ladder_ratio(lf, j, beta)
    return complex(np.sum(rho[j + beta, j + alpha] * weights))


@dataclass(frozen=True, eq=False)
class MomentTable:
    """Normally ordered moments ``<A^dag^a A^b>`` for ``a + b <= gamma_max``.

    ``values[a, b]`` holds the moment; cells outside the triangle, and cells
    never filled in, are NaN.
    """

    d: DeformationParam
    gamma_max: int
    values: np.ndarray

    def __post_init__(self):
        vals = _frozen(self.values)
        if vals.shape != (self.gamma_max + 1, self.gamma_max + 1):
            raise ValueError("moment array must be (gamma_max+1) square")
        object.__setattr__(self, "values", vals)

    def __getitem__(self, key) -> complex:
        a, b = key
        if a < 0 or b < 0 or a + b > self.gamma_max or np.isnan(self.values[a, b]):
            raise IncompleteTable(f"moment ({a}, {b}) not in table")
        return complex(self.values[a, b])

    def entries(self):
        """Yield ``(alpha, beta, value)`` in order of total degree, then alpha."""
        for g in range(self.gamma_max + 1):
            for a in range(g + 1):
                yield a, g - a, self[a, g - a]

    def require_complete(self, gamma_max: int | None = None):
        g = self.gamma_max if gamma_max is None else gamma_max
        if g > self.gamma_max:
            raise IncompleteTable(f"table stops at order {self.gamma_max}, need {g}")
        a, b = np.indices(self.values.shape)
        mask = (a + b) <= g
        if np.any(np.isnan(self.values[mask])):
            missing = np.argwhere(mask & np.isnan(self.values))[0]
            raise IncompleteTable(f"moment {tuple(int(i) for i in missing)} missing")

    def hermitian_deviation(self) -> float:
        v = np.nan_to_num(self.values)
        return float(np.max(np.abs(v - v.T.conj())))

    @staticmethod
    def blank(gamma_max: int) -> np.ndarray:
        return np.full((gamma_max + 1, gamma_max + 1), np.nan, dtype=complex)


def moment_table_direct(s, gamma_max: int) -> MomentTable:
    vals = MomentTable.blank(gamma_max)
    for g in range(gamma_max + 1):
        for a in range(g + 1):
            vals[a, g - a] = moment_direct(s, a, g - a)
    return MomentTable(s.d, gamma_max, vals)


def _sign_q(k, d):
    # (-1)^k q^{k(k-1)}
    return (-1.0) ** k * d.p ** (k * (k - 1) // 2)


def normal_order_coeff(F: np.ndarray, alpha: int, beta: int, d: DeformationParam) -> complex:
    """Coefficient of ``A^dag^alpha A^beta`` in the normally ordered expansion of F.

    ``F`` is the operator's matrix in the deformed number basis; it must
    reach indices ``max(alpha, beta)``.
    """
    F = np.asarray(F)
    if max(alpha, beta) >= F.shape[0]:
        raise ValueError("operator matrix too small for the requested coefficient")
    fact = qmath.q_factorials(max(alpha, beta), d)
    total = 0j
    for k in range(min(alpha, beta) + 1):
        total += _sign_q(k, d) * F[alpha - k, beta - k] / (
            fact[k] * np.sqrt(fact[alpha - k] * fact[beta - k])
        )
    return total


def normal_order_coeffs(F: np.ndarray, d: DeformationParam) -> np.ndarray:
    """All coefficients ``F_{a,b}`` for ``a, b`` within the matrix size."""
    n = np.asarray(F).shape[0]
    return np.array([[normal_order_coeff(F, a, b, d) for b in range(n)] for a in range(n)])


def matrix_from_normal_order(coeffs: np.ndarray, d: DeformationParam) -> np.ndarray:
    """Rebuild ``<m|F|n>`` from normally ordered coefficients.

    Uses ``<m|F|n> = sum_r F_{m-r, n-r} sqrt([m]![n]!) / [r]!``, the matrix
    element of ``A^dag^a A^b`` being nonzero only when ``m - a == n - b``.
    """
    n = coeffs.shape[0]
    fact = qmath.q_factorials(n, d)
    out = np.zeros((n, n), dtype=complex)
    for m in range(n):
        for k in range(n):
            for r in range(min(m, k) + 1):
                out[m, k] += coeffs[m - r, k - r] * np.sqrt(fact[m] * fact[k]) / fact[r]
    return out


def density_from_moments(t: MomentTable, cutoff: int | None = None, report: dict | None = None) -> DensityMatrix:
    """Assemble the density matrix from a table of normally ordered moments.

    Matrix element ``<j|rho|i>`` collects ``t(i+k, j+k)`` with weight
    ``(-1)^k q^{k(k-1)} / ([k]! sqrt([i]! [j]!))`` for every ``k`` the table
    reaches.  The result is symmetrized; the asymmetry that removed is
    written into ``report['asymmetry']`` when a dict is supplied.
    """
    G = t.gamma_max
    t.require_complete()
    N = G if cutoff is None else cutoff
    d = t.d
    lf = qmath.log_q_factorials(G, d)
    rho = np.zeros((N + 1, N + 1), dtype=complex)
    vals = t.values
    for j in range(min(N, G) + 1):
        for i in range(min(N, G - j) + 1):
            kmax = (G - i - j) // 2
            k = np.arange(kmax + 1)
            signs = (-1.0) ** k * d.p ** (k * (k - 1) // 2)
            scale = np.exp(-lf[k] - 0.5 * (lf[i] + lf[j]))
            rho[j, i] = np.sum(signs * scale * vals[i + k, j + k])
    asym = float(np.max(np.abs(rho - rho.conj().T)))
    rho = (rho + rho.conj().T) / 2
    if report is not None:
        report["asymmetry"] = asym
    if asym > 1e-8:
        log.warning("density_from_moments: asymmetry %.3g removed by symmetrization", asym)
    return DensityMatrix(d, rho)
