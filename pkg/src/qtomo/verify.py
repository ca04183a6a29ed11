"""Self-check suites behind ``qtomo verify``.

Each check returns a :class:`Check` with the measured error, the tolerance
it is held to and the pass flag.  ``run_all`` strings them together for a
set of q values.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from . import fock, qmath, quadrature, states, tomography
from .moments import extract_first_moment, moment_table_from_tomogram
from .qmath import DeformationParam

FIGURE_QS = (0.9, 0.7)


@dataclass
class Check:
    name: str
    q: float | None
    error: float
    tol: float
    passed: bool
    detail: dict | None = None

    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        qs = "" if self.q is None else f" q={self.q:g}"
        return f"[{mark}] {self.name}{qs}: error={self.error:.3e} tol={self.tol:.1e}"


def _check(name, q, error, tol, detail=None) -> Check:
    error = float(error)
    return Check(name, q, error, tol, bool(np.isfinite(error) and error < tol), detail)


def q_binomial(d: DeformationParam, p_max: int = 12) -> Check:
    err = max(abs(qmath.q_binomial_delta(p, d) - (1.0 if p == 0 else 0.0)) for p in range(p_max + 1))
    return _check("q-binomial delta", d.q, err, 1e-10)


def algebra(d: DeformationParam, n_max: int = 60) -> Check:
    cut = n_max + 2
    A = fock.annihilation_matrix(d, cut)
    Ad = fock.creation_matrix(d, cut)
    comm = A @ Ad - d.p * (Ad @ A)
    block = comm[: n_max + 1, : n_max + 1]
    err = np.max(np.abs(block - np.eye(n_max + 1)))
    return _check("deformed commutator", d.q, err, 1e-12)


def linearization_identity(d: DeformationParam, ab_max: int = 5, n_samples: int = 50, seed: int = 0) -> Check:
    rng = np.random.default_rng(seed)
    X = rng.uniform(-d.L, d.L, n_samples)
    J = quadrature.eval_J(2 * ab_max, X, d)
    fact = qmath.q_factorials(2 * ab_max, d)
    err = 0.0
    for a in range(ab_max + 1):
        for b in range(ab_max + 1):
            lhs = np.zeros_like(X)
            for k in range(min(a, b) + 1):
                lhs += (-1) ** k * d.p ** (k * (k - 1) // 2) * J[a - k] * J[b - k] / (
                    fact[k] * math.sqrt(fact[a - k] * fact[b - k])
                )
            rhs = math.sqrt(fact[a + b]) / (fact[a] * fact[b]) * J[a + b]
            err = max(err, float(np.max(np.abs(lhs - rhs))))
    return _check("J-product identity", d.q, err, 1e-10)


def orthonormality(d: DeformationParam, n_max: int = 20) -> list[Check]:
    rule = quadrature.gauss_rule(d, 80)
    return [
        _check("orthonormality (Gauss rule)", d.q, quadrature.orthonormality_error(n_max, d, rule=rule), 1e-8),
        _check("orthonormality (dense density)", d.q, quadrature.orthonormality_error(n_max, d), 1e-8),
    ]


def eigen_residuals(d: DeformationParam, xi: float = -math.tanh(0.5)) -> list[Check]:
    out = []
    for parity, op in (("even", fock.apply_tao_even), ("odd", fock.apply_tao_odd)):
        s = states.make_tao_eigenstate(xi, parity, d)
        res = (op(s) - xi * s).norm()
        out.append(_check(f"two-photon eigen-residual ({parity})", d.q, res, 1e-8))
    return out


def round_trip(d: DeformationParam, name: str, spec: states.StateSpec, order: int = 6) -> list[Check]:
    s = states.build_state(spec, d)
    G = 2 * s.cutoff
    table = moment_table_from_tomogram(s, G)
    direct = fock.moment_table_direct(s, G)
    err = max(abs(table[a, g - a] - direct[a, g - a]) for g in range(order + 1) for a in range(g + 1))
    rho = fock.density_from_moments(table)
    td = fock.trace_distance(rho, fock.DensityMatrix.from_state(s))
    return [
        _check(f"moments from tomogram ({name}, a+b<={order})", d.q, err, 1e-6),
        _check(f"density from moments ({name}, trace distance)", d.q, td, 1e-5),
    ]


def figure_grids(qs, n_theta: int = 128, n_x: int = 128) -> dict:
    grids = {}
    for q in qs:
        d = DeformationParam(q)
        for name, spec in states.figure_specs().items():
            grids[(q, name)] = tomography.make_grid(spec, n_theta, n_x, d, x_kind="uniform")
    return grids


def figure_trends(qs, grids=None) -> list[Check]:
    """Peak height grows with deformation; parity symmetries of the figure states."""
    qs = sorted(qs)
    grids = grids or figure_grids(qs)
    out = []
    for name in states.figure_specs():
        peaks = {q: grids[(q, name)].peak() for q in qs}
        # error > 0 when some smaller q fails to give a strictly higher peak
        gaps = [peaks[lo] - peaks[hi] for lo, hi in zip(qs, qs[1:])]
        worst = min(gaps) if gaps else float("inf")
        out.append(Check(f"peak grows as q decreases ({name})", None, -worst, 0.0, worst > 0, {str(q): p for q, p in peaks.items()}))
        for q in qs:
            g = grids[(q, name)]
            out.append(_check(f"reflection symmetry ({name})", q, g.reflection_error(), 1e-10))
            if name in ("cat-even", "squeezed-vacuum"):
                out.append(_check(f"pi-periodicity ({name})", q, g.pi_periodicity_error(), 1e-10))
    return out


def janus_scores(qs, grids=None) -> dict:
    grids = grids or figure_grids(qs)
    out = {}
    for q in qs:
        for a, b in states.JANUS_PAIRS:
            out[f"q={q:g} {a}/{b}"] = tomography.janus_score(grids[(q, a)], grids[(q, b)])
    return out


def limit_checks(q: float = 0.999) -> list[Check]:
    d = DeformationParam(q)
    X = np.linspace(-3, 3, 601)
    err = np.max(np.abs(quadrature.vacuum_density(X, d) - np.exp(-X**2) / math.sqrt(math.pi)))
    alpha = math.sqrt(0.5)
    s = states.make_coherent(alpha, d)
    m = extract_first_moment(s, 0.0, math.pi / 2)
    return [
        _check("vacuum density vs Gaussian", q, err, 1e-2),
        _check("first moment of coherent state", q, abs(m - alpha), 1e-4),
    ]


def run_all(qs=(0.5, 0.7, 0.9), round_trips: bool = True) -> dict:
    checks: list[Check] = []
    for q in qs:
        d = DeformationParam(q)
        checks.append(q_binomial(d))
        checks.append(algebra(d))
        checks.append(linearization_identity(d))
        checks.extend(orthonormality(d))
        checks.extend(eigen_residuals(d))
        if round_trips:
            for name, spec in states.figure_specs().items():
                checks.extend(round_trip(d, name, spec))
    grids = figure_grids(qs)
    if len(qs) > 1:
        checks.extend(figure_trends(qs, grids))
    checks.extend(limit_checks())
    return {
        "passed": all(c.passed for c in checks),
        "checks": [asdict(c) for c in checks],
        "janus": janus_scores(qs, grids),
        "lines": [c.line() for c in checks],
    }
