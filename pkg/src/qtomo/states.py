"""Constructors for deformed coherent, cat, squeezed and number states."""

from __future__ import annotations

import cmath
import math
from dataclasses import asdict, dataclass
from enum import Enum

import numpy as np

from . import qmath
from .errors import DegenerateState, DivergentAmplitude, InvalidParameter, TruncationError
from .fock import DEFAULT_TRUNC_EPS, MAX_CUTOFF, FockState, number_state
from .qmath import DeformationParam

# guards the eigen-residual of the top kept levels, independent of eps_trunc
_RESIDUAL_FLOOR = 1e-20
_GUARD = 5


class Kind(str, Enum):
    COHERENT = "coherent"
    CAT_EVEN = "cat-even"
    CAT_ODD = "cat-odd"
    TAO_EVEN = "tao-even"
    TAO_ODD = "tao-odd"
    SQUEEZED_VACUUM = "squeezed-vacuum"
    SQUEEZED_EXCITED = "squeezed-excited"
    NUMBER = "number"


@dataclass(frozen=True)
class StateSpec:
    """Serializable description of one of the supported states.

    Only the fields relevant to ``kind`` are read: ``alpha`` for coherent
    and cat states, ``xi`` for the two-photon eigenstates, ``r``/``phi_s``
    for squeezed states and ``n`` for number states.
    """

    kind: Kind
    alpha: complex = 0j
    r: float = 0.0
    phi_s: float = 0.0
    xi: complex = 0j
    n: int = 0

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        object.__setattr__(self, "alpha", complex(self.alpha))
        object.__setattr__(self, "xi", complex(self.xi))
        if self.r < 0:
            raise InvalidParameter("squeezing r must be non-negative")
        if int(self.n) != self.n or self.n < 0:
            raise InvalidParameter("n must be a non-negative integer")

    def to_dict(self) -> dict:
        out = asdict(self)
        out["kind"] = self.kind.value
        for key in ("alpha", "xi"):
            z = out.pop(key)
            out[f"{key}_re"] = z.real
            out[f"{key}_im"] = z.imag
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "StateSpec":
        data = dict(data)
        kw = {"kind": data.pop("kind")}
        for key in ("alpha", "xi"):
            kw[key] = complex(data.pop(f"{key}_re", 0.0), data.pop(f"{key}_im", 0.0))
        for key in ("r", "phi_s"):
            if key in data:
                kw[key] = float(data.pop(key))
        if "n" in data:
            kw["n"] = int(data.pop("n"))
        if data:
            raise InvalidParameter(f"unknown state fields: {sorted(data)}")
        return cls(**kw)


def _truncate(amps: np.ndarray, d: DeformationParam, eps: float, what: str) -> FockState:
    """Cut a long amplitude vector at the smallest admissible cutoff and normalize.

    The cutoff N is the smallest for which the top five levels carry less
    than ``eps`` of the weight and the top two less than ``_RESIDUAL_FLOOR``.
    """
    w = np.abs(amps) ** 2
    total = w.sum()
    if not np.isfinite(total) or total == 0:
        raise DegenerateState(f"{what}: amplitude vector vanishes or overflows")
    w = w / total
    # tail[k] = sum_{n >= k} w_n
    tail = np.concatenate([np.cumsum(w[::-1])[::-1], [0.0]])
    if w[-1] > 1e-3 * min(eps, _RESIDUAL_FLOOR):
        raise TruncationError(f"{what}: series not converged within {MAX_CUTOFF} levels")
    for N in range(_GUARD, amps.size):
        if tail[N - _GUARD + 1] < eps and tail[N - 1] < _RESIDUAL_FLOOR:
            break
    else:
        raise TruncationError(f"{what}: no cutoff <= {MAX_CUTOFF} reaches eps_trunc={eps:g}")
    kept = amps[: N + 1]
    return FockState(d, kept / np.linalg.norm(kept), eps)


def _coherent_amps(alpha: complex, d: DeformationParam) -> np.ndarray:
    n = np.arange(MAX_CUTOFF + 1)
    if alpha == 0:
        out = np.zeros(n.size, dtype=complex)
        out[0] = 1.0
        return out
    lf = qmath.log_q_factorials(MAX_CUTOFF, d)
    mag = np.exp(n * math.log(abs(alpha)) - 0.5 * lf)
    return mag * np.exp(1j * n * cmath.phase(alpha))


def make_coherent(alpha: complex, d: DeformationParam, eps_trunc: float = DEFAULT_TRUNC_EPS) -> FockState:
    """Deformed coherent state, ``c_n ~ alpha^n / sqrt([n]_q!)``."""
    alpha = complex(alpha)
    if abs(alpha) >= d.R:
        raise DivergentAmplitude(f"|alpha| = {abs(alpha):.6g} must be below 1/sqrt(1-q^2) = {d.R:.6g}")
    return _truncate(_coherent_amps(alpha, d), d, eps_trunc, "coherent state")


def make_cat(alpha: complex, parity: int, d: DeformationParam, eps_trunc: float = DEFAULT_TRUNC_EPS) -> FockState:
    """Even (``parity=+1``) or odd (``parity=-1``) cat state ``|alpha> +- |-alpha>``."""
    alpha = complex(alpha)
    if parity not in (1, -1):
        raise InvalidParameter("parity must be +1 or -1")
    if abs(alpha) >= d.R:
        raise DivergentAmplitude(f"|alpha| = {abs(alpha):.6g} must be below {d.R:.6g}")
    if parity == -1 and alpha == 0:
        raise DegenerateState("odd cat state with alpha = 0 is the zero vector")
    amps = _coherent_amps(alpha, d)
    keep = (np.arange(amps.size) % 2) == (0 if parity == 1 else 1)
    amps = np.where(keep, amps, 0)
    return _truncate(amps, d, eps_trunc, "cat state")


def make_tao_eigenstate(xi: complex, parity: str, d: DeformationParam, eps_trunc: float = DEFAULT_TRUNC_EPS) -> FockState:
    """Eigenstate of a two-photon annihilator with eigenvalue ``xi``.

    ``parity='even'`` gives the eigenstate of ``A^dag^-1 A`` supported on even
    levels, ``c_{2n} ~ xi^n sqrt([2n-1]!!/[2n]!!)``; ``parity='odd'`` the
    eigenstate of ``A A^dag^-1``, ``c_{2n+1} ~ xi^n sqrt([2n+1]!!/[2n]!!)``.
    """
    xi = complex(xi)
    if parity not in ("even", "odd"):
        raise InvalidParameter("parity must be 'even' or 'odd'")
    if abs(xi) >= 1:
        raise DivergentAmplitude(f"|xi| = {abs(xi):.6g} must be below 1")
    amps = np.zeros(MAX_CUTOFF + 1, dtype=complex)
    start = 0 if parity == "even" else 1
    levels = np.arange(start, MAX_CUTOFF + 1, 2)
    if xi == 0:
        amps[start] = 1.0
    else:
        ints = qmath.q_ints(MAX_CUTOFF + 2, d)
        m = levels[:-1]
        # c_{m+2} / c_m = xi * sqrt([m+1]/[m+2]) on even levels, xi * sqrt([m+2]/[m+1]) on odd
        log_ratio = 0.5 * (np.log(ints[m + 1]) - np.log(ints[m + 2]))
        if parity == "odd":
            log_ratio = -log_ratio
        log_mag = np.concatenate([[0.0], np.cumsum(log_ratio + math.log(abs(xi)))])
        k = np.arange(levels.size)
        amps[levels] = np.exp(log_mag) * np.exp(1j * k * cmath.phase(xi))
    return _truncate(amps, d, eps_trunc, f"{parity} two-photon eigenstate")


def make_squeezed(r: float, phi_s: float, which: str, d: DeformationParam, eps_trunc: float = DEFAULT_TRUNC_EPS) -> FockState:
    """Squeezed vacuum (``which='vacuum'``) or squeezed first excited state.

    Maps to the two-photon eigenstate with ``xi = -exp(i phi_s) tanh(r)``.
    """
    if r < 0:
        raise InvalidParameter("r must be non-negative")
    xi = -cmath.exp(1j * phi_s) * math.tanh(r)
    parity = {"vacuum": "even", "excited": "odd"}.get(which)
    if parity is None:
        raise InvalidParameter("which must be 'vacuum' or 'excited'")
    return make_tao_eigenstate(xi, parity, d, eps_trunc)


def build_state(spec: StateSpec, d: DeformationParam, eps_trunc: float = DEFAULT_TRUNC_EPS) -> FockState:
    k = spec.kind
    if k is Kind.COHERENT:
        return make_coherent(spec.alpha, d, eps_trunc)
    if k is Kind.CAT_EVEN:
        return make_cat(spec.alpha, 1, d, eps_trunc)
    if k is Kind.CAT_ODD:
        return make_cat(spec.alpha, -1, d, eps_trunc)
    if k is Kind.TAO_EVEN:
        return make_tao_eigenstate(spec.xi, "even", d, eps_trunc)
    if k is Kind.TAO_ODD:
        return make_tao_eigenstate(spec.xi, "odd", d, eps_trunc)
    if k is Kind.SQUEEZED_VACUUM:
        return make_squeezed(spec.r, spec.phi_s, "vacuum", d, eps_trunc)
    if k is Kind.SQUEEZED_EXCITED:
        return make_squeezed(spec.r, spec.phi_s, "excited", d, eps_trunc)
    return number_state(spec.n, d)


def figure_specs() -> dict[str, StateSpec]:
    """The four states of the Janus-faced tomogram figures, ``|alpha|^2 = r = 0.5``."""
    a = math.sqrt(0.5)
    return {
        "cat-even": StateSpec(Kind.CAT_EVEN, alpha=a),
        "squeezed-vacuum": StateSpec(Kind.SQUEEZED_VACUUM, r=0.5),
        "cat-odd": StateSpec(Kind.CAT_ODD, alpha=a),
        "squeezed-excited": StateSpec(Kind.SQUEEZED_EXCITED, r=0.5),
    }


JANUS_PAIRS = (("cat-even", "squeezed-vacuum"), ("cat-odd", "squeezed-excited"))
