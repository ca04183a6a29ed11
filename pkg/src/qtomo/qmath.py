"""
q-arithmetic for the math-type deformed oscillator.

All quantities use the base ``p = q**2``: the deformed integer is
``[n] = (1 - p**n) / (1 - p)`` and factorials are running products of it.
Scalar helpers mirror the textbook definitions; the ``q_*s`` variants
return whole tables ``[0..n_max]`` and are what the rest of the package uses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParameter


@dataclass(frozen=True)
class DeformationParam:
    """Deformation parameter ``0 < q < 1`` and the constants derived from it.

    Attributes
    ----------
    q : float
        Deformation parameter.
    p : float
        ``q**2``, the base of all q-series.
    L : float
        Half-width of the quadrature spectrum, ``sqrt((1+p)/(1-p))``.
    R : float
        Radius of convergence for coherent amplitudes, ``1/sqrt(1-p)``.
    """

    q: float
    p: float = field(init=False, repr=False)
    L: float = field(init=False, repr=False)
    R: float = field(init=False, repr=False)

    def __post_init__(self):
        q = float(self.q)
        if not (math.isfinite(q) and 0.0 < q < 1.0):
            raise InvalidParameter(f"q must lie strictly inside (0, 1), got {self.q!r}")
        p = q * q
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "L", math.sqrt((1.0 + p) / (1.0 - p)))
        object.__setattr__(self, "R", 1.0 / math.sqrt(1.0 - p))


def as_param(q) -> DeformationParam:
    if isinstance(q, DeformationParam):
        return q
    return DeformationParam(q)


def _check_n(n):
    if int(n) != n or n < 0:
        raise InvalidParameter(f"expected a non-negative integer, got {n!r}")
    return int(n)


def q_int(n: int, d: DeformationParam) -> float:
    """Deformed integer ``[n]_q = (1 - q^{2n}) / (1 - q^2)``."""
    n = _check_n(n)
    if n == 0:
        return 0.0
    logp = math.log(d.p)
    return math.expm1(n * logp) / math.expm1(logp)


def q_factorial(n: int, d: DeformationParam) -> float:
    n = _check_n(n)
    out = 1.0
    for k in range(1, n + 1):
        out *= q_int(k, d)
    if not math.isfinite(out):
        raise OverflowError(f"[{n}]_q! exceeds the floating point range")
    return out


def q_double_factorial_odd(n: int, d: DeformationParam) -> float:
    """``[2n-1]_q!! = prod_{k=1..n} [2k-1]_q`` (empty product is 1)."""
    n = _check_n(n)
    out = 1.0
    for k in range(1, n + 1):
        out *= q_int(2 * k - 1, d)
    return out


def q_double_factorial_even(n: int, d: DeformationParam) -> float:
    """``[2n]_q!! = prod_{k=1..n} [2k]_q`` (empty product is 1)."""
    n = _check_n(n)
    out = 1.0
    for k in range(1, n + 1):
        out *= q_int(2 * k, d)
    return out


def q_binomial_delta(p_exp: int, d: DeformationParam) -> float:
    """Alternating q-binomial sum; equals 1 for ``p_exp == 0`` and 0 otherwise.

    Kept as a runtime self-check of the q-binomial theorem that the
    normal-ordering inversion relies on.
    """
    p_exp = _check_n(p_exp)
    fact = q_factorials(p_exp, d)
    total = 0.0
    for k in range(p_exp + 1):
        total += (-1) ** k * d.p ** (k * (k - 1) // 2) * fact[p_exp] / (fact[k] * fact[p_exp - k])
    return total


def q_pochhammer_inf(a, base: float, tol: float = 1e-16):
    """Infinite q-Pochhammer ``(a; base)_inf``, truncated once ``base**k < tol``.

    ``a`` may be a scalar or an array; the product is taken elementwise.
    """
    if not (0.0 < base < 1.0):
        raise InvalidParameter(f"base must lie in (0, 1), got {base!r}")
    if tol <= 0:
        raise InvalidParameter("tol must be positive")
    n_terms = max(1, math.ceil(math.log(tol) / math.log(base)))
    powers = base ** np.arange(n_terms)
    a_arr = np.asarray(a)
    if a_arr.ndim == 0:
        return np.prod(1.0 - a_arr * powers).item()
    out = np.ones(a_arr.shape, dtype=np.result_type(a_arr, float))
    for pk in powers:
        out *= 1.0 - a_arr * pk
    return out


def q_pochhammer_inf_logabs(a, base: float, tol: float = 1e-16):
    """``log |(a; base)_inf|``, for products that under- or overflow in linear scale."""
    if not (0.0 < base < 1.0):
        raise InvalidParameter(f"base must lie in (0, 1), got {base!r}")
    n_terms = max(1, math.ceil(math.log(tol) / math.log(base)))
    a_arr = np.asarray(a)
    out = np.zeros(a_arr.shape)
    pk = 1.0
    for _ in range(n_terms):
        out += np.log(np.abs(1.0 - a_arr * pk))
        pk *= base
    return out if a_arr.ndim else float(out)


# table versions used by the numerical modules

def q_ints(n_max: int, d: DeformationParam) -> np.ndarray:
    """Array ``[[0]_q, [1]_q, ..., [n_max]_q]``."""
    n = np.arange(n_max + 1, dtype=float)
    logp = math.log(d.p)
    return np.expm1(n * logp) / math.expm1(logp)


def q_factorials(n_max: int, d: DeformationParam) -> np.ndarray:
    ints = q_ints(n_max, d)
    ints[0] = 1.0
    out = np.cumprod(ints)
    if not np.all(np.isfinite(out)):
        raise OverflowError(f"[n]_q! exceeds the floating point range below n={n_max}")
    return out


def log_q_factorials(n_max: int, d: DeformationParam) -> np.ndarray:
    ints = q_ints(n_max, d)
    ints[0] = 1.0
    return np.cumsum(np.log(ints))
