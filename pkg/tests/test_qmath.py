from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qtomo.errors import InvalidParameter
from qtomo.qmath import (
    DeformationParam,
    log_q_factorials,
    q_binomial_delta,
    q_double_factorial_even,
    q_double_factorial_odd,
    q_factorial,
    q_factorials,
    q_int,
    q_ints,
    q_pochhammer_inf,
    q_pochhammer_inf_logabs,
)

D5 = DeformationParam(0.5)


# exact rational oracle at q = 1/2
def frac_int(n, q=Fraction(1, 2)):
    p = q * q
    return sum((p**k for k in range(n)), Fraction(0))


def frac_fact(n):
    out = Fraction(1)
    for k in range(1, n + 1):
        out *= frac_int(k)
    return out


def test_deformation_param_constants():
    d = DeformationParam(0.7)
    assert d.p == pytest.approx(0.49, abs=1e-15)
    assert d.L >= 1
    assert d.L**2 * (1 - d.p) == pytest.approx(1 + d.p, rel=1e-14)
    assert d.R == pytest.approx(1 / np.sqrt(1 - 0.49))


@pytest.mark.parametrize("q", [0.0, 1.0, -0.3, 1.5, float("nan")])
def test_deformation_param_rejects(q):
    with pytest.raises(InvalidParameter):
        DeformationParam(q)


@pytest.mark.parametrize("n, expected", [(0, 0.0), (1, 1.0), (2, 1.25), (3, 1.3125)])
def test_q_int_examples(n, expected):
    assert q_int(n, D5) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("n, expected", [(0, 1.0), (2, 1.25), (3, 1.640625)])
def test_q_factorial_examples(n, expected):
    assert q_factorial(n, D5) == pytest.approx(expected, abs=1e-15)


def test_against_rational_oracle():
    for n in range(25):
        assert q_int(n, D5) == pytest.approx(float(frac_int(n)), rel=1e-14, abs=0)
        assert q_factorial(n, D5) == pytest.approx(float(frac_fact(n)), rel=1e-13)
    table = q_factorials(24, D5)
    assert table == pytest.approx([float(frac_fact(n)) for n in range(25)], rel=1e-13)
    assert np.exp(log_q_factorials(24, D5)) == pytest.approx(table, rel=1e-12)


def test_double_factorials():
    assert q_double_factorial_odd(0, D5) == 1.0
    assert q_double_factorial_odd(1, D5) == 1.0
    assert q_double_factorial_odd(2, D5) == pytest.approx(1.3125)
    assert q_double_factorial_even(0, D5) == 1.0
    assert q_double_factorial_even(1, D5) == pytest.approx(1.25)
    assert q_double_factorial_even(2, D5) == pytest.approx(q_int(2, D5) * q_int(4, D5), rel=1e-15)


@pytest.mark.parametrize("q", [0.3, 0.5, 0.7, 0.9])
def test_double_factorials_compose_factorial(q):
    d = DeformationParam(q)
    for n in range(16):
        prod = q_double_factorial_even(n, d) * q_double_factorial_odd(n, d)
        assert prod == pytest.approx(q_factorial(2 * n, d), rel=1e-12)


def test_q_binomial_delta_examples():
    assert q_binomial_delta(0, DeformationParam(0.7)) == pytest.approx(1.0)
    assert q_binomial_delta(1, DeformationParam(0.7)) == pytest.approx(0.0, abs=1e-15)
    assert abs(q_binomial_delta(4, DeformationParam(0.9))) < 1e-12


@pytest.mark.parametrize("q", [0.3, 0.5, 0.7, 0.9])
def test_q_binomial_delta_vanishes(q):
    d = DeformationParam(q)
    for p in range(1, 13):
        assert abs(q_binomial_delta(p, d)) < 1e-10


def test_q_pochhammer():
    assert q_pochhammer_inf(0, 0.5) == 1.0
    brute = 1.0
    for k in range(200):
        brute *= 1 - 0.3 * 0.25**k
    assert q_pochhammer_inf(0.3, 0.25, tol=1e-16) == pytest.approx(brute, abs=1e-12)
    assert q_pochhammer_inf(1.0, 0.25) == 0.0
    a = 0.4 - 0.2j
    assert q_pochhammer_inf(a, 1e-20) == pytest.approx(1 - a, abs=1e-15)
    z = np.array([0.2, 0.5 + 0.5j, -0.9])
    assert q_pochhammer_inf(z, 0.6) == pytest.approx([q_pochhammer_inf(x, 0.6) for x in z])
    assert q_pochhammer_inf_logabs(z, 0.6) == pytest.approx(np.log(np.abs(q_pochhammer_inf(z, 0.6))))
    with pytest.raises(InvalidParameter):
        q_pochhammer_inf(0.1, 1.0)


def test_non_deformed_limit():
    d = DeformationParam(1 - 1e-6)
    for n in range(1, 21):
        assert abs(q_int(n, d) - n) < 1e-4 * n


@settings(max_examples=60, deadline=None)
@given(q=st.floats(0.05, 0.98), n=st.integers(0, 200))
def test_q_int_monotone_and_bounded(q, n):
    d = DeformationParam(q)
    assert q_int(n, d) <= q_int(n + 1, d) <= 1 / (1 - d.p) * (1 + 1e-15)
    if d.p**n > 1e-12:
        # strict while the increment p^n is resolvable in double precision
        assert q_int(n, d) < q_int(n + 1, d) < 1 / (1 - d.p)
    assert q_ints(n + 1, d)[n] == pytest.approx(q_int(n, d), rel=1e-14, abs=1e-300)
