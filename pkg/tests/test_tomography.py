import math

import numpy as np
import pytest

from qtomo.errors import IncompleteTable
from qtomo.fock import DensityMatrix, FockState, MomentTable, moment_table_direct, number_state
from qtomo.qmath import DeformationParam
from qtomo.quadrature import eval_J, gauss_rule, vacuum_density
from qtomo.states import Kind, StateSpec, figure_specs, make_coherent, make_squeezed
from qtomo.tomography import (
    Tomogram,
    janus_score,
    make_grid,
    tomogram_density,
    tomogram_from_moments,
    tomogram_pure,
    x_grid,
)

THETAS = np.linspace(0, 2 * math.pi, 16, endpoint=False)


def xs_inside(d, n=81):
    return np.linspace(-0.99 * d.L, 0.99 * d.L, n)


@pytest.mark.parametrize("q", [0.5, 0.7, 0.9])
def test_vacuum_tomogram_is_vacuum_density(q):
    d = DeformationParam(q)
    X = xs_inside(d)
    w = tomogram_pure(number_state(0, d), THETAS, X)
    assert w.shape == (16, 81)
    assert np.max(np.abs(w - vacuum_density(X, d))) < 1e-14


def test_first_excited_tomogram():
    d = DeformationParam(0.7)
    X = xs_inside(d)
    w = tomogram_pure(number_state(1, d), THETAS, X)
    ref = vacuum_density(X, d) * (2 * X / math.sqrt(1 + d.p)) ** 2
    assert np.max(np.abs(w - ref)) < 1e-14


def test_scalar_call():
    d = DeformationParam(0.7)
    assert isinstance(Tomogram(number_state(0, d))(0.3, 0.1), float)


def test_mixture_equals_weighted_pure():
    d = DeformationParam(0.7)
    a = make_coherent(0.4, d).padded(40)
    b = make_squeezed(0.3, 0.2, "vacuum", d).padded(40)
    rho = 0.3 * np.outer(a.amps, a.amps.conj()) + 0.7 * np.outer(b.amps, b.amps.conj())
    X = xs_inside(d)
    mixed = tomogram_density(DensityMatrix(d, rho), THETAS, X)
    ref = 0.3 * tomogram_pure(a, THETAS, X) + 0.7 * tomogram_pure(b, THETAS, X)
    assert np.max(np.abs(mixed - ref)) < 1e-13


def test_pure_and_density_agree():
    d = DeformationParam(0.9)
    s = make_coherent(0.5 - 0.5j, d)
    X = xs_inside(d)
    assert np.max(np.abs(tomogram_pure(s, THETAS, X) - tomogram_density(DensityMatrix.from_state(s), THETAS, X))) < 1e-13


def test_two_level_coherence_phase():
    # (|0> + |1>)/sqrt2: omega/W = (1 + 2 J_1 cos(theta) + J_1^2) / 2
    d = DeformationParam(0.6)
    s = FockState(d, np.array([1, 1]) / math.sqrt(2))
    X = xs_inside(d, 11)
    J1 = eval_J(1, X, d)[1]
    ref = vacuum_density(X, d) * 0.5 * (1 + 2 * np.multiply.outer(np.cos(THETAS), J1) + J1**2)
    assert np.max(np.abs(tomogram_pure(s, THETAS, X) - ref)) < 1e-14


@pytest.mark.parametrize("q", [0.7, 0.9])
def test_moment_series_exact_at_full_order(q):
    d = DeformationParam(q)
    X = xs_inside(d)
    for s in (make_coherent(0.6 + 0.2j, d), make_squeezed(0.5, 0.0, "vacuum", d)):
        t = moment_table_direct(s, 2 * s.cutoff)
        err = np.max(np.abs(tomogram_from_moments(t, THETAS, X) - tomogram_pure(s, THETAS, X)))
        assert err < 1e-8


@pytest.mark.parametrize("q", [0.7, 0.9])
def test_moment_series_truncated_convergence(q):
    d = DeformationParam(q)
    X = xs_inside(d)
    s = make_coherent(0.6 + 0.2j, d)
    t = moment_table_direct(s, 24)
    ref = tomogram_pure(s, THETAS, X)
    assert np.max(np.abs(tomogram_from_moments(t, THETAS, X, 24) - ref)) < 1e-6
    sq = make_squeezed(0.5, 0.0, "vacuum", d)
    tq = moment_table_direct(sq, 24)
    ref = tomogram_pure(sq, THETAS, X)
    errs = [np.max(np.abs(tomogram_from_moments(tq, THETAS, X, G) - ref)) for G in (8, 16, 24)]
    assert errs[0] > errs[1] > errs[2]


def test_moment_series_incomplete():
    d = DeformationParam(0.7)
    vals = MomentTable.blank(4)
    vals[0, 0] = 1
    with pytest.raises(IncompleteTable):
        Tomogram(MomentTable(d, 4, vals))


def test_unknown_source():
    with pytest.raises(TypeError):
        Tomogram(np.zeros(3))


@pytest.mark.parametrize("name", list(figure_specs()))
@pytest.mark.parametrize("q", [0.7, 0.9])
def test_grid_normalization_and_positivity(name, q):
    d = DeformationParam(q)
    g = make_grid(figure_specs()[name], 16, 64, d)
    assert g.x_kind == "gauss"
    assert np.max(np.abs(g.normalization() - 1)) < 1e-10
    assert g.values.min() >= 0


def test_uniform_grid_normalization():
    d = DeformationParam(0.7)
    g = make_grid(figure_specs()["cat-even"], 16, 400, d, x_kind="uniform")
    assert np.max(np.abs(g.normalization() - 1)) < 1e-3
    xs, w = x_grid(d, 10, "uniform")
    assert w is None and np.all(np.abs(xs) < d.L) and np.allclose(xs, -xs[::-1], atol=0)


@pytest.mark.parametrize("name", list(figure_specs()))
def test_grid_symmetries(name):
    d = DeformationParam(0.9)
    g = make_grid(figure_specs()[name], 32, 48, d, x_kind="uniform")
    assert g.reflection_error() < 1e-10
    if name in ("cat-even", "squeezed-vacuum"):
        assert g.pi_periodicity_error() < 1e-10


def test_coherent_is_not_pi_periodic():
    d = DeformationParam(0.9)
    g = make_grid(StateSpec(Kind.COHERENT, alpha=0.5), 32, 48, d, x_kind="uniform")
    assert g.pi_periodicity_error() > 1e-2
    with pytest.raises(ValueError):
        make_grid(StateSpec(Kind.COHERENT, alpha=0.5), 31, 48, d).pi_periodicity_error()


@pytest.mark.parametrize("name", list(figure_specs()))
def test_peak_grows_with_deformation(name):
    peaks = [make_grid(figure_specs()[name], 64, 64, DeformationParam(q), x_kind="uniform").peak() for q in (0.9, 0.7, 0.5)]
    assert peaks[0] < peaks[1] < peaks[2]


def test_coherent_non_deformed_limit():
    d = DeformationParam(0.9999)
    alpha = 0.5 + 0.3j
    th = np.array([0.0, 1.0, 2.5])
    X = np.linspace(-3, 3, 61)
    mean = math.sqrt(2) * np.real(alpha * np.exp(-1j * th))
    ref = np.exp(-((X - mean[:, None]) ** 2)) / math.sqrt(math.pi)
    assert np.max(np.abs(tomogram_pure(make_coherent(alpha, d), th, X) - ref)) < 1e-3


def test_janus_score_self_and_pair():
    d = DeformationParam(0.9)
    specs = figure_specs()
    a = make_grid(specs["cat-even"], 32, 48, d, x_kind="uniform")
    b = make_grid(specs["squeezed-vacuum"], 32, 48, d, x_kind="uniform")
    same = janus_score(a, a, shift=0.0)
    assert same["score"] == pytest.approx(1.0)
    res = janus_score(a, b)
    assert set(res) == {"shift", "score", "best_shift", "best_score"}
    assert -1 <= res["score"] <= res["best_score"] <= 1
    with pytest.raises(ValueError):
        janus_score(a, make_grid(specs["cat-odd"], 32, 40, d, x_kind="uniform"))


def test_gauss_grid_uses_rule_nodes():
    d = DeformationParam(0.7)
    g = make_grid(number_state(2, d), 4, 20)
    assert np.array_equal(g.xs, gauss_rule(d, 20).nodes)
    assert g.thetas[1] == pytest.approx(math.pi / 2)
