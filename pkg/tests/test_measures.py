import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from circleflow.circlemap import ConformalConjugacy, make_linearizable, make_rotation
from circleflow.fourier import circle_grid
from circleflow.measures import (CircleMeasure, ConvergenceError, conformal_measure_oracle, conformal_measure_solve,
                                 density_equation_residual, pushforward, verify_conformal, weak_distance)


def test_lebesgue_moments():
    mu = CircleMeasure.lebesgue(64)
    m = mu.moments(4)
    assert abs(m[0] - 1) < 1e-15 and np.max(np.abs(m[1:])) < 1e-15


def test_dirac_moments():
    t = 0.7
    mu = CircleMeasure.dirac(t, 64)
    k = np.arange(5)
    assert np.max(np.abs(mu.moments(4) - np.exp(-1j * k * t))) < 1e-15


def test_negative_density_rejected():
    with pytest.raises(ValueError):
        CircleMeasure(np.array([1.0, -1.0, 1.0, 1.0]))


@given(st.floats(0.0, 6.28), st.floats(0.01, 3.1))
@settings(max_examples=30, deadline=None)
def test_arc_mass_matches_quadrature(a, L):
    mu = CircleMeasure.from_function(lambda t: 1 + 0.5 * np.cos(t) + 0.2 * np.sin(3 * t), 128)
    x, w = np.polynomial.legendre.leggauss(40)
    xs = a + 0.5 * L * (x + 1)
    quad = 0.5 * L * np.sum(w * mu.density_at(xs))
    assert abs(mu.arc_mass(np.array([a]), np.array([a + L]))[0] - quad) < 1e-13


def test_moebius_closed_form_density(moebius_map):
    # for h_a the 2-conformal density is proportional to |xi - a|^2
    mu = conformal_measure_solve(moebius_map, 2.0)
    xi = np.exp(1j * mu.theta)
    ref = np.abs(xi - 0.3) ** 2
    ref = ref / (2 * np.pi * np.mean(ref))
    assert np.max(np.abs(mu.density - ref)) < 1e-10


@pytest.mark.parametrize("s", [0.0, 1.5, 2.0, 3.0])
def test_solver_matches_oracle(moebius_map, s):
    mu = conformal_measure_solve(moebius_map, s)
    ref = conformal_measure_oracle(moebius_map, s)
    assert np.max(np.abs(mu.density - ref.density)) < 1e-10
    assert density_equation_residual(mu, moebius_map, s) < 1e-10


def test_s_equal_zero_is_invariant_measure(fourier_map):
    mu = conformal_measure_solve(fourier_map, 0.0)
    nu = pushforward(mu, fourier_map)
    assert weak_distance(mu, nu) < 1e-10


def test_s_equal_one_is_lebesgue(fourier_map):
    mu = conformal_measure_solve(fourier_map, 1.0)
    assert np.max(np.abs(mu.density - 1 / (2 * np.pi))) < 1e-14


def test_newton_method_without_linearizer(moebius_map):
    from circleflow.circlemap import CircleMap
    bare = CircleMap(moebius_map.series, moebius_map.N, moebius_map.annulus, moebius_map.rotation_number,
                     "constructed", None)
    mu = conformal_measure_solve(bare, 2.0)
    assert mu.meta["method"] == "newton"
    ref = conformal_measure_oracle(moebius_map, 2.0)
    assert np.max(np.abs(mu.density - ref.density)) < 1e-10


def test_birkhoff_method_small_grid():
    g = make_linearizable("golden", ConformalConjugacy.moebius(0.2), N=64)
    mu = conformal_measure_solve(g, 2.0, "birkhoff", n_birkhoff=600)
    ref = conformal_measure_oracle(g, 2.0)
    assert np.max(np.abs(mu.density - ref.density)) < 1e-8


def test_birkhoff_reports_nonconvergence():
    g = make_linearizable("golden", ConformalConjugacy.moebius(0.2), N=64)
    with pytest.raises(ConvergenceError) as info:
        conformal_measure_solve(g, 2.0, "birkhoff", n_birkhoff=20, tol=1e-14)
    assert "birkhoff_gap" in info.value.diagnostics


def test_verify_conformal_positive_and_negative(moebius_map):
    mu = conformal_measure_solve(moebius_map, 2.0)
    good = verify_conformal(mu, moebius_map, 2.0, seed=3)
    assert good["max_residual"] < 1e-12 and good["seed"] == 3
    bad = verify_conformal(CircleMeasure.lebesgue(mu.M), moebius_map, 2.0, seed=3)
    assert bad["max_residual"] > 1e-2


def test_rotation_measure_is_lebesgue():
    mu = conformal_measure_solve(make_rotation("golden", 32), 2.0)
    assert np.max(np.abs(mu.density - 1 / (2 * np.pi))) < 1e-15


def test_pullback_conj_reflects_atoms_and_density():
    mu = CircleMeasure(np.arange(8, dtype=float) + 1, ((0.5, 1.0),))
    nu = mu.pullback_conj()
    assert np.allclose(nu.density_at(-mu.theta), mu.density)
    assert abs(nu.atoms[0][0] - (2 * np.pi - 0.5)) < 1e-15


def test_json_round_trip():
    mu = CircleMeasure.lebesgue(16).mix(CircleMeasure.dirac(1.0, 16), 0.25)
    back = CircleMeasure.from_json(json.loads(json.dumps(mu.to_json())))
    assert np.array_equal(back.density, mu.density) and back.atoms == mu.atoms
    assert mu.to_csv().splitlines()[0].startswith("theta")


def test_weak_distance_lebesgue_dirac():
    assert abs(weak_distance(CircleMeasure.lebesgue(32), CircleMeasure.dirac(0.0, 32)) - 1.0) < 1e-15


def test_pushforward_preserves_mass(fourier_map):
    mu = CircleMeasure.from_function(lambda t: 2 + np.cos(t), fourier_map.M)
    assert abs(pushforward(mu, fourier_map).mass - 1) < 1e-12
    xi = circle_grid(4)
    assert xi.shape == (4,)
