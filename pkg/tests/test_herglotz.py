import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from circleflow.herglotz import (HerglotzField, ResolutionError, boundary_values, herglotz_eval,
                                 poltoratski_reconstruct, poltoratski_report, positivity_probe)
from circleflow.measures import CircleMeasure, weak_distance


def test_lebesgue_transform_is_one():
    z = np.array([1.5, -2j, 3 + 4j])
    assert np.max(np.abs(herglotz_eval(CircleMeasure.lebesgue(64), z) - 1)) < 1e-15


@given(st.floats(0, 6.28), st.floats(1.01, 5.0), st.floats(0, 6.28))
@settings(max_examples=30, deadline=None)
def test_dirac_closed_form(t, rho, phi):
    z = rho * np.exp(1j * phi)
    xi = np.exp(1j * t)
    H = herglotz_eval(CircleMeasure.dirac(t, 32), np.array([z]))[0]
    assert abs(H - (xi + 1 / z) / (xi - 1 / z)) < 1e-12


def test_series_matches_direct_quadrature():
    mu = CircleMeasure.from_function(lambda t: 1 + 0.5 * np.cos(t) + 0.3 * np.sin(2 * t), 256)
    z = 1.3 * np.exp(0.9j)
    xi = np.exp(1j * mu.theta)
    direct = 2 * np.pi * np.mean((xi + 1 / z) / (xi - 1 / z) * mu.density)
    assert abs(herglotz_eval(mu, np.array([z]))[0] - direct) < 1e-13


def test_interior_points_rejected():
    with pytest.raises(ValueError):
        HerglotzField(CircleMeasure.lebesgue(16))(np.array([0.5]))


# the two-point extrapolation error grows with the bandwidth, so higher modes need smaller radii
@pytest.mark.parametrize("f,eps", [(lambda t: 1 + 0.5 * np.cos(t), (1e-3, 5e-4)),
                                   (lambda t: 2 + np.sin(3 * t) - 0.4 * np.cos(5 * t), (2e-4, 1e-4))])
def test_fatou_recovery(f, eps):
    mu = CircleMeasure.from_function(f, 512)
    bv = boundary_values(mu, eps)
    assert np.max(np.abs(bv.P - 2 * np.pi * mu.density_at(-bv.theta))) < 1e-6
    assert not np.any(bv.flagged)


def test_exact_boundary_of_atom_is_cotangent():
    t0 = 0.4
    field = HerglotzField(CircleMeasure.dirac(t0, 16))
    th = np.array([0.3, 1.7, 4.0])
    bv = field.exact_boundary(th)
    assert np.max(np.abs(bv.real)) < 1e-15
    assert np.max(np.abs(bv.imag + 1 / np.tan(0.5 * (th + t0)))) < 1e-13


def test_flags_near_atoms():
    mu = CircleMeasure.lebesgue(256).mix(CircleMeasure.dirac(0.0, 256), 0.5)
    bv = boundary_values(mu)
    assert bv.flagged[0]
    assert "flagged" in bv.to_csv().splitlines()[0]


def test_poltoratski_masses_and_distances():
    mu = CircleMeasure.lebesgue(1024).mix(CircleMeasure.dirac(0.0, 1024), 0.5)
    rep = poltoratski_report(mu, [1e2, 1e3, 1e4])
    masses = [r["mass"] for r in rep["rows"]]
    for t, m in zip([1e2, 1e3, 1e4], masses):
        assert abs(m - t * np.arctan(1 / (2 * t))) < 1e-6      # closed form of |cot| superlevel sets
    wd = [r["weak_distance"] for r in rep["rows"]]
    assert wd[0] > wd[1] > wd[2]


def test_poltoratski_absolutely_continuous_gives_nothing():
    mu = CircleMeasure.from_function(lambda t: 1 + 0.5 * np.cos(t), 256)
    rec = poltoratski_reconstruct(mu, [1e3])[0]
    assert rec.mass == 0.0


def test_poltoratski_resolution_error():
    mu = CircleMeasure.lebesgue(64).mix(CircleMeasure.dirac(0.0, 64), 0.5)
    with pytest.raises(ResolutionError):
        poltoratski_reconstruct(mu, [1e12])


def test_positivity_probe():
    assert positivity_probe(CircleMeasure.lebesgue(32)) > 0.99
    mu = CircleMeasure.from_function(lambda t: np.exp(np.cos(t)), 128)
    assert positivity_probe(mu) > 0
    assert weak_distance(mu, mu) == 0
