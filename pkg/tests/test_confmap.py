import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from circleflow.circlemap import AnnulusError
from circleflow.confmap import (CurveError, JordanCurveSamples, boundary_residual, exterior_map,
                                hull_from_invariant_curve, welding)
from circleflow.fourier import circle_grid


@given(st.floats(0.2, 5.0), st.floats(-0.1, 0.1), st.floats(-0.1, 0.1))
@settings(max_examples=10, deadline=None)
def test_circle_capacity(R, x, y):
    c = complex(x, y) * R
    e = exterior_map(JordanCurveSamples.circle(R, c, M=256))
    assert abs(e.capacity - math.log(R)) < 1e-12
    z = 1.4 * np.exp(1j * circle_grid(16))
    assert np.max(np.abs(e.phi(z) - (R * z + c))) < 1e-11


@pytest.mark.parametrize("a,b", [(2.0, 1.0), (1.0, 0.6), (3.0, 2.5)])
def test_ellipse_capacity(a, b):
    e = exterior_map(JordanCurveSamples.ellipse(a, b, M=1024))
    assert abs(e.capacity - math.log((a + b) / 2)) < 1e-10
    assert boundary_residual(e) < 1e-10


def test_reparametrized_ellipse_is_joukowski():
    def fn(s):
        u = s + 0.3 * np.sin(s)
        return 2 * np.cos(u) + 1j * np.sin(u)
    e = exterior_map(JordanCurveSamples.from_function(fn, M=2048))
    z = 1.3 * np.exp(1j * circle_grid(64))
    assert np.max(np.abs(e.phi(z) - (1.5 * z + 0.5 / z))) < 1e-10
    assert boundary_residual(e) < 1e-8


def test_psi_inverts_phi():
    e = exterior_map(JordanCurveSamples.ellipse(2.0, 1.0, M=512))
    z = np.array([1.2 + 0.3j, -2.0, 3j])
    assert np.max(np.abs(e.psi(e.phi(z)) - z)) < 1e-12


def test_scaling_shifts_capacity():
    c = JordanCurveSamples.ellipse(2.0, 1.0, M=512)
    e1 = exterior_map(c)
    e2 = exterior_map(c.scaled(2.0))
    assert abs(e2.capacity - e1.capacity - math.log(2)) < 1e-12


def test_origin_outside_rejected():
    with pytest.raises(CurveError):
        JordanCurveSamples.circle(1.0, center=3.0, M=64)


def test_non_star_shaped_rejected():
    def fn(s):   # strongly indented curve
        return (1 + 0.9 * np.cos(3 * s)) * np.exp(1j * (s + 0.5 * np.sin(3 * s)))
    with pytest.raises(CurveError):
        JordanCurveSamples.from_function(fn, M=256)


def test_welding_round_trip_and_monotone():
    e = exterior_map(JordanCurveSamples.ellipse(2.0, 1.0, M=512))
    w = welding(e)
    assert w.is_monotone()
    th = circle_grid(512)
    s = np.mod(np.angle(w.forward(th)), 2 * np.pi)
    assert np.max(np.abs(w.inverse(s) - np.exp(1j * th))) < 1e-12


def test_invariant_curve_outside_annulus(moebius_map):
    with pytest.raises(AnnulusError):
        hull_from_invariant_curve(moebius_map, 50.0)
    curve = hull_from_invariant_curve(moebius_map, 1.1)
    assert curve.M > 0


def test_rotation_invariant_curve_is_circle():
    from circleflow.circlemap import make_rotation
    curve = hull_from_invariant_curve(make_rotation("golden", 64), 1.2, M=256)
    assert abs(exterior_map(curve).capacity - math.log(1.2)) < 1e-13


def test_invariant_curve_is_invariant(moebius_map):
    curve = hull_from_invariant_curve(moebius_map, 1.03, M=512)   # image stays inside g's annulus
    s = circle_grid(512)
    omega = 2 * np.pi * moebius_map.rotation_number
    assert np.max(np.abs(moebius_map.eval(curve(s)) - curve(s + omega))) < 1e-9


def test_capacity_tends_to_zero_continuously(moebius_map):
    caps = [exterior_map(hull_from_invariant_curve(moebius_map, r, M=512)).capacity for r in (1.1, 1.01, 1.001)]
    assert caps[0] > caps[1] > caps[2] > 0
    assert caps[2] < 2e-3


def test_nested_ellipses_increasing_capacity():
    small = exterior_map(JordanCurveSamples.ellipse(1.5, 1.0, M=512)).capacity
    big = exterior_map(JordanCurveSamples.ellipse(1.6, 1.05, M=512)).capacity
    assert big > small


def test_circle_welding_with_scaled_disk_is_identity():
    R = 1.7
    e = exterior_map(JordanCurveSamples.circle(R, M=256))
    w = welding(e, interior=lambda w: R * w)
    th = circle_grid(256)
    assert np.max(np.abs(w.forward(th) - np.exp(1j * th))) < 1e-12
