import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from circleflow.fourier import (Laurent, certified_annulus, circle_grid, invert_lift, lift_from_circle_values,
                                trig_eval, trig_from_samples)


def test_from_samples_recovers_laurent_polynomial():
    c = np.array([0.1 - 0.2j, 0.0, 1.0, 0.3j, 0.05])          # powers -2 .. 2
    M = 64
    z = np.exp(1j * circle_grid(M))
    vals = sum(ck * z ** (k - 2) for k, ck in enumerate(c))
    L = Laurent.from_samples(vals)
    for k in range(-2, 3):
        assert abs(L.coef(k) - c[k + 2]) < 1e-14
    w = 1.3 * np.exp(0.4j)
    assert abs(L(w) - sum(ck * w ** (k - 2) for k, ck in enumerate(c))) < 1e-13


def test_from_samples_with_radius():
    M = 64
    z = 1.5 * np.exp(1j * circle_grid(M))
    L = Laurent.from_samples(z + 0.5 / z, radius=1.5)
    assert abs(L.coef(1) - 1) < 1e-14 and abs(L.coef(-1) - 0.5) < 1e-14


def test_derivative():
    L = Laurent(np.array([2.0, 0.0, 1.0, 3.0]), -1)   # 2/z + z + 3 z^2
    z = 0.7 + 0.9j
    assert abs(L.deriv()(z) - (-2 / z ** 2 + 1 + 6 * z)) < 1e-13


@pytest.mark.parametrize("rho", [0.3, 0.6])
def test_certified_annulus_for_geometric_decay(rho):
    M = 256
    z = np.exp(1j * circle_grid(M))
    L = Laurent.from_samples(z + rho * z / (1 - rho * z) + rho / (z - rho))
    lo, hi = certified_annulus(L, 1e-10)
    assert 1.0 < hi < 1.0 / rho
    assert rho < lo < 1.0


@given(st.lists(st.floats(-0.05, 0.05), min_size=1, max_size=4))
@settings(max_examples=25, deadline=None)
def test_invert_lift_round_trip(cs):
    M = 128
    th = circle_grid(M)
    p = sum(c * np.sin((k + 1) * th) for k, c in enumerate(cs))
    sigma = trig_from_samples(p)
    y = circle_grid(37) + 0.01
    x = invert_lift(sigma, y)
    assert np.max(np.abs(x + trig_eval(sigma, x) - y)) < 1e-13


def test_lift_from_circle_values_is_continuous():
    th = circle_grid(256)
    S = th + 0.3 * np.sin(th) + 2.0
    lift = lift_from_circle_values(np.exp(1j * S), th)
    assert np.max(np.abs(np.diff(lift))) < 0.1
    assert np.max(np.abs(np.exp(1j * lift) - np.exp(1j * S))) < 1e-13
