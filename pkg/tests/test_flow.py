import math

import numpy as np
import pytest

from circleflow.circlemap import ConformalConjugacy, make_linearizable, make_rotation
from circleflow.flow import (FlowDomainError, Germ, backward_limit_check, dumps_jsonl, generator, germ_state,
                             integrate_flow, loewner_measure, moebius_flow_oracle, moebius_flowed_samples,
                             phi_exact, sup_distance)
from circleflow.fourier import circle_grid
from circleflow.measures import conformal_measure_oracle, weak_distance

from conftest import GOLDEN


@pytest.fixture(scope="module")
def small_moebius():
    return make_linearizable("golden", ConformalConjugacy.moebius(0.3), N=256)


def test_oracle_hull_is_round_disk():
    a, t = 0.3, 0.1
    c, e, r = moebius_flow_oracle(a, t)
    h = ConformalConjugacy.moebius(a)
    pts = h(r * np.exp(1j * circle_grid(32)))
    assert np.max(np.abs(np.abs(pts - c) - e)) < 1e-14


@pytest.mark.parametrize("t", [0.1, 0.02, -0.05])
def test_exact_flow_matches_closed_form(small_moebius, t):
    st = phi_exact(small_moebius, t)
    assert sup_distance(st.map, moebius_flowed_samples(small_moebius, 0.3, t)) < 1e-12
    assert st.diagnostics["capacity_error"] < 1e-12
    assert st.map.conjugacy_residual() < 1e-11


def test_rotation_is_fixed_point():
    g = make_rotation("golden", 64)
    assert sup_distance(phi_exact(g, 0.1).map, g) < 1e-13


def test_flow_beyond_annulus_fails(small_moebius):
    with pytest.raises(FlowDomainError):
        phi_exact(small_moebius, 5.0)


def test_semigroup_and_round_trip(small_moebius):
    a = phi_exact(phi_exact(small_moebius, 0.05).map, 0.05).map
    assert sup_distance(a, phi_exact(small_moebius, 0.1).map) < 1e-11
    back = phi_exact(phi_exact(small_moebius, 0.1).map, -0.1).map
    assert sup_distance(back, small_moebius) < 1e-11


def test_generator_properties(small_moebius):
    G = generator(small_moebius, "oracle")
    assert G.tangency_residual() < 1e-11
    assert G.herglotz_min() > 0
    # chi(z)/z -> mu(S^1) = 1 at infinity
    assert abs(G.chi_eval(np.array([1e6]))[0] / 1e6 - 1) < 1e-6
    t = 1e-6
    fd = (moebius_flowed_samples(small_moebius, 0.3, t) - small_moebius.samples()) / t
    assert np.max(np.abs(fd - G.X)) < 1e-5


def test_generator_vanishes_at_rotation():
    G = generator(make_rotation("golden", 64))
    assert np.max(np.abs(G.X)) < 1e-14


def test_euler_short_run(small_moebius):
    states = integrate_flow(small_moebius, 0.01, 2.5e-3)
    assert len(states) == 5
    gap = sup_distance(states[-1].map, moebius_flowed_samples(small_moebius, 0.3, 0.01))
    assert gap < 5e-5
    assert all(abs(s.diagnostics["rotation_correction"]) < 1e-4 for s in states)
    lines = dumps_jsonl(states).splitlines()
    assert len(lines) == 5 and '"t": 0.01' in lines[-1]


def test_euler_rejects_bad_step_length(small_moebius):
    with pytest.raises(ValueError):
        integrate_flow(small_moebius, 0.01, 3e-3)


def test_loewner_measure_matches_conformal_measure(small_moebius):
    st = phi_exact(small_moebius, 0.05)
    L = loewner_measure(st, phi_exact(small_moebius, 0.051))
    ref = conformal_measure_oracle(st.map, 2.0).pullback_conj()
    assert weak_distance(L, ref) < 1e-3
    assert abs(L.meta["raw_mass"] - 1) < 1e-10 and L.meta["psd_ok"]


def test_germ_conjugacy_identity():
    G = Germ("moebius", GOLDEN, 0.2)
    z = np.array([0.1 + 0.05j, -0.3j])
    assert np.max(np.abs(G.f(z) - G(G.lam * G.inverse(z)))) < 1e-15
    assert abs(G.deriv(np.array([0j]))[0] - 1) < 1e-15
    assert math.isclose(G.rho_max, 0.5 * G.siegel_radius)


def test_linear_germ_gives_rotation():
    rep = backward_limit_check(Germ("linear", GOLDEN), [-1.0, -2.0], 256)
    assert max(r["sup_distance"] for r in rep["rows"]) < 1e-13


@pytest.mark.parametrize("kind,b", [("moebius", 0.2), ("poly", 0.1)])
def test_backward_maps_approach_rotation(kind, b):
    rep = backward_limit_check(Germ(kind, GOLDEN, b), [-1.0, -2.0, -3.0], 512)
    assert rep["strictly_decreasing"]
    assert rep["max_capacity_error"] < 1e-12


def test_germ_state_outside_certified_disk():
    with pytest.raises(FlowDomainError):
        germ_state(Germ("moebius", GOLDEN, 0.2), 3.0, 256)


def _moebius_germ_closed_form(G, t, M):
    """Round-disk hull of the Moebius germ: H maps |w| = rho to a circle (center c, radius e^t)."""
    A = abs(G.zstar) ** 2
    R = math.exp(t)
    rho = (-A + math.sqrt(A * A + 4 * R * R * A)) / (2 * R)
    c = -G.zstar * rho ** 2 / (A - rho ** 2)
    xi = np.exp(1j * circle_grid(M))
    return (G.f(R * xi + c) - c) / R


@pytest.mark.parametrize("t", [-1.0, -3.0, 0.5])
def test_moebius_germ_state_matches_closed_form(t):
    G = Germ("moebius", GOLDEN, 0.2)
    st, _ = germ_state(G, t, 1024)
    exact = _moebius_germ_closed_form(G, t, 1024)
    assert sup_distance(st.map, exact) < 1e-10
    # the distance to the rotation is itself a closed-form quantity
    dist = np.max(np.abs(exact - G.lam * np.exp(1j * circle_grid(1024))))
    assert abs(st.distance_to_rotation() - dist) < 1e-10


def test_moebius_germ_welding_closed_form():
    G = Germ("moebius", GOLDEN, 0.2)
    t = 0.3
    st, rho = germ_state(G, t, 1024)
    A = abs(G.zstar) ** 2
    c = -G.zstar * rho ** 2 / (A - rho ** 2)
    th = circle_grid(1024)
    exact = G.inverse(math.exp(t) * np.exp(1j * th) + c) / rho
    w = st.hull.welding()
    assert np.max(np.abs(w.forward(th) - exact)) < 1e-8
    s = np.mod(np.angle(w.forward(th)), 2 * np.pi)
    assert np.max(np.abs(w.inverse(s) - np.exp(1j * th))) < 1e-9
