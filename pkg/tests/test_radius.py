import numpy as np
import pytest

from circleflow.flow import Germ
from circleflow.radius import radius_trace, verify_radius_identities

from conftest import GOLDEN


def test_linear_germ_radius_is_exponential():
    tr = radius_trace(Germ("linear", GOLDEN), [0.0, 0.1, 0.2], 256)
    assert np.max(np.abs(tr.r - np.exp(tr.t))) < 1e-13
    assert np.max(np.abs(tr.k_lift - np.linspace(0, 2 * np.pi, 256, endpoint=False))) < 1e-13


def test_linear_germ_identities_hold_to_difference_error():
    h = 1e-4
    rep = verify_radius_identities(radius_trace(Germ("linear", GOLDEN), [-h, 0.0, h], 256))
    assert rep["max_residual_real"] < 1e-8        # centered difference of e^t
    assert rep["max_residual_imag"] < 1e-12


@pytest.fixture(scope="module")
def moebius_traces():
    G = Germ("moebius", GOLDEN, 0.2)
    return [verify_radius_identities(radius_trace(G, [0.5 - h, 0.5, 0.5 + h], 1024)) for h in (2e-3, 1e-3)]


def test_moebius_germ_identities(moebius_traces):
    coarse, fine = moebius_traces
    assert fine["max_residual_real"] < 1e-4
    assert fine["max_residual_imag"] < 1e-4
    assert fine["max_integral_gap"] < 1e-4
    order = np.log2(coarse["max_residual_imag"] / fine["max_residual_imag"])
    assert 1.8 < order < 2.2


def test_radius_monotone_and_bounded():
    G = Germ("moebius", GOLDEN, 0.2)
    tr = radius_trace(G, np.linspace(-1.0, 1.0, 5), 512)
    inc = tr.increments()
    assert min(inc["first_differences"]) > 0
    assert np.all(tr.r < G.siegel_radius)
    assert max(inc["k_gap_over_dt"]) < 1.0
    rep = verify_radius_identities(tr)
    csv = tr.to_csv(rep["rows"])
    assert csv.splitlines()[0] == "t,r,capacity,residual_real_identity,residual_imag_identity"
    assert len(csv.splitlines()) == 6


def test_non_uniform_times_rejected():
    with pytest.raises(ValueError):
        radius_trace(Germ("linear", GOLDEN), [0.0, 0.1, 0.3], 64)
