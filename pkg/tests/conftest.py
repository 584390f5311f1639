import numpy as np
import pytest

from circleflow.circlemap import DIOPHANTINE_MENU, ConformalConjugacy, make_linearizable

GOLDEN = DIOPHANTINE_MENU["golden"]


@pytest.fixture(scope="session")
def moebius_map():
    """``h_a o R_alpha o h_a^{-1}`` with ``a = 0.3`` and the golden mean."""
    return make_linearizable("golden", ConformalConjugacy.moebius(0.3))


@pytest.fixture(scope="session")
def fourier_map():
    h = ConformalConjugacy.fourier([0.04, 0.01 + 0.01j], M=1024)
    return make_linearizable("silver", h, N=512)


@pytest.fixture
def rng():
    return np.random.default_rng(0)


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        terminalreporter.write_line(results[n])
