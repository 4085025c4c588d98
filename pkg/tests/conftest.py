import pytest

from crancap import build_params


@pytest.fixture(scope="session")
def baseline():
    """Default scenario: lam 1e-4, L=4, alpha=4, 10 mW, -174 dBm/Hz, 100 MHz, R=600 m."""
    return build_params()


@pytest.fixture(scope="session")
def sparse():
    """The alternative intensity reading implied by the printed disc count."""
    return build_params(lam=1e-5)
