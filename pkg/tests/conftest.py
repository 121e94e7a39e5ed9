import pytest

from star_coverage import QuadratureSpec, gamma_params
from star_coverage.config import default_system_params


@pytest.fixture(scope="session")
def params():
    """Default two-user setup: 30/-30 dBm, N=15, alpha=2.5, d=10 m,
    beta 0.8/0.6, NOMA split 0.4/0.6, OMA shares 0.5/0.5."""
    return default_system_params()


@pytest.fixture(scope="session")
def g15():
    return gamma_params(15)


@pytest.fixture(scope="session")
def quad():
    return QuadratureSpec()
