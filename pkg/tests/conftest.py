import pytest

from atomchain.potential import PotentialParams, critical_constants


@pytest.fixture(scope="session")
def params():
    """Standard parameter set used throughout: stress prefactor 3A = 0.25."""
    return PotentialParams.from_stress_scale(0.25)


@pytest.fixture(scope="session")
def consts(params):
    return critical_constants(params)
