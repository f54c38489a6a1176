import numpy as np
import pytest

from leoshare import ShadowedRicianParams, handheld_params, vsat_params


@pytest.fixture(scope="session")
def handheld():
    return handheld_params()


@pytest.fixture(scope="session")
def vsat():
    return vsat_params()


@pytest.fixture(scope="session")
def sr_table():
    """Reference Shadowed-Rician parameter set (m=1 column used by the presets)."""
    return ShadowedRicianParams(m=1, b=0.063, omega=8.97e-4)


@pytest.fixture(scope="session")
def sr_m3():
    return ShadowedRicianParams(m=3, b=0.063, omega=8.97e-4)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
