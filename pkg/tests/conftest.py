import numpy as np
import pytest

from demsim import (
    BathSpec,
    Propagator,
    SpectralFunction,
    build_hamiltonian,
    discretize,
    three_level_preset,
    two_level_preset,
)


@pytest.fixture(scope="session")
def default_bath():
    return discretize(SpectralFunction(0.1, 12.0), BathSpec(n_max=250, omega_max=10.0, temperature=1.0))


@pytest.fixture(scope="session")
def two_level_h(default_bath):
    return build_hamiltonian(two_level_preset(1.0, 0.0), default_bath)


@pytest.fixture(scope="session")
def two_level_prop(default_bath):
    return Propagator.from_parts(two_level_preset(1.0, 0.0), default_bath)


@pytest.fixture(scope="session")
def three_level_prop(default_bath):
    return Propagator.from_parts(three_level_preset(1.0, 0.3, 0.6), default_bath)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
