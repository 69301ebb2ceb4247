import numpy as np
import pytest

from diracinv import catalog
from diracinv.fields import SampleDomain


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


@pytest.fixture(scope="session")
def unit_domain():
    return SampleDomain(count=60, seed=7)


@pytest.fixture(scope="session")
def rest_wave():
    return catalog.build("rest_plane_wave", {"kappa": 1.0})


@pytest.fixture(scope="session")
def degenerate_default():
    return catalog.build("degenerate_example",
                         {"kappa": 1.0, "alpha": 0.3, "phi1": 0.2, "phi2": -0.1})
