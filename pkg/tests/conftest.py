import numpy as np
import pytest

from dpsim.dynamics import VesselParams, build_matrices
from dpsim.harness import default_scenario, run_scenario
from dpsim.harness.config import SensingCfg


@pytest.fixture
def params():
    return VesselParams(L=1.0, B=0.25, T=0.08)


@pytest.fixture
def mats(params):
    return build_matrices(params)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def four_corner_run():
    return run_scenario(default_scenario(), write=False)


@pytest.fixture(scope="session")
def noisy_four_corner_run():
    sc = default_scenario()
    sc.sensing = SensingCfg()
    return run_scenario(sc, write=False)
