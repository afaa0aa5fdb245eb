import os

import numpy as np
import pytest

from pulsrodon.cli import Runtime, load_config

CONFIG_DIR = os.path.join(os.path.dirname(__file__), os.pardir, "configs")


def config_path(name: str) -> str:
    return os.path.join(CONFIG_DIR, name)


@pytest.fixture(scope="session")
def main_rt():
    return Runtime(load_config(config_path("constrained_demo.yaml")))


@pytest.fixture(scope="session")
def erm_rt():
    return Runtime(load_config(config_path("ermakov_demo.yaml")))


@pytest.fixture(scope="session")
def main_sol(main_rt):
    return main_rt.exact_sol


@pytest.fixture(scope="session")
def main_traj(main_rt):
    return main_rt.full_traj


@pytest.fixture(scope="session")
def main_ints(main_rt):
    return main_rt.ints


@pytest.fixture(scope="session")
def erm_sol(erm_rt):
    return erm_rt.exact_sol


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
