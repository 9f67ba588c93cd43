import numpy as np
import pytest

from qabench.topology import catalog_device


@pytest.fixture
def rng():
    return np.random.default_rng(20180409)


@pytest.fixture
def line_5():
    return catalog_device("line_5")


@pytest.fixture
def ladder_16():
    return catalog_device("ladder_16")


@pytest.fixture
def complete_4():
    return catalog_device("complete_4")
