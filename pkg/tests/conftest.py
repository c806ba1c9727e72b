import pytest

from ctspectra.constants import DEFAULT_ALPHAS
from ctspectra.kernels import HanningKernel
from ctspectra.process_models import CarModel


def pytest_addoption(parser):

    parser.addoption(
        "--runslow", action="store_true", default=False, help="run Monte Carlo checks"
    )


def pytest_configure(config):

    config.addinivalue_line("markers", "slow: long Monte Carlo check, needs --runslow")


def pytest_collection_modifyitems(config, items):

    if config.getoption("--runslow"):
        return

    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def car_model():

    return CarModel(DEFAULT_ALPHAS, 1.0)


@pytest.fixture
def hanning():

    return HanningKernel()


@pytest.fixture
def ou_model():

    return CarModel((0.5,), 1.0)
