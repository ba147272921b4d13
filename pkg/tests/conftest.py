import pytest

import trailerlab as tl


@pytest.fixture(scope="session")
def params():
    return tl.default_params()


@pytest.fixture(scope="session")
def schedule(params):
    return tl.build_schedule(params)
