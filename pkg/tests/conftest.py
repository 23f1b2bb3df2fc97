import pytest
from hypothesis import settings as hypothesis_settings

from base_algebra import FiniteField
from drinfeld_core import StandardModules, certified_exp
from utils import ResourceGuard

hypothesis_settings.register_profile("exact", deadline=None, max_examples=60)
hypothesis_settings.load_profile("exact")


@pytest.fixture(scope="session")
def F2():
    return FiniteField(2)


@pytest.fixture(scope="session")
def F3():
    return FiniteField(3)


@pytest.fixture(scope="session")
def F4():
    return FiniteField(2, 2)


@pytest.fixture(scope="session")
def carlitz2():
    return StandardModules.carlitz(2)


@pytest.fixture(scope="session")
def carlitz3():
    return StandardModules.carlitz(3)


@pytest.fixture(scope="session")
def regression():
    return StandardModules.regression()


@pytest.fixture(scope="session")
def trivial2():
    return StandardModules.trivial(2)


@pytest.fixture(scope="session")
def regression_exp(regression):
    return certified_exp(regression)


@pytest.fixture(scope="session")
def carlitz2_exp(carlitz2):
    return certified_exp(carlitz2)


@pytest.fixture
def guard():
    return ResourceGuard()


@pytest.fixture
def settings():
    from config import Config
    return dict(Config.DEFAULT_CONFIG)
