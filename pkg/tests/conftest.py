from conetorsion.linkSpectrum import circle_quotient_spectrum, sphere_spectrum
from conetorsion.coneCalculus import cone_indices
import pytest


def pytest_addoption(parser):
    parser.addoption("--slow", action="store_true", default=False,
                     help="run the acceptance-size computations")


def pytest_generate_tests(metafunc):
    option_value = metafunc.config.option.slow
    if 'acceptance' in metafunc.fixturenames:
        metafunc.parametrize("acceptance", [option_value], scope="module")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--slow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --slow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: acceptance-size computation")


@pytest.fixture(scope="module", params=[1, 2, 3, 6])
def circle_quotient(request):
    return circle_quotient_spectrum(request.param, 400.0)


@pytest.fixture(scope="module", params=[1, 2, 3])
def sphere(request):
    return sphere_spectrum(request.param, 60.0)


@pytest.fixture(scope="module", params=[(1, 0, 9), (1, 0, 4), (1, 1, 0), (1, 1, 8),
                                        (3, 0, 3), (3, 1, 4), (3, 1, 9), (3, 2, 8),
                                        (3, 3, 12)])
def exact_indices(request):
    return cone_indices(*request.param)


@pytest.fixture(scope="module", params=[(1, 0, 2), (3, 1, 5), (3, 0, 7.5)])
def irrational_indices(request):
    return cone_indices(*request.param)


@pytest.fixture(scope="module", params=[2, 3, 6])
def group_order(request):
    return request.param
