import pytest

from gquantale.fixtures import load_fixture
from gquantale.gq import build_gq, validate_selection_base


def _built(name):
    fx = load_fixture(name)
    base = validate_selection_base(fx.groupoid, fx.listed_members)
    return fx, base, build_gq(base)


@pytest.fixture(scope="session")
def etale():
    return _built("etale")


@pytest.fixture(scope="session")
def non_etale():
    return _built("non_etale")


@pytest.fixture(scope="session", params=["etale", "non_etale"])
def example(request):
    return _built(request.param)


def pytest_terminal_summary(terminalreporter):
    from tests import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for number in sorted(test_acceptance.RESULTS):
            terminalreporter.write_line(test_acceptance.RESULTS[number])
