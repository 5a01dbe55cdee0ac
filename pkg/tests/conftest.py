import pytest
from hypothesis import settings

from sando.units import normalize, rpm_params, single_junction_params, table1_params

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@pytest.fixture
def table1():
    return lambda x0=1 / 3, **kw: normalize(table1_params(**kw), x0)


@pytest.fixture
def rpm():
    return lambda x0=0.75, **kw: normalize(rpm_params(**kw), x0)


@pytest.fixture
def single():
    return lambda **kw: normalize(single_junction_params(**kw), 1.0)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
