import pytest
from hypothesis import settings

from clapkit import domains

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@pytest.fixture
def warehouse():
    return domains.load("warehouse")


@pytest.fixture(params=domains.BUNDLED)
def bundled(request):
    return request.param, *domains.load(request.param)


def pytest_terminal_summary(terminalreporter):
    from acceptance import lines

    out = lines()
    if out:
        terminalreporter.section("acceptance criteria")
        for line in out:
            terminalreporter.write_line(line)
