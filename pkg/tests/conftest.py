import pytest

from mixmarket import LinearDensity, Power, TruncatedNormal, Uniform

ACCEPTANCE_LINES = []


def regular_families():
    return [
        Uniform(0.0, 1.0),
        Uniform(1.0, 2.0),
        LinearDensity(0.0, 1.0, alpha=1.0, beta=1.0),
        Power(0.0, 1.0, c=2.0),
        TruncatedNormal(0.0, 1.0, mu=0.5, sigma=0.2),
    ]


@pytest.fixture(params=regular_families(), ids=lambda d: d.describe())
def family(request):
    return request.param


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
