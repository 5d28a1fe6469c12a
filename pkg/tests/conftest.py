import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "oddsymp",
    deadline=None,
    derandomize=True,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("oddsymp")


@pytest.fixture
def c1():
    from oddsymp.geometry import Chart

    return Chart(1, 2)


@pytest.fixture
def c2():
    from oddsymp.geometry import Chart

    return Chart(2, 2)


def pytest_terminal_summary(terminalreporter):
    from tests import test_acceptance

    if test_acceptance.VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.summary_lines():
            terminalreporter.write_line(line)
