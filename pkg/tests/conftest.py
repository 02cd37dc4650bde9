import pytest

from webbed_lambda.kernel_is import flat_system
from webbed_lambda.webs import graph_web


@pytest.fixture
def f3():
    """Flat system on p, q and nu."""
    return flat_system(["p", "q"])


@pytest.fixture
def g1():
    """Free graph web over one atom."""
    return graph_web(["0"])


def pytest_terminal_summary(terminalreporter):
    from report import LINES
    if LINES:
        terminalreporter.section("acceptance criteria")
        for line in LINES:
            terminalreporter.write_line(line)
