from fractions import Fraction

import pytest

from coded_caching.gf import GF
from coded_caching.model import demands, make_instance


@pytest.fixture
def gf8():
    return GF(8)


@pytest.fixture
def example():
    """N=2, K=5, M=4/5 with d=(1,1,1,2,2) and F=1000."""
    return make_instance(2, 5, Fraction(4, 5), 1000), demands([1, 1, 1, 2, 2], 2)


_criteria: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py::test_criterion_" in report.nodeid and report.when == "call":
        _criteria[report.nodeid.split("::")[-1]] = report.outcome.upper()


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_criteria, key=lambda n: int(n.split("_")[2])):
        terminalreporter.write_line(f"{_criteria[name]:<7} {name}")
