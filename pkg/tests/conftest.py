import pytest

from reclab.tower import TowerParams


@pytest.fixture(scope="session")
def tower3():
    return TowerParams(3, 1, 8)


@pytest.fixture(scope="session")
def tower5():
    return TowerParams(5, 1, 8)


@pytest.fixture(scope="session")
def tower7():
    return TowerParams(7, 1, 6)


@pytest.fixture(scope="session")
def tower3m2():
    return TowerParams(3, 2, 8)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if mod is None or not getattr(mod, "RESULTS", None):
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[k])
