import pytest

from freehom.geometry import FuchsianRep


@pytest.fixture(scope="session")
def rep2():
    return FuchsianRep(2)


@pytest.fixture(scope="session")
def rep3():
    return FuchsianRep(3)


@pytest.fixture(scope="session")
def pres2(rep2):
    return rep2.presentation


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
