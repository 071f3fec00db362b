from pathlib import Path

import pytest

from zk3col.graph import load_graph

FIXTURE_DIR = Path(__file__).parent / "fixtures"


def fixture_graph(name: str):
    return load_graph(FIXTURE_DIR / f"{name}.g")


@pytest.fixture
def k3():
    return fixture_graph("k3")


@pytest.fixture
def k4():
    return fixture_graph("k4")


@pytest.fixture
def c5():
    return fixture_graph("c5")


@pytest.fixture
def petersen():
    return fixture_graph("petersen")


@pytest.fixture
def path4():
    return fixture_graph("path4")


@pytest.fixture
def edge_graph():
    return fixture_graph("edge")


# one line per acceptance criterion, printed after the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
