import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from solvfrag.hamfile import load_fixture  # noqa: E402
from solvfrag.solver import ground_state  # noqa: E402


@pytest.fixture(scope="session")
def h2():
    return load_fixture("h2").hamiltonian


@pytest.fixture(scope="session")
def lih():
    return load_fixture("lih").hamiltonian


@pytest.fixture(scope="session")
def h2_ground(h2):
    return ground_state(h2)


@pytest.fixture(scope="session")
def lih_ground(lih):
    return ground_state(lih)


def pytest_terminal_summary(terminalreporter):
    from acceptance_log import LINES

    if LINES:
        terminalreporter.section("acceptance criteria")
        for line in LINES:
            terminalreporter.write_line(line)
