import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from neurocactus.graph import load_decomposition, load_graph  # noqa: E402
from neurocactus.scenario import shipped_path  # noqa: E402

# The worked example: a 2-node pair rooted at 1 and a triangle rooted at 3.
A_PRIME = np.array(
    [
        [0, 2, 0, 0, 0],
        [2, 0, 0, 0, 0],
        [0, 0, 0, 1, 2],
        [0, 0, 1, 0, 1],
        [0, 0, 2, 1, 0],
    ],
    dtype=float,
)
A_NEW = np.array(
    [
        [-3, 2, 0, 0, 0],
        [2, -4, 0, -0.5, 0],
        [0, 0, -4, 1, 2],
        [0, -0.5, 1, -3, 1],
        [0, 0, 2, 1, -4],
    ]
)
B_EXAMPLE = np.zeros((5, 5))
B_EXAMPLE[0, 0] = B_EXAMPLE[2, 2] = 1.0


@pytest.fixture(scope="session")
def g14():
    return load_graph(shipped_path("net14_standin.json"))


@pytest.fixture(scope="session")
def gd14():
    return load_decomposition(shipped_path("net14_standin.decomposition.json"))


@pytest.fixture(scope="session")
def g5():
    return load_graph(shipped_path("example5.json"))


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
