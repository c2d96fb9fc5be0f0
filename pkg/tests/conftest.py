import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

ACCEPTANCE_LINES: list[str] = []


def random_spd(rng, n, shift=0.1):
    M = rng.uniform(-1, 1, (n, n))
    return M.T @ M + shift * np.eye(n)


def random_vars(rng, n, x_structure="full"):
    from delaycert.assembly import BLOCKDIAG, LKFVariables
    X = rng.normal(size=(3 * n, 3 * n))
    if x_structure == BLOCKDIAG:
        X = X * np.kron(np.eye(3), np.ones((n, n)))
    return LKFVariables(random_spd(rng, 4 * n), *(random_spd(rng, n) for _ in range(6)), X, x_structure)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
