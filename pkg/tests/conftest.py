import numpy as np
import pytest

from alsh.core import Dataset


@pytest.fixture
def rng():
    return np.random.default_rng(20140214)


@pytest.fixture
def hetero_ds(rng):
    """200 items in 10-D with norms spread over [0.1, 3]."""
    G = rng.standard_normal((200, 10))
    G /= np.linalg.norm(G, axis=1, keepdims=True)
    return Dataset.from_array(G * rng.uniform(0.1, 3.0, size=(200, 1)))


ACCEPTANCE_RESULTS: list[tuple[str, bool, str]] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
