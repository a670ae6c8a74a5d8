import numpy as np
import pytest

from projshape import Configuration

THREE_LINES = [
    [1, 0, 0, 0],
    [0, 1, 0, 0],
    [0, 0, 1, 0],
    [0, 0, 0, 1],
    [1, 1, 0, 0],
    [1, 0, 1, 0],
    [1, 0, 0, 1],
]
STANDARD_FRAME = [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1], [1, 1, 1, 1]]
DOUBLE_PAIR = [[1, 0], [1, 0], [0, 1], [0, 1]]
SINGLE_PAIR = [[1, 0], [1, 0], [0, 1], [1, 1]]
TRIPLE = [[1, 0], [1, 0], [1, 0], [0, 1]]
GENERIC_LINE = [[1, 0], [0, 1], [1, 1], [1, -1]]


@pytest.fixture
def three_lines():
    return Configuration(THREE_LINES)


@pytest.fixture
def standard_frame():
    return Configuration(STANDARD_FRAME)


@pytest.fixture
def double_pair():
    return Configuration(DOUBLE_PAIR)


@pytest.fixture
def single_pair():
    return Configuration(SINGLE_PAIR)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def pytest_terminal_summary(terminalreporter):
    from . import test_acceptance

    results = test_acceptance.RESULTS
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        status, text, detail = results[n]
        line = f"criterion {n:>2}: {status}  {text}"
        if detail:
            line += f"  [{detail}]"
        terminalreporter.write_line(line)
