import numpy as np
import pytest

from erasure_secrecy.gf2 import BitMatrix
from erasure_secrecy.ldpc import DegreeSpec, TannerGraph, find_puncture_pattern, random_ldpc

HAMMING_H = np.array(
    [
        [1, 1, 0, 1, 1, 0, 0],
        [1, 0, 1, 1, 0, 1, 0],
        [0, 1, 1, 1, 0, 0, 1],
    ],
    dtype=np.uint8,
)

FIXTURE_SPEC = "1:0.125,2:0.375,3:0.5"
FIXTURE_SEED = 11

_ACCEPTANCE_LINES: list[str] = []


def record_criterion(number: int, passed: bool, detail: str) -> None:
    _ACCEPTANCE_LINES.append(f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}")


@pytest.fixture
def hamming():
    return BitMatrix(HAMMING_H)


@pytest.fixture
def hamming_graph(hamming):
    return TannerGraph(hamming)


def make_fixture_code():
    """N=16, k=8 code with a certified pattern; deterministic."""
    rng = np.random.default_rng(FIXTURE_SEED)
    h = random_ldpc(16, 8, DegreeSpec.parse(FIXTURE_SPEC), rng)
    graph = TannerGraph(h)
    pattern = find_puncture_pattern(graph, rng)
    return h, graph, pattern


@pytest.fixture(scope="session")
def fixture_code():
    return make_fixture_code()


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
