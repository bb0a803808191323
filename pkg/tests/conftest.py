import numpy as np
import pytest

from densitycompat.sampling import Stream

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return Stream(20261016)


def random_hermitian(rng, dim):
    g = rng.complex_normal((dim, dim))
    return (g + g.conj().T) / 2


def random_kets(rng, dim, count):
    g = rng.complex_normal((dim, count))
    return g / np.linalg.norm(g, axis=0)
