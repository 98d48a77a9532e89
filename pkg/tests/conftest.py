import numpy as np
import pytest

from resir.sir import pool_from_log_weights


class FixedUniforms:
    """Stream stand-in that replays a given list of uniforms."""

    def __init__(self, values):
        self.values = list(values)

    def uniforms(self, size):
        size = int(np.prod(size))
        out, self.values = self.values[:size], self.values[size:]
        assert len(out) == size, "fixed stream exhausted"
        return np.array(out, dtype=float)


class FixedProposal:
    """1-d uniform(0,1) proposal whose draws are fixed in advance."""

    dim = 1

    def __init__(self, points):
        self.points = np.asarray(points, dtype=float).reshape(-1, 1)

    def draw(self, stream, size):
        assert size == len(self.points)
        return self.points.copy()

    def log_density(self, x):
        return np.zeros(len(x))


def make_pool(weights, values=None):
    w = np.asarray(weights, dtype=float)
    values = np.arange(1, w.size + 1) if values is None else values
    with np.errstate(divide="ignore"):
        return pool_from_log_weights(np.asarray(values, dtype=float), np.log(w))


@pytest.fixture
def pool253():
    return make_pool([0.2, 0.5, 0.3])


ACCEPTANCE_LINES: list[str] = []


def record(criterion: str, ok: bool, detail: str) -> bool:
    ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'}  {criterion}: {detail}")
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
