from pathlib import Path

import numpy as np
import pytest

DATA = Path(__file__).parent / "data"

ACCEPTANCE_LINES = []


class ScriptedRng:
    """Replays fixed draws, padding with ``fill`` once the script runs out."""

    def __init__(self, exponential=(), normal=(), fill=1e6):
        self._exp = list(exponential)
        self._normal = list(normal)
        self._fill = fill

    @staticmethod
    def _take(queue, size, fill):
        count = int(np.prod(size)) if size is not None else 1
        out = [queue.pop(0) if queue else fill for _ in range(count)]
        return np.array(out, dtype=float).reshape(size if size is not None else ())

    def exponential(self, scale=1.0, size=None):
        return self._take(self._exp, size, self._fill)

    def standard_exponential(self, size=None):
        return self._take(self._exp, size, self._fill)

    def standard_normal(self, size=None):
        return self._take(self._normal, size, 0.0)


@pytest.fixture
def data_dir():
    return DATA


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
