import numpy as np
import pytest

from blockmatch.core import Frame, SearchConfig
from blockmatch.ingest import synth_sequence


def const_frame(value, width=16, height=16):
    return Frame(np.full((height, width), value, dtype=np.uint8))


def interior_origins(frame, cfg):
    """Blocks whose whole search window stays inside the frame."""
    r, n = cfg.search_range, cfg.block_size
    return [
        (x, y)
        for y in range(0, frame.height, n)
        for x in range(0, frame.width, n)
        if x >= r and y >= r and x + n + r <= frame.width and y + n + r <= frame.height
    ]


@pytest.fixture
def cfg():
    return SearchConfig()


@pytest.fixture(scope="session")
def noise_frames():
    return list(synth_sequence("noise", 64, 64, 20, seed=1))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
