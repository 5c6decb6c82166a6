import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from chiralqw.graph import Graph  # noqa: E402

DATA = os.path.join(os.path.dirname(__file__), "data")


def make_graph(n, pairs):
    return Graph.from_pairs([f"v{i:03d}" for i in range(n)], pairs)


def erdos_renyi(n, p, seed):
    rng = np.random.default_rng(seed)
    iu, ju = np.triu_indices(n, 1)
    keep = rng.random(len(iu)) < p
    return make_graph(n, zip(iu[keep].tolist(), ju[keep].tolist()))


def path_graph(n):
    return make_graph(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n):
    return make_graph(n, [(i, (i + 1) % n) for i in range(n)])


def complete_graph(n):
    return make_graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


@pytest.fixture
def data_dir():
    return DATA


# one line per acceptance criterion, echoed after the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
