import itertools

import numpy as np
import pytest

from tagembed.graph import TaggedNetwork


def random_network(rng: np.random.Generator, max_nodes: int = 20, max_tags: int = 6,
                   p_edge: float = 0.3) -> TaggedNetwork:
    """Small random tagged network; every tag has at least one member."""
    n = int(rng.integers(2, max_nodes + 1))
    n_tags = int(rng.integers(1, max_tags + 1))
    edges = [(i, j) for i, j in itertools.combinations(range(n), 2) if rng.random() < p_edge]
    tags_of = {v: set() for v in range(n)}
    for t in range(n_tags):
        members = np.flatnonzero(rng.random(n) < 0.4)
        if len(members) == 0:
            members = [int(rng.integers(n))]
        for v in members:
            tags_of[int(v)].add(t)
    return TaggedNetwork(n, edges, tags_of, {t: f"tag{t}" for t in range(n_tags)})


@pytest.fixture
def triangle():
    return TaggedNetwork(3, [(0, 1), (1, 2), (0, 2)], {0: {0}, 1: {1}, 2: {0, 1}}, {0: "x", 1: "y"})


@pytest.fixture
def path3():
    return TaggedNetwork(3, [(0, 1), (1, 2)], {0: {0}, 2: {1}}, {0: "a", 1: "c"})


ACCEPTANCE_KEY = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[ACCEPTANCE_KEY] = []


@pytest.fixture
def criterion(request):
    """``criterion(n, title, passed, detail)`` records one acceptance line, then asserts it."""
    lines = request.config.stash[ACCEPTANCE_KEY]

    def record(n: int, title: str, passed: bool, detail: str = ""):
        lines.append((n, title, bool(passed), detail))
        assert passed, f"criterion {n} ({title}) failed: {detail}"

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = sorted(config.stash.get(ACCEPTANCE_KEY, []))
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for n, title, passed, detail in lines:
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] {n:>2}. {title}: {detail}")
