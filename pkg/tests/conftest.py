from __future__ import annotations

import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from gsp_disconnect import apply_hypothesis, build_graph, laplacian, watts_strogatz  # noqa: E402
from gsp_disconnect.harness import draw_removal  # noqa: E402

_CRITERIA: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def criterion():
    """Record one acceptance line: ``criterion(number, passed, detail)``."""

    def record(number: int, passed: bool, detail: str) -> None:
        _CRITERIA[number] = (bool(passed), detail)
        print(f"criterion {number}: {'PASS' if passed else 'FAIL'} {detail}")

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        passed, detail = _CRITERIA[number]
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] criterion {number:2d}: {detail}")


def random_pair(seed: int, n: int = 12, r: int = 2, k_per_side: int = 2):
    """Seeded Watts-Strogatz ``L0`` and a connected ``r``-edge removal."""
    L0 = laplacian(watts_strogatz(n, k_per_side, seed=seed))
    removed = draw_removal(L0, r, seed + 10_000)
    Lk, hyp = apply_hypothesis(L0, removed)
    return L0, Lk, hyp


@pytest.fixture
def path3():
    return build_graph(3, [(0, 1, 1.0), (1, 2, 2.0)])


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
