from __future__ import annotations

import numpy as np
import pytest

from ptakit.matrix import EvaluationMatrix


def random_skew(seed: int, n: int, scale: float = 1.0) -> EvaluationMatrix:
    a = np.random.default_rng(seed).normal(scale=scale, size=(n, n))
    return EvaluationMatrix(a - a.T)


@pytest.fixture
def skew10() -> EvaluationMatrix:
    return random_skew(0, 10)


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def criterion():
    """Record one pass/fail line per acceptance criterion, then assert it."""

    def check(name: str, ok: bool, detail: str) -> None:
        line = f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line

    return check


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
