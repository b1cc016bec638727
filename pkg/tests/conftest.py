from __future__ import annotations

import itertools

import numpy as np
import pytest

from ogplab._kernels import available_backends, backend


@pytest.fixture(params=available_backends())
def kern(request):
    return backend(request.param)


def all_signs(n: int) -> np.ndarray:
    """Every {-1,+1}^n vector; row index = bit code (bit i set <=> +1)."""
    codes = np.arange(1 << n, dtype=np.int64)
    return ((codes[:, None] >> np.arange(n)) & 1) * 2 - 1


def brute_cliques(rows, n):
    """Every clique of the graph, as bit codes, by direct subset test."""
    out = []
    for code in range(1 << n):
        nodes = [v for v in range(n) if code >> v & 1]
        if all(rows[a] >> b & 1 for a, b in itertools.combinations(nodes, 2)):
            out.append(code)
    return out


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
