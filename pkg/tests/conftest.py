import cmath

import numpy as np
import pytest

ACCEPTANCE_RESULTS: list[tuple[str, bool, str]] = []


def brute_dft(seq):
    """Textbook DFT by explicit summation; shares no code with the package."""
    n = len(seq)
    return [
        sum(complex(seq[t]) * cmath.exp(-2j * cmath.pi * k * t / n) for t in range(n))
        for k in range(n)
    ]


def brute_mrdft(x, m):
    """Per-level list of per-frame DFTs of every rectangular window."""
    return [
        [brute_dft(x[f * (1 << i) : (f + 1) * (1 << i)]) for f in range(len(x) >> i)]
        for i in range(1, m + 1)
    ]


def random_complex(rng, n):
    return rng.standard_normal(n) + 1j * rng.standard_normal(n)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
