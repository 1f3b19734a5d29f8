import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def direct_dft(x):
    """O(l^2) normalized DFT with time indexed 1..l."""
    x = np.asarray(x, dtype=float)
    n = x.size
    t = np.arange(1, n + 1)
    j = np.arange(n)[:, None]
    return (x * np.exp(-2j * np.pi * j * t / n)).sum(axis=1) / np.sqrt(n)


# criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE = {}


def record(criterion: int, passed: bool, detail: str):
    ACCEPTANCE[criterion] = (bool(passed), detail)
    return passed


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"criterion {key}: {'PASS' if passed else 'FAIL'}  {detail}")
