import numpy as np
import pytest

from hdnt.simlab import run_experiment

ACCEPTANCE_LINES = []
_EXPERIMENTS = {}


def cached_experiment(spec):
    """Run ``spec`` once per session; results are deterministic given the spec."""
    if spec not in _EXPERIMENTS:
        _EXPERIMENTS[spec] = run_experiment(spec)
    return _EXPERIMENTS[spec]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def record():
    def _record(criterion, passed, detail):
        ACCEPTANCE_LINES.append(f"[{'PASS' if passed else 'FAIL'}] {criterion}: {detail}")
    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
