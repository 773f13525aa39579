import numpy as np
import pytest

from taubnut.core import GeometryConfig

# (name, passed, detail) lines collected by test_acceptance
ACCEPTANCE_RESULTS: list[tuple[str, bool, str]] = []


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def flat1():
    return GeometryConfig(0.0, (0.0,))


@pytest.fixture
def taubnut1():
    return GeometryConfig(1.0, (0.0,))


@pytest.fixture
def neg1():
    return GeometryConfig(-1.0, (0.0,))


@pytest.fixture
def pos2():
    return GeometryConfig(1.0, (0.0, 1.0))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {name}  {detail}")
