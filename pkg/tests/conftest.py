import numpy as np
import pytest

from svwb import synth


@pytest.fixture
def rng():
    return np.random.default_rng(20211007)


@pytest.fixture(scope="session")
def mixed_scene_128():
    return synth.builtin_scene("mixed", size=128).render()


@pytest.fixture(scope="session")
def single_scene_128():
    return synth.builtin_scene("single", size=128).render()


def random_white(rng, low=0.3, high=1.5):
    """A white-ish XYZ with comfortably positive cone responses under every model."""
    base = np.array([0.95047, 1.0, 1.08883])
    return base * rng.uniform(low, high) * rng.uniform(0.7, 1.3, size=3)


ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance():
    """Record one pass/fail line per acceptance criterion."""

    def record(criterion, ok, detail):
        ACCEPTANCE_LINES.append(f"{criterion} {'PASS' if ok else 'FAIL'}  {detail}")
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
