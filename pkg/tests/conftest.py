import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def random_homography(rng: np.random.Generator):
    """A camera-like homography: perspective row small, upper block well conditioned."""
    from groundtrack.geometry import Homography

    while True:
        m = np.array(
            [
                [rng.uniform(50, 150), rng.uniform(-40, 80), rng.uniform(300, 900)],
                [rng.uniform(-20, 20), rng.uniform(10, 40), rng.uniform(400, 800)],
                [rng.uniform(-0.02, 0.02), rng.uniform(0.05, 0.15), 1.0],
            ]
        )
        if np.linalg.cond(m) < 1e6:
            return Homography(m)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# One line per acceptance criterion, filled in by test_acceptance.py and
# shown in the terminal summary so it survives output capture.
ACCEPTANCE_LINES: dict[int, str] = {}


def record_criterion(number: int, title: str, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:2d} {title}: {detail}"
    ACCEPTANCE_LINES[number] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])
