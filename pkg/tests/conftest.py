import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from kdvdecay.core import build_damping, build_grid, build_operators

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def small_setup():
    grid = build_grid(50.0, 401)
    damping = build_damping(grid, 1.5, 10.0)
    return grid, damping, build_operators(grid, damping)


@pytest.fixture
def cache_dir(tmp_path, monkeypatch):
    path = tmp_path / "cache"
    monkeypatch.setenv("KDVDECAY_CACHE", str(path))
    return path


def gaussian(grid, center=5.0, width=1.0, amplitude=1.0):
    u = amplitude * np.exp(-((grid.nodes - center) / width) ** 2)
    u[0] = u[-1] = 0.0
    return u


ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def report():
    """Record one pass/fail line per acceptance criterion; printed at the end of the run."""
    def _report(number, title, ok, detail=""):
        line = f"criterion {number:>2} {'PASS' if ok else 'FAIL'}  {title}" + (f"  ({detail})" if detail else "")
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok
    return _report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
