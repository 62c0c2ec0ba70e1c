import math

import hypothesis.strategies as st
import pytest
from hypothesis import settings

from qslfilter import QubitDensity

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

_RESULTS: list[tuple[str, bool, str]] = []


@st.composite
def densities(draw):
    """Valid qubit states: population d0 and a coherence inside the disk."""
    d0 = draw(st.floats(0.0, 1.0))
    radius = math.sqrt(d0 * (1.0 - d0))
    r = draw(st.floats(0.0, 1.0)) * radius
    phi = draw(st.floats(0.0, 2.0 * math.pi))
    return QubitDensity(d0, 1.0 - d0, complex(r * math.cos(phi), r * math.sin(phi)))


@pytest.fixture
def record():
    """Register a named acceptance outcome for the terminal summary."""

    def _record(name: str, passed: bool, detail: str = ""):
        _RESULTS.append((name, bool(passed), detail))

    return _record


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in _RESULTS:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'} {name}" + (f": {detail}" if detail else ""))
