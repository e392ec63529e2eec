import pytest
from hypothesis import HealthCheck, settings

from primebounds.prime_engine import PrimeEngine

settings.register_profile("default", max_examples=100, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def engine():
    return PrimeEngine()


@pytest.fixture(scope="session")
def small_engine():
    # tiny segments so multi-segment paths get exercised on small inputs
    return PrimeEngine(ceiling=10**7, segment_bytes=64)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
