import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


HEXAGON = [(2, 1, 0), (2, 0, 1), (1, 0, 2), (0, 1, 2), (0, 2, 1), (1, 2, 0)]


@pytest.fixture(scope="session")
def published_certs():
    """Memoized certificates replaying the shipped tables, keyed by (construction, power)."""
    from laserbound.omega import published_certificate

    made = {}

    def get(construction, power):
        if (construction, power) not in made:
            made[(construction, power)] = published_certificate(construction, power)
        return made[(construction, power)]

    return get


_ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture(scope="session")
def acceptance_log(request):
    """List of ``(criterion, ok, detail)`` reported in the terminal summary."""
    return request.config.stash.setdefault(_ACCEPTANCE, [])


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for n, ok, detail in sorted(lines, key=lambda x: x[0]):
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}")
