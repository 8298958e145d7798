import numpy as np
import pytest

from coneric.cones import ConeSpec
from coneric.instances import random_generators


def random_cone(rng, n, simplicial=True, cond_cap=20.0):
    if not simplicial:
        return ConeSpec.orthant(n)
    return ConeSpec.simplicial(random_generators(rng, n, cond_cap))


def to_cone(cone, N):
    """Move a matrix given in generator coordinates into ambient coordinates."""
    return cone.generators @ N @ cone.inverse


def random_nonneg(cone, rng):
    n = cone.dim
    return to_cone(cone, rng.uniform(0, 1, (n, n)))


def random_cross_positive(cone, rng, diag_low=-3.0, diag_high=1.0):
    n = cone.dim
    N = rng.uniform(0, 1, (n, n))
    N[np.diag_indices(n)] = rng.uniform(diag_low, diag_high, n)
    return to_cone(cone, N)


def pytest_configure(config):
    config._acceptance_lines = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_acceptance_lines", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)


@pytest.fixture
def criterion(request):
    """Record one pass/fail line for an acceptance criterion."""
    def record(label, ok, detail=""):
        status = "PASS" if ok else "FAIL"
        line = f"[{status}] {label}" + (f"  ({detail})" if detail else "")
        request.config._acceptance_lines.append(line)
        print(line)
        return ok
    return record
