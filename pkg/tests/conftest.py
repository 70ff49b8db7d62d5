"""Shared fixtures plus the acceptance-criteria summary lines.

Acceptance tests call ``record_criterion`` with their measured numbers
before asserting, so the terminal summary always shows one line per
criterion, pass or fail.
"""

import numpy as np
import pytest

import rigrad as rg

_ACCEPTANCE: list[tuple[str, bool, str]] = []


def record_criterion(name: str, ok: bool, detail: str) -> None:
    _ACCEPTANCE.append((name, bool(ok), detail))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in _ACCEPTANCE:
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"[{status}] {name}: {detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(20260816)


@pytest.fixture(params=["euclidean", "sphere2", "half_plane2"])
def manifold(request):
    dim = 4 if request.param == "euclidean" else None
    return rg.make_manifold(request.param, dim=dim)


def random_unit_tangent(man, p, generator):
    """A g-unit tangent vector, retrying degenerate draws."""
    for _ in range(10):
        u = man.random_tangent(p, generator)
        norm = man.norm(u)
        if norm > 1e-9:
            return rg.TangentVector(p, u.components / norm)
    raise AssertionError("could not draw a unit tangent vector")
