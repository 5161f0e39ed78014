import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from funcomp.cli import resolve_scenario
from funcomp.core import load_scenario, make_scenario

settings.register_profile("ci", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("dev", max_examples=15, deadline=None)
settings.register_profile("thorough", max_examples=400, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "ci"))


def fixture(name):
    return load_scenario(resolve_scenario(name))


@pytest.fixture
def fx():
    return fixture


def random_two_source(rng, max_alpha=4, n_values=3, density=0.5, positive=False):
    """Random k=2 scenario; the support is a random subset of the grid."""
    a1, a2 = (int(x) for x in rng.integers(2, max_alpha + 1, size=2))
    if positive:
        mask = np.ones((a1, a2), dtype=bool)
    else:
        mask = rng.random((a1, a2)) < density
        while not mask.any():
            mask = rng.random((a1, a2)) < density
    w = rng.random((a1, a2)) + 0.05
    pmf = np.where(mask, w, 0.0)
    pmf /= pmf.sum()
    table = rng.integers(0, n_values, size=(a1, a2))
    return make_scenario([a1, a2], pmf, [table])


def random_valid_coloring(g, rng):
    """Random proper coloring: each vertex in random order takes a random
    admissible color (existing or new)."""
    colors = [-1] * g.size
    used = 0
    for v in rng.permutation(g.size):
        banned = {colors[u] for u in g.neighbors(int(v))}
        choices = [c for c in range(used) if c not in banned] + [used]
        c = int(rng.choice(choices))
        colors[int(v)] = c
        used = max(used, c + 1)
    return colors


# acceptance summary: one line per criterion in the terminal report
_ACCEPTANCE = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" in report.nodeid and report.when == "call":
        _ACCEPTANCE[report.nodeid] = report.outcome
    elif "test_acceptance.py" in report.nodeid and report.when == "setup" and report.outcome != "passed":
        _ACCEPTANCE[report.nodeid] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for nodeid, outcome in sorted(_ACCEPTANCE.items()):
        name = nodeid.split("::")[-1]
        verdict = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{verdict}  {name}")
