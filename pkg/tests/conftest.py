from __future__ import annotations

import numpy as np
import pytest
from hypothesis import settings

from gnatlab.generators import GeneratorSet, RationalCurve, cheeger_gromoll, sasaki

settings.register_profile("default", deadline=None, max_examples=40, derandomize=True)
settings.load_profile("default")


def custom_generators() -> GeneratorSet:
    """A nondegenerate, Riemannian set with every generator switched on."""
    return GeneratorSet(
        alpha1=RationalCurve((1.0, 0.5), (1.0, 1.0)),
        alpha2=RationalCurve.constant(0.3),
        alpha3=RationalCurve.constant(0.5),
        beta1=RationalCurve.constant(0.2),
        beta2=RationalCurve((0.1,), (1.0, 1.0)),
        beta3=RationalCurve.constant(-0.1),
        name="custom",
    )


GENERATORS = {"sasaki": sasaki, "cheeger-gromoll": cheeger_gromoll, "custom": custom_generators}


@pytest.fixture(params=sorted(GENERATORS))
def gen(request):
    return GENERATORS[request.param]()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


SUITE_BUDGET_S = 60.0
_session = {}


def pytest_sessionstart(session):
    import time

    _session["start"] = time.perf_counter()


def pytest_sessionfinish(session, exitstatus):
    import time

    _session["elapsed"] = elapsed = time.perf_counter() - _session.get("start", time.perf_counter())
    if elapsed >= SUITE_BUDGET_S and exitstatus == 0:
        session.exitstatus = 1


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    elapsed = _session.get("elapsed", 0.0)
    ok = elapsed < SUITE_BUDGET_S
    terminalreporter.write_line(
        f"criterion 9 [suite runtime]: {'PASS' if ok else 'FAIL'} ({elapsed:.1f} s, budget {SUITE_BUDGET_S:.0f} s)")
