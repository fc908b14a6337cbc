import os
import sys

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

import _instances  # noqa: E402

settings.register_profile(
    "default", derandomize=True, deadline=None, database=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture(scope="session", autouse=True)
def _warm_kernels():
    # first call compiles (or loads from cache); keep that out of timed tests
    from fairmatch import approx, exact
    inst = _instances.inst_c()
    approx.greedy_cmm(inst)
    exact.flow_laminar(inst)


@pytest.fixture
def inst_a():
    return _instances.inst_a()


@pytest.fixture
def inst_b():
    return _instances.inst_b()


@pytest.fixture
def inst_c():
    return _instances.inst_c()


@pytest.fixture
def inst_d():
    return _instances.inst_d()


@pytest.fixture
def inst_e():
    return _instances.inst_e()


def pytest_terminal_summary(terminalreporter):
    gate = getattr(sys.modules.get("test_acceptance"), "GATE", None)
    if gate:
        terminalreporter.write_sep("=", "acceptance gate")
        for n in sorted(gate):
            terminalreporter.write_line(gate[n])
