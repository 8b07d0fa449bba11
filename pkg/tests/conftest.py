import sys
import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("fockmorph", max_examples=40, deadline=None)
settings.load_profile("fockmorph")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def rvec(rng, d, scale=1.0):
    return scale * (rng.standard_normal(d) + 1j * rng.standard_normal(d)) / np.sqrt(2 * d)


def rmat(rng, d, norm=None):
    m = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2 * d)
    if norm is not None:
        m *= norm / np.linalg.norm(m, 2)
    return m


def rherm(rng, d):
    m = rmat(rng, d)
    return (m + m.conj().T) / 2


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if mod is None or not getattr(mod, "RESULTS", None):
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[k])
