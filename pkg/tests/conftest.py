import sys

import numpy as np
import pytest

from bowtie_mech import sl2c as S


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def rand_su2(rng):
    return S.su2_exp(rng.normal(size=3) * 2.0)


def rand_k(rng):
    return S.KElement(rng.normal(), rng.normal(), float(np.expm1(rng.normal() * 0.5)))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n][1])
