import sys

import numpy as np
import pytest

from labbubble import AssetSpec, speculative_asset, value_asset

T = 15


@pytest.fixture
def ref_asset():
    """Reference speculative asset: kappa 4, alpha 0.85, phi 0.01."""
    return speculative_asset(kappa=4.0, alpha=0.85, phi=0.01)


@pytest.fixture
def ref_eq():
    return speculative_asset(kappa=4.0, alpha=0.85, phi=0.0)


@pytest.fixture
def holding_cost():
    return value_asset(kappa=2.0, alpha=0.85)


def close(a, b, tol=1e-12):
    return np.allclose(a, b, rtol=0, atol=tol)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
