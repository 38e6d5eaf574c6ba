import sys
from pathlib import Path

import pytest
from hypothesis import settings

# Make the sibling oracle helpers importable regardless of invocation dir.
sys.path.insert(0, str(Path(__file__).parent))

# Property tests stay reproducible run to run.
settings.register_profile("deterministic", derandomize=True, deadline=None)
settings.load_profile("deterministic")

from tasksim import fxor, quads, rxor, xor


@pytest.fixture(scope="session")
def dist_xor():
    return xor()


@pytest.fixture(scope="session")
def dist_quads():
    return quads()


@pytest.fixture(scope="session")
def dist_rxor45():
    return rxor(45.0)


@pytest.fixture(scope="session")
def dist_fxor():
    return fxor()


@pytest.fixture(scope="session")
def four_builtins(dist_xor, dist_quads, dist_rxor45, dist_fxor):
    return [dist_xor, dist_quads, dist_rxor45, dist_fxor]
