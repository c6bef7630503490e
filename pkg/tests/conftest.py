from __future__ import annotations

import pytest

from lesliedelay import switching as sw
from lesliedelay.model import REFERENCE_PARAMS
from lesliedelay.reproduce import find_hh


@pytest.fixture(scope="session")
def params():
    return REFERENCE_PARAMS


@pytest.fixture(scope="session")
def segments(params):
    return sw.mode_segments(params, (20.0, 20.0))


@pytest.fixture(scope="session")
def hh(params):
    pt = find_hh(params)
    assert pt is not None
    return pt
