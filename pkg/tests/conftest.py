import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from tracar.fixtures import f1_profiles  # noqa: E402
from tracar.lru import available_kernels  # noqa: E402
from tracar.model import FLASH, XPOINT, CostBook, ServerModel  # noqa: E402


@pytest.fixture
def book():
    return CostBook()


@pytest.fixture
def server():
    return ServerModel()


@pytest.fixture
def f1():
    return f1_profiles()


@pytest.fixture
def xpoint():
    return XPOINT


@pytest.fixture
def flash():
    return FLASH


@pytest.fixture(params=available_kernels())
def kernel(request):
    return request.param
