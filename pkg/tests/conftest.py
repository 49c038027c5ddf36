import numpy as np
import pytest

from ivo.rng import stream


@pytest.fixture
def rng(request):
    return stream(7, request.node.name)
