import pytest

from capcover.instance import make_instance
from helpers import line_dist


@pytest.fixture
def line3():
    """Points at 0, 1, 2; unit balls centred at 0 and 1, capacity 2 each."""
    return make_instance(line_dist(3), [(0, 1, 2), (1, 1, 2)], "monotonic")


@pytest.fixture
def line3_uniform():
    return make_instance(line_dist(3), [(0, 1, 2), (1, 1, 2)], "uniform")


@pytest.fixture
def single():
    return make_instance([[0]], [(0, 1, 1)], "uniform")

