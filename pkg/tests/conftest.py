import pytest

from onetree import make_instance


@pytest.fixture
def path3():
    """Path r - a - b, unit lengths, one demand unit on each of a, b."""
    return make_instance(3, [(0, 1, 1), (1, 2, 1)], 0, {1: 1, 2: 1})


@pytest.fixture
def cycle4():
    """Unit 4-cycle r, a, b, c with one demand unit on each non-root vertex."""
    return make_instance(4, [(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 0, 1)], 0, {1: 1, 2: 1, 3: 1})


@pytest.fixture
def triangle_cheap_root():
    """Triangle with unit edges at the root and a length-10 far edge."""
    return make_instance(3, [(0, 1, 1), (0, 2, 1), (1, 2, 10)], 0, {1: 1, 2: 1})
