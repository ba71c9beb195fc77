import random

import pytest

from knotshadow.curve import TRIVIAL
from knotshadow.moves import random_walk


def walk_curve(seed: int, steps: int = 12, max_crossings: int | None = 9):
    """A reproducible random curve reached from the trivial projection."""
    rng = random.Random(seed)
    w = random_walk(TRIVIAL, steps, rng, max_crossings=max_crossings)
    return w[-1][1] if w else TRIVIAL


@pytest.fixture
def rng():
    return random.Random(12345)
