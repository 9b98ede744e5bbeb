"""Shared generators for the randomized suites."""
import random

import pytest

from finquo.aperm import WindowMap


def random_interior_map(rng: random.Random, n: int, margin: int = 1) -> WindowMap:
    """Random injective partial map with dom and ran inside the margins."""
    interior = list(range(margin, n - margin))
    k = rng.randint(0, len(interior))
    dom = rng.sample(interior, k)
    ran = rng.sample(interior, k)
    return WindowMap(n, tuple(zip(dom, ran)))


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20260823)
