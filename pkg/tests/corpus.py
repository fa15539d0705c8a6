"""Seeded random instances shared by the test modules."""

from __future__ import annotations

import random
from typing import Optional, Sequence

from catfair.model import Instance


def random_instance(
    rng: random.Random,
    n: Optional[int] = None,
    k: Optional[int] = None,
    max_items: int = 6,
    low: int = -5,
    high: int = 5,
    extra_capacity: float = 0.2,
) -> Instance:
    """Random instance; capacities are the smallest feasible ones, sometimes plus one."""
    n = n if n is not None else rng.choice((2, 3))
    k = k if k is not None else rng.choice((1, 2))
    m = rng.randint(k, max_items)
    owner = list(range(k)) + [rng.randrange(k) for _ in range(m - k)]
    rng.shuffle(owner)
    cats = [tuple(j for j in range(m) if owner[j] == h) for h in range(k)]
    caps = [-(-len(c) // n) + (1 if rng.random() < extra_capacity else 0) for c in cats]
    utils = [[rng.randint(low, high) for _ in range(m)] for _ in range(n)]
    return Instance(n=n, utilities=utils, categories=cats, capacities=caps)


def corpus(seed: int, count: int, **kwargs) -> list:
    rng = random.Random(seed)
    return [random_instance(rng, **kwargs) for _ in range(count)]


def sign_homogeneous(seed: int, count: int, goods: bool, **kwargs) -> list:
    """All-goods (utilities >= 0) or all-chores (utilities <= 0) instances."""
    low, high = (0, 5) if goods else (-5, 0)
    return corpus(seed, count, low=low, high=high, **kwargs)


def dims(insts: Sequence[Instance]) -> list:
    return [(i.n, i.k, i.m) for i in insts]
