"""Exhaustive ground truth for small instances.

Nothing here is clever on purpose: allocations are enumerated one by one and
compared on exact integer utility vectors.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from itertools import product
from math import factorial
from typing import Iterator, Optional

from .model import Allocation, Instance, is_feasible, utility_vector

DEFAULT_LIMIT = 10**7
LIMIT_ENV = "CATFAIR_ENUM_LIMIT"


class EnumerationLimit(RuntimeError):
    """The instance has too many feasible allocations to enumerate."""


def enumeration_limit(limit: Optional[int] = None) -> int:
    if limit is not None:
        return limit
    env = os.environ.get(LIMIT_ENV)
    return int(env) if env else DEFAULT_LIMIT


def _category_splits(size: int, n: int, cap: int, exact: bool) -> list:
    """Agent sequences for the items of one category respecting the capacity."""
    out = []
    counts = [0] * n
    seq = [0] * size

    def rec(pos):
        if pos == size:
            if not exact or all(c == cap for c in counts):
                out.append(tuple(seq))
            return
        for i in range(n):
            if counts[i] < cap:
                counts[i] += 1
                seq[pos] = i
                rec(pos + 1)
                counts[i] -= 1

    rec(0)
    return out


def feasible_count(inst: Instance) -> int:
    """Number of feasible allocations (closed form for full instances)."""
    if inst.is_full():
        total = 1
        for s in inst.capacities:
            total *= factorial(inst.n * s) // factorial(s) ** inst.n
        return total
    total = 1
    for items, s in zip(inst.categories, inst.capacities):
        total *= len(_category_splits(len(items), inst.n, s, exact=False))
    return total


def enumerate_feasible(inst: Instance, limit: Optional[int] = None) -> Iterator[Allocation]:
    """Every feasible allocation exactly once, in a fixed order.

    Raises:
        EnumerationLimit: if there are more than ``limit`` of them.
    """
    limit = enumeration_limit(limit)
    count = feasible_count(inst)
    if count > limit:
        raise EnumerationLimit(f"{count} feasible allocations exceed the limit {limit}")
    exact = inst.is_full()
    splits = [_category_splits(len(items), inst.n, s, exact) for items, s in zip(inst.categories, inst.capacities)]
    for combo in product(*splits):
        owner = [0] * inst.m
        for items, seq in zip(inst.categories, combo):
            for j, i in zip(items, seq):
                owner[j] = i
        yield Allocation(tuple(owner))


def _dominated(u: tuple, v: tuple) -> bool:
    """Whether ``v`` Pareto-dominates ``u``."""
    strict = False
    for x, y in zip(u, v):
        if y < x:
            return False
        if y > x:
            strict = True
    return strict


def dominating_allocation(inst: Instance, a: Allocation, limit: Optional[int] = None) -> Optional[Allocation]:
    """A feasible allocation Pareto-dominating ``a``, or None if ``a`` is Pareto-optimal."""
    if not is_feasible(inst, a):
        raise ValueError("allocation is not feasible")
    ua = utility_vector(inst, a)
    for b in enumerate_feasible(inst, limit):
        if _dominated(ua, utility_vector(inst, b)):
            return b
    return None


def pareto_frontier(inst: Instance, limit: Optional[int] = None) -> list:
    """All feasible allocations not dominated by another feasible allocation."""
    allocs = list(enumerate_feasible(inst, limit))
    vectors = [utility_vector(inst, a) for a in allocs]
    distinct = sorted(set(vectors))
    undominated = {v for v in distinct if not any(_dominated(v, w) for w in distinct)}
    return [a for a, v in zip(allocs, vectors) if v in undominated]


class ParetoIndex:
    """Pareto frontier of one instance, cached for repeated membership queries."""

    def __init__(self, inst: Instance, limit: Optional[int] = None):
        self.inst = inst
        self.frontier = pareto_frontier(inst, limit)
        self._vectors = {utility_vector(inst, a) for a in self.frontier}

    def is_pareto_optimal(self, a: Allocation) -> bool:
        return is_feasible(self.inst, a) and utility_vector(self.inst, a) in self._vectors


@dataclass
class OracleReport:
    """Verdicts of the exhaustive checks, one entry per clause."""

    feasible_count: int
    pareto_set: list
    theorem1_witnesses: list = field(default_factory=list)
    verdicts: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(v["pass"] for v in self.verdicts.values())


def check_theorem1(inst: Instance, bundle, limit: Optional[int] = None) -> OracleReport:
    """Check a result bundle clause by clause against exhaustive ground truth.

    Clauses: every per-agent allocation is feasible and Pareto-optimal, each is
    envy-free for its agent, all agree outside the reallocation set, and that
    set has at most ``n (n - 1)`` items.
    """
    from .fairness import is_envy_free_for

    allocs = list(bundle.per_agent)
    n = inst.n
    frontier = pareto_frontier(inst, limit)
    index = {utility_vector(inst, a) for a in frontier}
    verdicts = {}

    bad = []
    for i, a in enumerate(allocs):
        if not is_feasible(inst, a):
            bad.append({"agent": i + 1, "reason": "infeasible"})
        elif utility_vector(inst, a) not in index:
            dom = dominating_allocation(inst, a, limit)
            bad.append({"agent": i + 1, "dominated_by": list(dom.owner) if dom else None})
    verdicts["pareto_optimal"] = {"pass": not bad, "counterexamples": bad}

    bad = [i + 1 for i, a in enumerate(allocs) if not is_envy_free_for(inst, a, i)]
    verdicts["envy_free_for_own_agent"] = {"pass": not bad and len(allocs) == n, "counterexamples": bad}

    realloc = frozenset(bundle.realloc)
    bad = [
        j + 1
        for j in range(inst.m)
        if j not in realloc and len({a.owner[j] for a in allocs}) > 1
    ]
    verdicts["common_outside_realloc"] = {"pass": not bad, "counterexamples": bad}

    verdicts["realloc_bound"] = {
        "pass": len(realloc) <= n * (n - 1),
        "size": len(realloc),
        "bound": n * (n - 1),
    }
    witnesses = [(bundle.t_star, allocs)] if all(v["pass"] for v in verdicts.values()) else []
    return OracleReport(
        feasible_count=feasible_count(inst),
        pareto_set=frontier,
        theorem1_witnesses=witnesses,
        verdicts=verdicts,
    )
