"""Envy, EF1 / EF[1,1], Pareto-optimality checks and reallocation sets."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .model import Allocation, Instance, InstanceError, bundle_utility, utility_vector


@dataclass(frozen=True)
class EnvyGraph:
    """Arc ``(i, k)`` whenever agent ``i`` strictly prefers ``k``'s bundle to its own."""

    n: int
    arcs: frozenset

    def successors(self, i: int) -> list:
        return sorted(k for a, k in self.arcs if a == i)

    def is_acyclic(self) -> bool:
        indeg = [0] * self.n
        for _, k in self.arcs:
            indeg[k] += 1
        stack = [i for i in range(self.n) if indeg[i] == 0]
        seen = 0
        while stack:
            i = stack.pop()
            seen += 1
            for k in self.successors(i):
                indeg[k] -= 1
                if indeg[k] == 0:
                    stack.append(k)
        return seen == self.n

    def path_to_sink(self, start: int) -> list:
        """Follow smallest-index successors until a sink; requires acyclicity."""
        path = [start]
        while True:
            nxt = self.successors(path[-1])
            if not nxt:
                return path
            if nxt[0] in path:
                raise ValueError("envy graph has a cycle")
            path.append(nxt[0])


def _values(inst: Instance, a: Allocation) -> list:
    """``vals[i][k] = u_i(A_k)``."""
    n = inst.n
    vals = [[0] * n for _ in range(n)]
    for j, k in enumerate(a.owner):
        for i in range(n):
            vals[i][k] += inst.utilities[i][j]
    return vals


def envy_graph(inst: Instance, a: Allocation) -> EnvyGraph:
    vals = _values(inst, a)
    arcs = frozenset(
        (i, k) for i in range(inst.n) for k in range(inst.n) if k != i and vals[i][k] > vals[i][i]
    )
    return EnvyGraph(n=inst.n, arcs=arcs)


def is_envy_free_for(inst: Instance, a: Allocation, i: int) -> bool:
    vals = _values(inst, a)[i]
    return all(vals[k] <= vals[i] for k in range(inst.n))


def envy_free_agents(inst: Instance, a: Allocation) -> frozenset:
    vals = _values(inst, a)
    return frozenset(i for i in range(inst.n) if max(vals[i]) <= vals[i][i])


def rotate_along_path(inst: Instance, a: Allocation, path: Sequence[int]) -> Allocation:
    """Give each agent on the path the next agent's bundle; the last gets the first's.

    Raises:
        ValueError: if consecutive agents are not envy arcs or the path does
            not end at a sink of the envy graph.
    """
    g = envy_graph(inst, a)
    path = list(path)
    if not path or len(set(path)) != len(path):
        raise ValueError("path must be a nonempty sequence of distinct agents")
    for x, y in zip(path, path[1:]):
        if (x, y) not in g.arcs:
            raise ValueError(f"agent {x + 1} does not envy agent {y + 1}")
    if g.successors(path[-1]):
        raise ValueError(f"agent {path[-1] + 1} is not a sink of the envy graph")
    if len(path) == 1:
        return a
    # the bundle of path[l + 1] moves to path[l]
    receiver = {y: x for x, y in zip(path, path[1:] + path[:1])}
    return Allocation(tuple(receiver.get(i, i) for i in a.owner))


def _ef1_pair(row: Sequence[int], own: list, other: list) -> bool:
    mine = sum(row[j] for j in own)
    theirs = sum(row[j] for j in other)
    if mine >= theirs:
        return True
    for j in own:
        if mine - row[j] >= theirs:
            return True
    for j in other:
        if mine >= theirs - row[j]:
            return True
    return False


def _ef11_pair(row: Sequence[int], own: list, other: list) -> bool:
    mine = sum(row[j] for j in own)
    theirs = sum(row[j] for j in other)
    for s in [None] + own:
        left = mine - (row[s] if s is not None else 0)
        for t in [None] + other:
            if left >= theirs - (row[t] if t is not None else 0):
                return True
    return False


def _pairwise(inst: Instance, a: Allocation, check) -> bool:
    bundles = [sorted(b) for b in a.bundles(inst.n)]
    for i in range(inst.n):
        row = inst.utilities[i]
        for k in range(inst.n):
            if k != i and not check(row, bundles[i], bundles[k]):
                return False
    return True


def is_ef1(inst: Instance, a: Allocation) -> bool:
    """Envy vanishes for every pair after removing one item from either bundle."""
    return _pairwise(inst, a, _ef1_pair)


def is_ef11(inst: Instance, a: Allocation) -> bool:
    """Envy vanishes after removing one item from each of the two bundles."""
    return _pairwise(inst, a, _ef11_pair)


def is_pareto_optimal_bruteforce(inst: Instance, a: Allocation, limit: Optional[int] = None) -> bool:
    """Exact Pareto-optimality by enumerating all feasible allocations.

    Raises:
        EnumerationLimit: if the instance has more than ``limit`` feasible allocations.
    """
    from .oracle import dominating_allocation

    return dominating_allocation(inst, a, limit=limit) is None


def reallocation_set(allocs: Iterable[Allocation]) -> frozenset:
    """Items whose owner is not the same in all given allocations."""
    allocs = list(allocs)
    if not allocs:
        raise ValueError("need at least one allocation")
    m = len(allocs[0].owner)
    if any(len(x.owner) != m for x in allocs):
        raise InstanceError("allocations cover different item sets")
    return frozenset(j for j in range(m) if len({x.owner[j] for x in allocs}) > 1)


def dominates(inst: Instance, b: Allocation, a: Allocation) -> bool:
    ub, ua = utility_vector(inst, b), utility_vector(inst, a)
    return all(x >= y for x, y in zip(ub, ua)) and ub != ua


def bundle_values(inst: Instance, a: Allocation) -> list:
    return [bundle_utility(inst, i, b) for i, b in enumerate(a.bundles(inst.n))]
