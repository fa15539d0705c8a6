"""Instances, allocations and the agent-slot/item graph.

Agents and items are 0-based in Python; the JSON format is 1-based.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence


class InstanceError(ValueError):
    """Raised for malformed or infeasible instances and allocations."""


@dataclass(frozen=True)
class Instance:
    """Additive integer utilities over items partitioned into capped categories.

    Attributes:
        n: number of agents.
        utilities: ``utilities[i][j]`` is agent ``i``'s value for item ``j``.
        categories: disjoint item tuples covering ``range(m)``.
        capacities: ``capacities[h]`` items of category ``h`` at most per agent.
    """

    n: int
    utilities: tuple
    categories: tuple
    capacities: tuple

    def __post_init__(self):
        object.__setattr__(self, "utilities", tuple(tuple(row) for row in self.utilities))
        object.__setattr__(self, "categories", tuple(tuple(c) for c in self.categories))
        object.__setattr__(self, "capacities", tuple(self.capacities))
        _validate(self)

    @property
    def m(self) -> int:
        return len(self.utilities[0]) if self.utilities else 0

    @property
    def k(self) -> int:
        return len(self.categories)

    @property
    def category_of(self) -> tuple:
        out = [0] * self.m
        for h, items in enumerate(self.categories):
            for j in items:
                out[j] = h
        return tuple(out)

    def is_full(self) -> bool:
        return all(len(c) == self.n * s for c, s in zip(self.categories, self.capacities))


def _validate(inst: Instance) -> None:
    if not isinstance(inst.n, int) or isinstance(inst.n, bool) or inst.n < 1:
        raise InstanceError("agent count must be a positive integer")
    if len(inst.utilities) != inst.n:
        raise InstanceError(f"expected {inst.n} utility rows, got {len(inst.utilities)}")
    m = len(inst.utilities[0])
    for row in inst.utilities:
        if len(row) != m:
            raise InstanceError("utility rows have different lengths")
        for u in row:
            if not isinstance(u, int) or isinstance(u, bool):
                raise InstanceError(f"utilities must be integers, got {u!r}")
    if len(inst.capacities) != len(inst.categories):
        raise InstanceError("one capacity per category is required")
    seen: set[int] = set()
    for h, items in enumerate(inst.categories):
        for j in items:
            if not isinstance(j, int) or isinstance(j, bool) or not 0 <= j < m:
                raise InstanceError(f"unknown item {j!r} in category {h + 1}")
            if j in seen:
                raise InstanceError(f"categories overlap on item {j + 1}")
            seen.add(j)
    if len(seen) != m:
        missing = sorted(set(range(m)) - seen)
        raise InstanceError(f"items {[j + 1 for j in missing]} belong to no category")
    for h, (items, s) in enumerate(zip(inst.categories, inst.capacities)):
        if not isinstance(s, int) or isinstance(s, bool) or s < 1:
            raise InstanceError(f"capacity of category {h + 1} must be a positive integer")
        if len(items) > inst.n * s:
            raise InstanceError(
                f"category {h + 1} has {len(items)} items but {inst.n} agents "
                f"can hold at most {inst.n}*{s}={inst.n * s}"
            )


@dataclass(frozen=True)
class NormalizedInstance(Instance):
    """An instance padded with zero-utility dummies so that ``|S_h| = n * s_h``."""

    base: Optional[Instance] = None
    dummy_items: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        super().__post_init__()
        if not self.is_full():
            raise InstanceError("normalized instance must have n*s_h items per category")
        for j in self.dummy_items:
            if any(row[j] for row in self.utilities):
                raise InstanceError(f"dummy item {j + 1} has nonzero utility")

    @property
    def real_items(self) -> range:
        return range(self.base.m if self.base is not None else self.m)


def normalize(inst: Instance) -> NormalizedInstance:
    """Pad every category with zero-utility dummies up to ``n * s_h`` items.

    Dummies get ids ``m, m+1, ...`` in category order.
    """
    if isinstance(inst, NormalizedInstance):
        return inst
    n, m = inst.n, inst.m
    cats = []
    next_id = m
    for items, s in zip(inst.categories, inst.capacities):
        pad = n * s - len(items)
        cats.append(tuple(items) + tuple(range(next_id, next_id + pad)))
        next_id += pad
    rows = tuple(tuple(row) + (0,) * (next_id - m) for row in inst.utilities)
    return NormalizedInstance(
        n=n,
        utilities=rows,
        categories=tuple(cats),
        capacities=inst.capacities,
        base=inst,
        dummy_items=frozenset(range(m, next_id)),
    )


@dataclass(frozen=True, order=True)
class Allocation:
    """``owner[j]`` is the agent holding item ``j``."""

    owner: tuple

    def __post_init__(self):
        object.__setattr__(self, "owner", tuple(self.owner))

    @classmethod
    def from_bundles(cls, bundles: Sequence[Iterable[int]], m: int) -> "Allocation":
        owner = [-1] * m
        for i, bundle in enumerate(bundles):
            for j in bundle:
                if owner[j] != -1:
                    raise InstanceError(f"item {j + 1} appears in two bundles")
                owner[j] = i
        if -1 in owner:
            raise InstanceError(f"item {owner.index(-1) + 1} is not allocated")
        return cls(tuple(owner))

    def bundles(self, n: int) -> tuple:
        out: list[list[int]] = [[] for _ in range(n)]
        for j, i in enumerate(self.owner):
            out[i].append(j)
        return tuple(frozenset(b) for b in out)

    def bundle(self, i: int) -> frozenset:
        return frozenset(j for j, a in enumerate(self.owner) if a == i)

    def restrict(self, m: int) -> "Allocation":
        """Drop items with id ``>= m`` (the dummies of a normalized instance)."""
        return Allocation(self.owner[:m])


def is_feasible(inst: Instance, a: Allocation) -> bool:
    """Whether every agent holds at most ``s_h`` items of each category.

    On a normalized instance this forces exactly ``s_h``.
    """
    if len(a.owner) != inst.m:
        raise InstanceError(f"allocation covers {len(a.owner)} items, instance has {inst.m}")
    for i in a.owner:
        if not isinstance(i, int) or not 0 <= i < inst.n:
            raise InstanceError(f"unknown agent {i!r}")
    for items, s in zip(inst.categories, inst.capacities):
        counts = [0] * inst.n
        for j in items:
            counts[a.owner[j]] += 1
        if max(counts) > s:
            return False
    return True


def bundle_utility(inst: Instance, i: int, items: Iterable[int]) -> int:
    row = inst.utilities[i]
    return sum(row[j] for j in items)


def utility_vector(inst: Instance, a: Allocation) -> tuple:
    totals = [0] * inst.n
    for j, i in enumerate(a.owner):
        totals[i] += inst.utilities[i][j]
    return tuple(totals)


@dataclass(frozen=True)
class Edge:
    rank: int  # 1-based position in the (item, agent) order
    agent: int
    category: int
    item: int


@dataclass(frozen=True)
class SlotGraph:
    """Bipartite graph between slots ``(agent, category)`` and items.

    ``edges[rank - 1]`` is the edge of that rank; ranks follow ascending
    ``(item, agent)``.
    """

    n: int
    m: int
    k: int
    edges: tuple
    capacities: tuple
    category_items: tuple

    @property
    def d(self) -> int:
        return len(self.edges)

    def edge(self, agent: int, item: int) -> Edge:
        return self.edges[item * self.n + agent]

    def rank(self, agent: int, item: int) -> int:
        return item * self.n + agent + 1

    def allocation_edges(self, a: Allocation) -> list:
        return [self.edges[j * self.n + i] for j, i in enumerate(a.owner)]


def build_slot_graph(inst: Instance) -> SlotGraph:
    cat = inst.category_of
    edges = []
    for j in range(inst.m):
        for i in range(inst.n):
            edges.append(Edge(rank=len(edges) + 1, agent=i, category=cat[j], item=j))
    return SlotGraph(
        n=inst.n,
        m=inst.m,
        k=inst.k,
        edges=tuple(edges),
        capacities=inst.capacities,
        category_items=inst.categories,
    )


# --- JSON -----------------------------------------------------------------


def instance_from_dict(data) -> Instance:
    if not isinstance(data, dict):
        raise InstanceError("instance JSON must be an object")
    try:
        n = data["agents"]
        utilities = data["utilities"]
        raw_cats = data["categories"]
    except KeyError as exc:
        raise InstanceError(f"missing key {exc.args[0]!r}") from None
    if not isinstance(utilities, list) or not all(isinstance(r, list) for r in utilities):
        raise InstanceError("utilities must be a list of lists")
    if not isinstance(raw_cats, list):
        raise InstanceError("categories must be a list")
    cats, caps = [], []
    for c in raw_cats:
        if not isinstance(c, dict) or "items" not in c or "capacity" not in c:
            raise InstanceError("each category needs 'items' and 'capacity'")
        items = c["items"]
        if not isinstance(items, list) or not all(isinstance(j, int) and not isinstance(j, bool) for j in items):
            raise InstanceError("category items must be integer ids")
        cats.append(tuple(j - 1 for j in items))
        caps.append(c["capacity"])
    return Instance(n=n, utilities=utilities, categories=cats, capacities=caps)


def load_instance(text: str) -> Instance:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"invalid JSON: {exc}") from None
    return instance_from_dict(data)


def instance_to_dict(inst: Instance) -> dict:
    return {
        "agents": inst.n,
        "utilities": [list(r) for r in inst.utilities],
        "categories": [
            {"items": [j + 1 for j in items], "capacity": s}
            for items, s in zip(inst.categories, inst.capacities)
        ],
    }


def allocation_to_dict(a: Allocation, m: Optional[int] = None) -> dict:
    """``{"assignment": {"<item>": agent}}``, 1-based; items ``>= m`` are left out."""
    limit = len(a.owner) if m is None else m
    return {"assignment": {str(j + 1): a.owner[j] + 1 for j in range(limit)}}


def allocation_from_dict(data, m: int) -> Allocation:
    try:
        assignment = data["assignment"]
    except (KeyError, TypeError):
        raise InstanceError("allocation JSON needs an 'assignment' object") from None
    owner = [-1] * m
    for key, agent in assignment.items():
        try:
            j = int(key) - 1
        except ValueError:
            raise InstanceError(f"bad item id {key!r}") from None
        if not 0 <= j < m:
            raise InstanceError(f"unknown item id {key}")
        if not isinstance(agent, int) or isinstance(agent, bool):
            raise InstanceError(f"bad agent id {agent!r}")
        owner[j] = agent - 1
    if -1 in owner:
        raise InstanceError(f"item {owner.index(-1) + 1} is not assigned")
    return Allocation(tuple(owner))
