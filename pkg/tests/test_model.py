import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from catfair.model import (
    Allocation,
    Instance,
    InstanceError,
    allocation_from_dict,
    allocation_to_dict,
    build_slot_graph,
    bundle_utility,
    instance_to_dict,
    is_feasible,
    load_instance,
    normalize,
)

from corpus import random_instance


def _json(n, utilities, categories):
    return json.dumps({"agents": n, "utilities": utilities, "categories": categories})


def test_minimal_instance_loads():
    inst = load_instance(_json(1, [[5]], [{"items": [1], "capacity": 1}]))
    assert (inst.n, inst.m, inst.k) == (1, 1, 1)
    assert inst.utilities == ((5,),)


def test_overlapping_categories_rejected():
    text = _json(2, [[1, 2], [3, 4]], [{"items": [1], "capacity": 1}, {"items": [1, 2], "capacity": 1}])
    with pytest.raises(InstanceError, match="categories overlap"):
        load_instance(text)


def test_category_larger_than_capacity_rejected():
    text = _json(2, [[1, 2, 3], [3, 2, 1]], [{"items": [1, 2, 3], "capacity": 1}])
    with pytest.raises(InstanceError, match="3 items"):
        load_instance(text)


@pytest.mark.parametrize(
    "text",
    [
        "{not json",
        "[]",
        _json(2, [[1.5, 2], [3, 4]], [{"items": [1, 2], "capacity": 1}]),
        _json(2, [[1, 2], [3, 4]], [{"items": [1], "capacity": 1}]),
        _json(2, [[1, 2], [3, 4]], [{"items": [1, 2], "capacity": 0}]),
        _json(2, [[1, 2]], [{"items": [1, 2], "capacity": 1}]),
        json.dumps({"agents": 2, "utilities": [[1], [2]]}),
    ],
)
def test_malformed_instances_rejected(text):
    with pytest.raises(InstanceError):
        load_instance(text)


def test_normalize_pads_single_item_category():
    norm = normalize(Instance(n=2, utilities=[[4], [2]], categories=[(0,)], capacities=[1]))
    assert norm.categories == ((0, 1),)
    assert norm.dummy_items == frozenset({1})
    assert norm.utilities == ((4, 0), (2, 0))


def test_normalize_full_instance_adds_nothing():
    inst = Instance(n=2, utilities=[[1, 2], [3, 4]], categories=[(0, 1)], capacities=[1])
    norm = normalize(inst)
    assert norm.dummy_items == frozenset()
    assert norm.base == inst
    assert norm.categories == inst.categories


def test_normalize_counts_dummies_per_category():
    inst = Instance(n=3, utilities=[[1] * 5] * 3, categories=[(0, 1), (2, 3, 4)], capacities=[1, 1])
    norm = normalize(inst)
    assert norm.m == 6
    assert [len(c) - len(b) for c, b in zip(norm.categories, inst.categories)] == [1, 0]
    assert norm.dummy_items == frozenset({5})


def test_feasibility_examples():
    inst = Instance(n=2, utilities=[[3, 1], [1, 3]], categories=[(0, 1)], capacities=[1])
    assert is_feasible(inst, Allocation.from_bundles([{0}, {1}], 2))
    assert not is_feasible(inst, Allocation.from_bundles([{0, 1}, set()], 2))
    single = Instance(n=1, utilities=[[1, 2, 3]], categories=[(0, 1, 2)], capacities=[3])
    assert is_feasible(single, Allocation((0, 0, 0)))


def test_feasibility_rejects_unknown_agent():
    inst = Instance(n=2, utilities=[[3, 1], [1, 3]], categories=[(0, 1)], capacities=[1])
    with pytest.raises(InstanceError):
        is_feasible(inst, Allocation((0, 2)))
    with pytest.raises(InstanceError):
        is_feasible(inst, Allocation((0,)))


def test_bundle_utility_examples():
    inst = normalize(Instance(n=2, utilities=[[3, 1, 2], [1, 3, 0]], categories=[(0, 1, 2)], capacities=[2]))
    assert bundle_utility(inst, 0, {0, 1}) == 4
    assert bundle_utility(inst, 0, set()) == 0
    (dummy,) = inst.dummy_items
    assert bundle_utility(inst, 1, {dummy}) == 0


def test_slot_graph_two_by_two():
    g = build_slot_graph(Instance(n=2, utilities=[[3, 1], [1, 3]], categories=[(0, 1)], capacities=[1]))
    assert g.d == 4
    assert [(e.item, e.agent) for e in g.edges] == [(0, 0), (0, 1), (1, 0), (1, 1)]
    assert [g.rank(e.agent, e.item) for e in g.edges] == [1, 2, 3, 4]
    for j in range(2):
        assert sum(1 for e in g.edges if e.item == j) == 2


def test_slot_graph_single_agent_rank_order():
    g = build_slot_graph(Instance(n=1, utilities=[[1, 2, 3]], categories=[(0, 1, 2)], capacities=[3]))
    assert [(e.rank, e.item) for e in g.edges] == [(1, 0), (2, 1), (3, 2)]


@given(st.integers(0, 10**6))
@settings(max_examples=50)
def test_normalized_invariants(seed):
    import random

    inst = random_instance(random.Random(seed))
    norm = normalize(inst)
    for items, s in zip(norm.categories, norm.capacities):
        assert len(items) == norm.n * s
    for j in norm.dummy_items:
        assert all(row[j] == 0 for row in norm.utilities)
    assert normalize(norm) is norm
    g = build_slot_graph(norm)
    assert g.d == norm.n * norm.m
    assert load_instance(json.dumps(instance_to_dict(inst))) == inst


def test_allocation_json_round_trip():
    a = Allocation((1, 0, 1))
    data = allocation_to_dict(a)
    assert data == {"assignment": {"1": 2, "2": 1, "3": 2}}
    assert allocation_from_dict(data, 3) == a
    assert allocation_to_dict(a, m=2) == {"assignment": {"1": 2, "2": 1}}
