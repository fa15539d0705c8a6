import random
from dataclasses import replace
from math import factorial

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from catfair.fairness import is_pareto_optimal_bruteforce
from catfair.model import Allocation, Instance, normalize
from catfair.oracle import (
    EnumerationLimit,
    ParetoIndex,
    check_theorem1,
    enumerate_feasible,
    enumeration_limit,
    feasible_count,
    pareto_frontier,
)
from catfair.search import find_witness

from corpus import random_instance


def _cat(n, size, cap, u=None):
    u = u or [[0] * size for _ in range(n)]
    return Instance(n=n, utilities=u, categories=[tuple(range(size))], capacities=[cap])


@pytest.mark.parametrize("n,size,cap,count", [(2, 2, 1, 2), (2, 4, 2, 6), (3, 3, 1, 6)])
def test_enumeration_counts(n, size, cap, count):
    inst = _cat(n, size, cap)
    allocs = list(enumerate_feasible(inst))
    assert len(allocs) == count == feasible_count(inst)
    assert len(set(allocs)) == count


def test_enumeration_of_partial_instance():
    # two agents, three items, capacity 2: splits 2+1 or 1+2 in every way
    inst = _cat(2, 3, 2)
    assert len(list(enumerate_feasible(inst))) == feasible_count(inst) == 6


def test_enumeration_limit(monkeypatch):
    inst = _cat(2, 4, 2)
    with pytest.raises(EnumerationLimit):
        list(enumerate_feasible(inst, limit=5))
    monkeypatch.setenv("CATFAIR_ENUM_LIMIT", "3")
    assert enumeration_limit() == 3
    with pytest.raises(EnumerationLimit):
        list(enumerate_feasible(inst))


@given(st.integers(0, 10**9))
@settings(max_examples=40, deadline=None)
def test_count_matches_closed_form(seed):
    inst = normalize(random_instance(random.Random(seed), max_items=6))
    expected = 1
    for s in inst.capacities:
        expected *= factorial(inst.n * s) // factorial(s) ** inst.n
    assert feasible_count(inst) == expected == sum(1 for _ in enumerate_feasible(inst))


def test_frontier_examples():
    assert pareto_frontier(_cat(1, 2, 2, [[1, -3]])) == [Allocation((0, 0))]
    assert pareto_frontier(_cat(2, 2, 1, [[3, 1], [1, 3]])) == [Allocation((0, 1))]
    assert sorted(pareto_frontier(_cat(2, 2, 1, [[2, 1], [2, 1]]))) == [Allocation((0, 1)), Allocation((1, 0))]


@given(st.integers(0, 10**9))
@settings(max_examples=25, deadline=None)
def test_frontier_agrees_with_pointwise_check(seed):
    inst = random_instance(random.Random(seed), max_items=4)
    index = ParetoIndex(inst)
    for a in enumerate_feasible(inst):
        assert index.is_pareto_optimal(a) == is_pareto_optimal_bruteforce(inst, a)


def test_check_passes_on_solver_output():
    inst = Instance(n=3, utilities=[[2, -1, 0, 4], [2, 1, -3, 1], [0, 0, 1, 1]], categories=[(0, 1, 2), (3,)], capacities=[1, 1])
    bundle = find_witness(inst)
    report = check_theorem1(bundle.instance, bundle)
    assert report.passed
    assert report.pareto_set and report.theorem1_witnesses


def test_check_flags_dominated_allocation():
    inst = normalize(_cat(2, 2, 1, [[3, 1], [1, 3]]))
    bundle = find_witness(inst)
    bad = replace(bundle, per_agent=(Allocation((1, 0)), bundle.per_agent[1]), realloc=frozenset({0, 1}))
    report = check_theorem1(inst, bad)
    assert not report.passed
    po = report.verdicts["pareto_optimal"]
    assert not po["pass"]
    assert po["counterexamples"] == [{"agent": 1, "dominated_by": [0, 1]}]


def test_bound_is_inclusive():
    inst = normalize(_cat(2, 2, 1, [[2, 1], [2, 1]]))
    bundle = find_witness(inst)
    assert len(bundle.realloc) == 2 == inst.n * (inst.n - 1)
    assert check_theorem1(inst, bundle).verdicts["realloc_bound"]["pass"]


def test_check_flags_disagreement_outside_realloc():
    inst = normalize(_cat(2, 2, 1, [[2, 1], [2, 1]]))
    bundle = find_witness(inst)
    report = check_theorem1(inst, replace(bundle, realloc=frozenset({0})))
    assert report.verdicts["common_outside_realloc"]["counterexamples"] == [2]
