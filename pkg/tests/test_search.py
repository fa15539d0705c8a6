import random
from fractions import Fraction
from math import comb, factorial

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from catfair.assignment import CostTable, enumerate_optima, probe_face
from catfair.exact import LexCost
from catfair.fairness import is_ef11
from catfair.linalg import rank
from catfair.model import Allocation, Instance, build_slot_graph, normalize
from catfair.oracle import ParetoIndex, check_theorem1
from catfair.perturbation import compute_K, edge_costs, shrink_weights
from catfair.search import (
    CycleLimitExceeded,
    arrangement_vertices,
    derive_ef11,
    enumerate_cycle_hyperplanes,
    find_witness,
    grid_refinement_search,
    perturbed_vertices,
    two_agent_sweep,
)

from corpus import corpus, random_instance

F = Fraction


def _pair(u1, u2, cap=1):
    m = len(u1)
    return Instance(n=2, utilities=[u1, u2], categories=[tuple(range(m))], capacities=[cap])


SEPARATED = _pair((3, 1), (1, 3))
TIED = _pair((2, 1), (2, 1))


def _cycle_census(n, N):
    """Elementary cycles of the complete bipartite graph K_{n,N}."""
    return sum(comb(n, L) * comb(N, L) * factorial(L) ** 2 // (2 * L) for L in range(2, min(n, N) + 1))


# --- cycles ---------------------------------------------------------------------


def test_single_four_cycle():
    hps = enumerate_cycle_hyperplanes(build_slot_graph(SEPARATED), SEPARATED)
    assert len(hps) == 1
    (h,) = hps
    assert h.cycle == (1, 2, 4, 3)
    assert h.normal == ((1, 1), (2, -1), (3, -1), (4, 1))
    assert h.weights == (2, 2)


def test_no_cycles_for_one_agent():
    inst = Instance(n=1, utilities=[[1, 2, 3]], categories=[(0, 1, 2)], capacities=[3])
    assert enumerate_cycle_hyperplanes(build_slot_graph(inst), inst) == []


def test_three_cycles_in_k23():
    inst = Instance(n=2, utilities=[[1, 2, 3], [3, 2, 1]], categories=[(0, 1, 2)], capacities=[2])
    hps = enumerate_cycle_hyperplanes(build_slot_graph(inst), inst)
    assert len(hps) == 3
    assert all(h.length == 4 for h in hps)


@pytest.mark.parametrize("n,cap", [(2, 2), (2, 3), (3, 1), (3, 2), (4, 1)])
def test_cycle_census(n, cap):
    N = n * cap
    inst = Instance(n=n, utilities=[[0] * N] * n, categories=[tuple(range(N))], capacities=[cap])
    hps = enumerate_cycle_hyperplanes(build_slot_graph(inst), inst)
    assert len(hps) == _cycle_census(n, N)
    assert len({h.cycle for h in hps}) == len(hps)


def test_cycles_stay_within_categories():
    inst = normalize(Instance(n=2, utilities=[[1, 2, 3], [3, 2, 1]], categories=[(0, 1), (2,)], capacities=[1, 1]))
    hps = enumerate_cycle_hyperplanes(build_slot_graph(inst), inst)
    assert len(hps) == 2


@given(st.integers(0, 10**9))
@settings(max_examples=30, deadline=None)
def test_cycle_representation_is_canonical(seed):
    inst = normalize(random_instance(random.Random(seed), max_items=5))
    g = build_slot_graph(inst)
    for h in enumerate_cycle_hyperplanes(g, inst):
        c = h.cycle
        assert len(c) >= 4 and len(c) % 2 == 0
        assert c[0] == min(c) and c[1] < c[-1]
        # consecutive edges share a slot or an item, alternately
        for q in range(len(c)):
            a, b = g.edges[c[q] - 1], g.edges[c[(q + 1) % len(c)] - 1]
            assert (a.item == b.item) if q % 2 == 0 else (a.agent == b.agent and a.category == b.category)
        w = [0] * inst.n
        for q, r in enumerate(c):
            e = g.edges[r - 1]
            w[e.agent] += (-1) ** q * inst.utilities[e.agent][e.item]
        assert tuple(w) == h.weights


def test_cycle_cap():
    inst = normalize(Instance(n=3, utilities=[[0] * 6] * 3, categories=[tuple(range(6))], capacities=[2]))
    with pytest.raises(CycleLimitExceeded):
        enumerate_cycle_hyperplanes(build_slot_graph(inst), inst, max_cycles=10)


# --- arrangement ------------------------------------------------------------------


def _vertices(inst):
    hps = enumerate_cycle_hyperplanes(build_slot_graph(inst), inst)
    return [w.t for w in arrangement_vertices(hps, inst, compute_K(inst))]


def test_tie_vertex():
    assert _vertices(TIED) == [(0, 1), (F(1, 2), F(1, 2)), (1, 0)]


def test_hyperplane_missing_the_simplex():
    assert _vertices(SEPARATED) == [(0, 1), (1, 0)]


def test_single_agent_vertex():
    inst = Instance(n=1, utilities=[[4]], categories=[(0,)], capacities=[1])
    assert _vertices(inst) == [(1,)]


def test_base_vertices_satisfy_their_equations():
    inst = normalize(Instance(n=3, utilities=[[2, -1, 0], [2, 1, -3], [0, 4, 1]], categories=[(0, 1, 2)], capacities=[1]))
    K = compute_K(inst)
    hps = enumerate_cycle_hyperplanes(build_slot_graph(inst), inst)
    pts = arrangement_vertices(hps, inst, K)
    assert pts == sorted(pts, key=lambda w: w.t)
    for w in pts:
        assert sum(w.t) == 1 and all(x >= 0 for x in w.t)
        rows = [h.weights for h in hps if sum(a * b for a, b in zip(h.weights, w.t_prime)) == 0]
        rows += [tuple(int(c == i) for c in range(inst.n)) for i, x in enumerate(w.t) if x == 0]
        # the tight constraints and the simplex plane pin the point
        assert rank(rows + [(1,) * inst.n]) == inst.n


@given(st.integers(0, 10**9))
@settings(max_examples=15, deadline=None)
def test_rational_optima_appear_at_some_perturbed_vertex(seed):
    # every rational weight point's optimum is among the optima of some
    # vertex of the perturbed arrangement
    rng = random.Random(seed)
    inst = normalize(random_instance(rng, n=rng.choice((2, 2, 3)), k=1, max_items=4, extra_capacity=0))
    g = build_slot_graph(inst)
    K = compute_K(inst)
    hps = enumerate_cycle_hyperplanes(g, inst)
    vertex_optima = []
    for w in perturbed_vertices(hps, inst, K):
        table = CostTable(edge_costs(inst, g, w))
        vertex_optima.append(set(enumerate_optima(g, table, probe_face(g, table))))
    D = 16
    for a in range(D + 1):
        for b in range(D + 1 - a) if inst.n == 3 else [D - a]:
            t = (F(a, D), F(b, D)) + ((F(D - a - b, D),) if inst.n == 3 else ())
            table = CostTable(edge_costs(inst, g, shrink_weights(t, K)))
            opt = set(enumerate_optima(g, table, probe_face(g, table)))
            assert any(opt <= s for s in vertex_optima)


# --- witnesses -------------------------------------------------------------------


def test_single_agent_witness():
    inst = Instance(n=1, utilities=[[4, -2]], categories=[(0, 1)], capacities=[2])
    bundle = find_witness(inst)
    assert bundle.per_agent == (Allocation((0, 0)),)
    assert bundle.realloc == frozenset()


def test_separated_instance():
    for bundle in (find_witness(SEPARATED), two_agent_sweep(SEPARATED)):
        assert bundle.per_agent == (Allocation((0, 1)), Allocation((0, 1)))
        assert bundle.realloc == frozenset()
        assert derive_ef11(SEPARATED, bundle) == Allocation((0, 1))


def test_tied_instance():
    for bundle in (find_witness(TIED), two_agent_sweep(TIED), find_witness(TIED, strategy="exhaustive")):
        assert bundle.t_star.base == (F(1, 2), F(1, 2))
        assert bundle.per_agent == (Allocation((0, 1)), Allocation((1, 0)))
        assert bundle.realloc == frozenset({0, 1})
        choice = derive_ef11(TIED, bundle)
        assert choice == Allocation((1, 0))
        assert is_ef11(TIED, choice) and is_ef11(TIED, bundle.per_agent[0])


def test_derive_ef11_preconditions():
    inst = Instance(n=3, utilities=[[1], [1], [1]], categories=[(0,)], capacities=[1])
    with pytest.raises(ValueError):
        derive_ef11(inst, find_witness(inst))


def test_certificates():
    bundle = find_witness(TIED)
    c = bundle.certificates
    assert c["envy_free"] == [True, True]
    assert c["pareto_optimal"] == [True, True] and c["pareto_method"] == "bruteforce"
    assert c["optimal_at_t_star"] == [True, True]
    assert c["realloc_size"] == 2 and c["realloc_within_bound"]


def test_explicit_mode_witness():
    bundle = find_witness(TIED, epsilon="explicit")
    assert bundle.t_star.is_rational()
    assert bundle.realloc == frozenset({0, 1})
    assert check_theorem1(bundle.instance, bundle).passed


def test_grid_heuristic():
    found = grid_refinement_search(SEPARATED, depth=0)
    assert found is not None and found.stats["depth"] == 0 and found.heuristic
    assert grid_refinement_search(TIED, depth=0) is None
    found = grid_refinement_search(TIED, depth=1)
    assert found.t_star.base == (F(1, 2), F(1, 2))
    assert check_theorem1(found.instance, found).passed


@given(st.integers(0, 10**9))
@settings(max_examples=25, deadline=None)
def test_all_strategies_give_valid_bundles(seed):
    inst = random_instance(random.Random(seed), max_items=4)
    bundles = [find_witness(inst), find_witness(inst, strategy="exhaustive"), find_witness(inst, epsilon="explicit")]
    if inst.n == 2:
        bundles.append(two_agent_sweep(inst))
    grid = grid_refinement_search(inst, depth=2)
    if grid is not None:
        bundles.append(grid)
    for b in bundles:
        assert check_theorem1(b.instance, b).passed
        assert all(b.certificates["optimal_at_t_star"])
        assert max(c for _, c in b.trace) <= inst.n * (inst.n - 1)


@given(st.integers(0, 10**9))
@settings(max_examples=25, deadline=None)
def test_derive_ef11_output_is_ef11_and_pareto_optimal(seed):
    inst = random_instance(random.Random(seed), n=2, max_items=6)
    for bundle in (find_witness(inst), two_agent_sweep(inst)):
        a = derive_ef11(inst, bundle)
        assert is_ef11(bundle.instance, a)
        assert ParetoIndex(inst).is_pareto_optimal(a.restrict(inst.m))


def test_search_is_deterministic_and_independent_of_workers():
    for inst in corpus(5, 6, n=3, max_items=5):
        a, b = find_witness(inst), find_witness(inst)
        assert a == b and a.trace == b.trace
        c = find_witness(inst, workers=2)
        assert (c.t_star, c.per_agent, c.realloc) == (a.t_star, a.per_agent, a.realloc)


def test_witness_point_is_in_simplex():
    for inst in corpus(3, 10, max_items=5):
        w = find_witness(inst).t_star
        assert sum(w.t) == 1
        assert all(x.sign() >= 0 for x in w.t)
        assert all(isinstance(x, LexCost) for x in w.t)
