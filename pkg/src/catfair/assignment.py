"""Exact maximization of linear edge costs over feasible allocations.

Feasible allocations are the integral points of a transportation polytope that
splits into one component per category: slot ``(i, h)`` must receive exactly
``s_h`` items of category ``h``.  Each component is solved as an assignment
problem (slot copies x items) with the Hungarian method.  Costs may be ints,
Fractions or :class:`LexCost`; they are embedded into Python ints first, so
every comparison is exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .exact import LexCost, LexEmbedding, as_lex
from .model import Allocation, SlotGraph


class Infeasible(Exception):
    """No feasible allocation respects the forced and forbidden edges."""


class TooManyFreeItems(ValueError):
    """The optimal face leaves more items undetermined than allowed."""


class CostTable:
    """Edge costs in rank order together with their exact integer embedding."""

    def __init__(self, costs: Sequence, embedding: Optional[LexEmbedding] = None):
        self.values = list(costs)
        if all(type(c) is int for c in self.values):
            self.embedding = None
            self.ints = list(self.values)
        else:
            self.embedding = embedding or LexEmbedding(self.values)
            self.ints = [self.embedding.encode(c) for c in self.values]

    def decode(self, code: int):
        if self.embedding is None:
            return code
        return self.embedding.decode(code)


def _table(costs) -> CostTable:
    return costs if isinstance(costs, CostTable) else CostTable(costs)


@dataclass(frozen=True)
class SolveResult:
    """An integral optimum with dual potentials certifying it.

    ``potentials`` maps ``("slot", i, h)`` and ``("item", j)`` to values with
    ``pi[b] >= pi[a] + cost(a -> b)`` on every residual arc, so no residual
    cycle has positive cost.
    """

    allocation: Allocation
    objective: object
    potentials: dict


@dataclass(frozen=True)
class FaceReport:
    """Edges fixed on the optimal face and the items left undetermined."""

    fixed_one: frozenset
    fixed_zero: frozenset
    free_items: frozenset
    optimum: object
    allocation: Allocation


def _hungarian_max(weights: list) -> list:
    """Maximum-weight perfect matching on a square matrix; ``None`` = no edge.

    Returns ``col_of_row``.  Raises :class:`Infeasible` when no perfect
    matching exists.
    """
    N = len(weights)
    if N == 0:
        return []
    # minimization on negated weights, 1-based as in the classic formulation
    a = [[None] * (N + 1)] + [[None] + [None if w is None else -w for w in row] for row in weights]
    u = [0] * (N + 1)
    v = [0] * (N + 1)
    p = [0] * (N + 1)
    way = [0] * (N + 1)
    for i in range(1, N + 1):
        p[0] = i
        j0 = 0
        minv = [None] * (N + 1)
        used = [False] * (N + 1)
        while True:
            used[j0] = True
            i0 = p[j0]
            row = a[i0]
            ui0 = u[i0]
            delta = None
            j1 = 0
            for j in range(1, N + 1):
                if used[j]:
                    continue
                aij = row[j]
                if aij is not None:
                    cur = aij - ui0 - v[j]
                    mj = minv[j]
                    if mj is None or cur < mj:
                        minv[j] = cur
                        way[j] = j0
                mj = minv[j]
                if mj is not None and (delta is None or mj < delta):
                    delta = mj
                    j1 = j
            if delta is None:
                raise Infeasible("no feasible completion")
            for j in range(N + 1):
                if used[j]:
                    u[p[j]] += delta
                    v[j] -= delta
                elif minv[j] is not None:
                    minv[j] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while True:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
            if j0 == 0:
                break
    col_of_row = [0] * N
    for j in range(1, N + 1):
        col_of_row[p[j] - 1] = j - 1
    return col_of_row


def _solve_ints(g: SlotGraph, cost: list, forced: frozenset, forbidden: frozenset) -> list:
    n = g.n
    owner = [-1] * g.m
    for r in sorted(forced):
        e = g.edges[r - 1]
        if owner[e.item] != -1:
            raise Infeasible(f"item {e.item + 1} forced to two agents")
        owner[e.item] = e.agent
    for h, items in enumerate(g.category_items):
        s = g.capacities[h]
        left = [s] * n
        open_items = []
        for j in items:
            if owner[j] == -1:
                open_items.append(j)
            else:
                left[owner[j]] -= 1
        if min(left, default=0) < 0:
            raise Infeasible(f"forced edges exceed capacity in category {h + 1}")
        rows = [i for i in range(n) for _ in range(left[i])]
        if len(rows) != len(open_items):
            raise Infeasible(f"category {h + 1} cannot be filled exactly")
        weights = []
        for i in rows:
            wrow = []
            for j in open_items:
                r = j * n + i + 1
                wrow.append(None if r in forbidden else cost[r - 1])
            weights.append(wrow)
        for row_idx, col in enumerate(_hungarian_max(weights)):
            owner[open_items[col]] = rows[row_idx]
    return owner


def _slot(e) -> tuple:
    return ("slot", e.agent, e.category)


def _residual_arcs(g: SlotGraph, cost: list, owner: Sequence[int], forced, forbidden) -> list:
    """Arcs ``(tail, head, cost, rank)`` of the residual digraph of ``owner``."""
    arcs = []
    for e in g.edges:
        c = cost[e.rank - 1]
        if owner[e.item] == e.agent:
            if e.rank not in forced:
                arcs.append((_slot(e), ("item", e.item), -c, e.rank))
        elif e.rank not in forbidden:
            arcs.append((("item", e.item), _slot(e), c, e.rank))
    return arcs


def _vertices(g: SlotGraph) -> list:
    vs = [("slot", i, h) for h in range(g.k) for i in range(g.n)]
    vs += [("item", j) for j in range(g.m)]
    return vs


def _bellman_ford(vertices: list, arcs: list):
    """Longest-walk potentials from a zero source; returns (pi, cycle or None)."""
    pi = {v: 0 for v in vertices}
    pred: dict = {}
    last = None
    for _ in range(len(vertices)):
        last = None
        for tail, head, c, rank in arcs:
            cand = pi[tail] + c
            if cand > pi[head]:
                pi[head] = cand
                pred[head] = (tail, rank)
                last = head
        if last is None:
            return pi, None
    # a vertex relaxed in round |V| lies on or behind a positive cycle
    v = last
    for _ in range(len(vertices)):
        v = pred[v][0]
    cycle = []
    u = v
    while True:
        tail, rank = pred[u]
        cycle.append(rank)
        u = tail
        if u == v:
            break
    cycle.reverse()
    return pi, cycle


def solve(g: SlotGraph, costs, forced: Iterable[int] = (), forbidden: Iterable[int] = ()) -> SolveResult:
    """Maximize the total cost of chosen edges over feasible allocations.

    Args:
        g: the slot graph.
        costs: per-edge costs in rank order (or a :class:`CostTable`).
        forced: ranks of edges that must be used.
        forbidden: ranks of edges that must not be used.

    Raises:
        Infeasible: if no allocation respects ``forced`` and ``forbidden``.
    """
    table = _table(costs)
    forced = frozenset(forced)
    forbidden = frozenset(forbidden)
    if forced & forbidden:
        raise Infeasible("an edge is both forced and forbidden")
    owner = _solve_ints(g, table.ints, forced, forbidden)
    arcs = _residual_arcs(g, table.ints, owner, forced, forbidden)
    pi, cycle = _bellman_ford(_vertices(g), arcs)
    if cycle is not None:  # pragma: no cover - would mean the embedding overflowed
        raise ArithmeticError("solver returned a non-optimal allocation")
    total = sum(table.ints[j * g.n + i] for j, i in enumerate(owner))
    return SolveResult(
        allocation=Allocation(tuple(owner)),
        objective=table.decode(total),
        potentials={v: table.decode(x) for v, x in pi.items()},
    )


def objective(g: SlotGraph, costs: Sequence, a: Allocation):
    """Exact total cost of the edges used by ``a``."""
    vals = [costs[j * g.n + i] for j, i in enumerate(a.owner)]
    if not vals:
        return 0
    if any(isinstance(v, LexCost) for v in vals):
        vals = [as_lex(v) for v in vals]
    total = vals[0]
    for v in vals[1:]:
        total = total + v
    return total


def find_improving_cycle(g: SlotGraph, costs, a: Allocation, forced=(), forbidden=()) -> Optional[list]:
    """A residual cycle of positive total cost (edge ranks in cycle order), if any."""
    table = _table(costs)
    arcs = _residual_arcs(g, table.ints, a.owner, frozenset(forced), frozenset(forbidden))
    _, cycle = _bellman_ford(_vertices(g), arcs)
    return cycle


def verify_optimality(g: SlotGraph, costs, a: Allocation, forced=(), forbidden=()) -> bool:
    """True iff the residual digraph of ``a`` has no positive-cost directed cycle."""
    return find_improving_cycle(g, costs, a, forced, forbidden) is None


def _longest_paths(nodes: list, arcs: list) -> dict:
    """All-pairs maximum walk weights (Floyd-Warshall); no positive cycles assumed."""
    idx = {v: k for k, v in enumerate(nodes)}
    V = len(nodes)
    dist = [[None] * V for _ in range(V)]
    for k in range(V):
        dist[k][k] = 0
    for tail, head, c, _ in arcs:
        a, b = idx[tail], idx[head]
        if dist[a][b] is None or c > dist[a][b]:
            dist[a][b] = c
    for k in range(V):
        dk = dist[k]
        for a in range(V):
            dak = dist[a][k]
            if dak is None:
                continue
            da = dist[a]
            for b in range(V):
                dkb = dk[b]
                if dkb is None:
                    continue
                cand = dak + dkb
                if da[b] is None or cand > da[b]:
                    da[b] = cand
    return {"index": idx, "dist": dist}


def _probe_warm(g: SlotGraph, cost: list, owner: list, forced, forbidden):
    n = g.n
    one, zero = set(forced), set(forbidden)
    for h, items in enumerate(g.category_items):
        nodes = [("slot", i, h) for i in range(n)] + [("item", j) for j in items]
        arcs = []
        for j in items:
            for i in range(n):
                r = j * n + i + 1
                c = cost[r - 1]
                if owner[j] == i:
                    if r not in forced:
                        arcs.append((("slot", i, h), ("item", j), -c, r))
                elif r not in forbidden:
                    arcs.append((("item", j), ("slot", i, h), c, r))
        lp = _longest_paths(nodes, arcs)
        idx, dist = lp["index"], lp["dist"]
        for j in items:
            jj = idx[("item", j)]
            for i in range(n):
                r = j * n + i + 1
                if r in forced or r in forbidden:
                    continue
                ss = idx[("slot", i, h)]
                c = cost[r - 1]
                if owner[j] == i:
                    # best cycle that drops this edge: arc slot->item plus a path back
                    back = dist[jj][ss]
                    if back is None or back - c < 0:
                        one.add(r)
                else:
                    back = dist[ss][jj]
                    if back is None or back + c < 0:
                        zero.add(r)
    return one, zero


def probe_face(g: SlotGraph, costs, forced=(), forbidden=(), method: str = "warm") -> FaceReport:
    """Find the edges whose value is the same in every optimal allocation.

    An edge is fixed to one when forbidding it lowers the optimum, and fixed
    to zero when forcing it lowers the optimum.  ``method="resolve"`` re-solves
    the problem twice per edge; ``method="warm"`` gets the same answers from
    the best residual cycle through each edge, starting from one optimum.
    """
    table = _table(costs)
    forced = frozenset(forced)
    forbidden = frozenset(forbidden)
    owner = _solve_ints(g, table.ints, forced, forbidden)
    best = sum(table.ints[j * g.n + i] for j, i in enumerate(owner))
    if method == "warm":
        one, zero = _probe_warm(g, table.ints, owner, forced, forbidden)
    elif method == "resolve":
        one, zero = set(forced), set(forbidden)
        for e in g.edges:
            r = e.rank
            if r in forced or r in forbidden:
                continue
            for extra_forced, extra_forbidden, target in (((r,), (), zero), ((), (r,), one)):
                try:
                    alt = _solve_ints(g, table.ints, forced | set(extra_forced), forbidden | set(extra_forbidden))
                except Infeasible:
                    target.add(r)
                    continue
                if sum(table.ints[j * g.n + i] for j, i in enumerate(alt)) < best:
                    target.add(r)
    else:
        raise ValueError(f"unknown probe method {method!r}")
    covered = {g.edges[r - 1].item for r in one}
    return FaceReport(
        fixed_one=frozenset(one),
        fixed_zero=frozenset(zero),
        free_items=frozenset(j for j in range(g.m) if j not in covered),
        optimum=table.decode(best),
        allocation=Allocation(tuple(owner)),
    )


def count_completions(g: SlotGraph, report: FaceReport) -> int:
    """Number of feasible completions of the fixed part (ignoring fixed zeros)."""
    from math import factorial

    total = 1
    used = {}
    for r in report.fixed_one:
        e = g.edges[r - 1]
        used[(e.agent, e.category)] = used.get((e.agent, e.category), 0) + 1
    for h, items in enumerate(g.category_items):
        free = [j for j in items if j in report.free_items]
        ways = factorial(len(free))
        for i in range(g.n):
            ways //= factorial(g.capacities[h] - used.get((i, h), 0))
        total *= ways
    return total


def enumerate_optima(g: SlotGraph, costs, report: FaceReport, max_free: Optional[int] = None) -> list:
    """All optimal allocations, by brute force over the face's free items.

    Args:
        max_free: largest admissible number of free items; defaults to
            ``n (n - 1)``, the bound that holds under a valid perturbation.

    Raises:
        TooManyFreeItems: if the face leaves more free items than ``max_free``.
    """
    table = _table(costs)
    n = g.n
    limit = n * (n - 1) if max_free is None else max_free
    if len(report.free_items) > limit:
        raise TooManyFreeItems(f"{len(report.free_items)} free items exceed the bound {limit}")
    embedding = table.embedding
    target = report.optimum if embedding is None else embedding.encode(report.optimum)
    cost = table.ints
    owner = [-1] * g.m
    left = {}
    for h in range(g.k):
        for i in range(n):
            left[(i, h)] = g.capacities[h]
    base = 0
    for r in report.fixed_one:
        e = g.edges[r - 1]
        owner[e.item] = e.agent
        left[(e.agent, e.category)] -= 1
        base += cost[r - 1]
    free = sorted(report.free_items)
    cat = {e.item: e.category for e in g.edges}
    options = []
    for j in free:
        opts = [i for i in range(n) if (j * n + i + 1) not in report.fixed_zero]
        options.append(opts)
    found = []

    def rec(pos: int, acc: int):
        if pos == len(free):
            if acc == target:
                found.append(Allocation(tuple(owner)))
            return
        j = free[pos]
        h = cat[j]
        for i in options[pos]:
            if left[(i, h)] > 0:
                left[(i, h)] -= 1
                owner[j] = i
                rec(pos + 1, acc + cost[j * n + i])
                owner[j] = -1
                left[(i, h)] += 1

    rec(0, base)
    found.sort()
    return found
