"""Search for a weight point whose optima include an envy-free allocation for every agent.

The weighted problem ``P(t)`` changes its optimum only when the cost vector
crosses a cycle hyperplane: the alternating sum of edge costs around an
elementary cycle of the slot graph becomes zero.  In weight space a cycle ``C``
gives the constraint ``sum_i w_i(C) t'_i + eps(C) = 0``, where ``w_i(C)`` is
the alternating sum of agent ``i``'s utilities along ``C`` and ``eps(C)`` the
alternating sum of the perturbation terms.

With symbolic (lex) perturbation every rational weight point has a unique
optimum, so ties only happen at points an infinitesimal distance away from a
rational point.  Those points are what :class:`WeightPoint` can hold and what
the scans below produce.

Strategies:

* ``exhaustive``: every vertex of the perturbed arrangement, sorted.
* ``pruned``: vertices of the unperturbed arrangement, and around each one the
  vertices of the local arrangement formed by the cycles that are tight there.
  Base vertices whose optimal face cannot cover every agent are skipped.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, permutations
from math import gcd
from typing import Iterator, Optional, Sequence

from .assignment import (
    CostTable,
    FaceReport,
    count_completions,
    enumerate_optima,
    probe_face,
    verify_optimality,
)
from .exact import LEX_ZERO, LexCost, as_lex
from .fairness import envy_free_agents, is_envy_free_for, reallocation_set
from .linalg import rank, solve_exact
from .model import Allocation, Instance, NormalizedInstance, SlotGraph, bundle_utility, build_slot_graph, normalize
from .perturbation import LEX, Perturbation, WeightPoint, compute_K, edge_costs, make_perturbation, shrink_weights

log = logging.getLogger(__name__)

DEFAULT_MAX_CYCLES = 10**6
FACE_ENUM_CAP = 5000  # largest base face enumerated for the coverage filter
PO_CHECK_LIMIT = 20000  # brute-force Pareto certificates up to this many allocations


class CycleLimitExceeded(RuntimeError):
    """More elementary cycles than the configured cap."""


class WitnessNotFound(RuntimeError):
    """No scanned point covered every agent (should not happen for exact modes)."""


# --- cycles -----------------------------------------------------------------


@dataclass(frozen=True)
class CycleHyperplane:
    """An elementary cycle and the hyperplane its alternating cost sum defines.

    ``cycle`` lists edge ranks in cycle order, starting at the lowest rank and
    continuing towards its lower-ranked neighbour; ``normal`` gives the sign of
    each rank (``+1`` on odd positions); ``weights[i]`` is ``w_i(C)``.
    """

    cycle: tuple
    normal: tuple
    weights: tuple

    @property
    def length(self) -> int:
        return len(self.cycle)

    def signed_ranks(self) -> tuple:
        return self.normal


def _canonical(ranks: list) -> tuple:
    L = len(ranks)
    p = ranks.index(min(ranks))
    fwd, back = ranks[(p + 1) % L], ranks[(p - 1) % L]
    step = 1 if fwd < back else -1
    return tuple(ranks[(p + step * q) % L] for q in range(L))


def _elementary_cycles(g: SlotGraph, allowed: Optional[frozenset] = None) -> Iterator[tuple]:
    """Canonical rank sequences of all elementary cycles, category by category.

    A cycle visits agents ``a_1 < a_2, ..., a_L`` (``a_1`` the smallest) and items
    ``b_1 .. b_L`` as ``a_1 b_1 a_2 b_2 ... a_L b_L a_1``; requiring
    ``b_1 < b_L`` picks one of its two directions.
    """
    n = g.n

    def ok(a, b):
        return allowed is None or (b * n + a + 1) in allowed

    for items in g.category_items:
        items = sorted(items)
        for a1 in range(n):
            agents = [a1]
            chosen = []

            def extend():
                # path a_1 b_1 ... a_p; try to close with b_p, or go on
                a_last = agents[-1]
                for b in items:
                    if b in chosen or not ok(a_last, b):
                        continue
                    chosen.append(b)
                    if len(agents) >= 2 and chosen[0] < b and ok(a1, b):
                        ranks = []
                        for q, a in enumerate(agents):
                            ranks.append(chosen[q] * n + a + 1)
                            nxt = agents[q + 1] if q + 1 < len(agents) else a1
                            ranks.append(chosen[q] * n + nxt + 1)
                        yield _canonical(ranks)
                    for a in range(a1 + 1, n):
                        if a not in agents and ok(a, b):
                            agents.append(a)
                            yield from extend()
                            agents.pop()
                    chosen.pop()

            # the first step must leave a_1 and reach a second agent
            for b in items:
                if not ok(a1, b):
                    continue
                chosen.append(b)
                for a in range(a1 + 1, n):
                    if ok(a, b):
                        agents.append(a)
                        yield from extend()
                        agents.pop()
                chosen.pop()


def _hyperplane(inst: Instance, g: SlotGraph, ranks: tuple) -> CycleHyperplane:
    w = [0] * inst.n
    normal = []
    for q, r in enumerate(ranks):
        sign = 1 if q % 2 == 0 else -1
        e = g.edges[r - 1]
        w[e.agent] += sign * inst.utilities[e.agent][e.item]
        normal.append((r, sign))
    return CycleHyperplane(cycle=ranks, normal=tuple(sorted(normal)), weights=tuple(w))


def enumerate_cycle_hyperplanes(
    g: SlotGraph,
    inst: Instance,
    max_cycles: int = DEFAULT_MAX_CYCLES,
    allowed: Optional[frozenset] = None,
) -> list:
    """Hyperplanes of all elementary cycles of ``g``, sorted by canonical cycle.

    Args:
        g: slot graph of ``inst``.
        inst: supplies the utilities behind ``w_i(C)``.
        max_cycles: cap on the number of cycles.
        allowed: if given, only cycles using these edge ranks.

    Raises:
        CycleLimitExceeded: if there are more than ``max_cycles`` cycles.
    """
    out = []
    for ranks in _elementary_cycles(g, allowed):
        out.append(_hyperplane(inst, g, ranks))
        if len(out) > max_cycles:
            raise CycleLimitExceeded(f"more than {max_cycles} elementary cycles")
    out.sort(key=lambda h: h.cycle)
    return out


# --- arrangement vertices ----------------------------------------------------


def _base_row(w: Sequence[int], n: int, K: int) -> Optional[tuple]:
    """``(a, b)`` with ``a . t = b`` equivalent to ``sum w_i t'_i = 0`` on the simplex."""
    if len(set(w)) <= 1:
        return None  # constant weights: never zero on the simplex
    a = [(K - n) * x for x in w]
    b = -sum(w)
    g = 0
    for x in a + [b]:
        g = gcd(g, x)
    a = [x // g for x in a]
    b //= g
    if next(x for x in a if x != 0) < 0:
        a, b = [-x for x in a], -b
    return tuple(a), b


def _det(m: list) -> int:
    if len(m) == 1:
        return m[0][0]
    if len(m) == 2:
        return m[0][0] * m[1][1] - m[0][1] * m[1][0]
    if len(m) == 3:
        (a, b, c), (d, e, f), (g, h, i) = m
        return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)
    return None


def _intersect(rows: list, n: int) -> Optional[tuple]:
    """Solve ``rows`` plus ``sum t = 1`` over the rationals; None if singular."""
    mat = [list(a) for a, _ in rows] + [[1] * n]
    rhs = [b for _, b in rows] + [1]
    if n <= 3:
        det = _det(mat)
        if det == 0:
            return None
        out = []
        for col in range(n):
            sub = [row[:col] + [r] + row[col + 1 :] for row, r in zip(mat, rhs)]
            out.append(Fraction(_det(sub), det))
        return tuple(out)
    sol = solve_exact(mat, rhs)
    return tuple(sol) if sol is not None else None


def _facets(n: int) -> list:
    return [(tuple(1 if c == i else 0 for c in range(n)), 0) for i in range(n)]


def arrangement_vertices(hps: Sequence[CycleHyperplane], inst: Instance, K: int) -> list:
    """Vertices of the unperturbed cycle arrangement inside the weight simplex.

    Every ``n - 1`` independent constraints among the cycle hyperplanes and the
    simplex facets ``t_i = 0`` meet in a point; those inside the simplex are
    returned as rational :class:`WeightPoint` values, deduplicated and sorted.
    """
    n = inst.n
    rows = sorted({r for r in (_base_row(h.weights, n, K) for h in hps) if r is not None})
    rows += _facets(n)
    points = set()
    for combo in combinations(rows, n - 1):
        t = _intersect(list(combo), n)
        if t is not None and all(x >= 0 for x in t):
            points.add(t)
    return [shrink_weights(t, K) for t in sorted(points)]


def _perturbed_row(h: CycleHyperplane, n: int, K: int, pert: Perturbation) -> Optional[tuple]:
    """``(a, b)`` with ``a . t = b`` equivalent to ``sum w_i t'_i + eps(C) = 0``."""
    if len(set(h.weights)) <= 1:
        return None
    a = tuple((K - n) * x for x in h.weights)
    b = -sum(h.weights) - pert.signed_sum(h.normal) * K
    return a, b


def perturbed_vertices(hps: Sequence[CycleHyperplane], inst: Instance, K: int, pert: Perturbation = LEX) -> list:
    """Vertices of the perturbed arrangement inside the simplex, sorted by ``t``."""
    n = inst.n
    rows = [r for r in (_perturbed_row(h, n, K, pert) for h in hps) if r is not None]
    rows += [(a, LEX_ZERO) for a, _ in _facets(n)]
    points = set()
    for combo in combinations(rows, n - 1):
        mat = [list(a) for a, _ in combo] + [[1] * n]
        sol = solve_exact(mat, [b for _, b in combo] + [as_lex(1)])
        if sol is not None and all(as_lex(x).sign() >= 0 for x in sol):
            points.add(tuple(as_lex(x) for x in sol))
    return [shrink_weights(t, K) for t in sorted(points)]


# --- result bundle -------------------------------------------------------------


@dataclass(frozen=True)
class ResultBundle:
    """Witness point, one envy-free optimum per agent and their certificates.

    Allocations live on the normalized instance (dummies included);
    ``realloc`` is the set of items whose owner differs between them and
    ``common`` maps every other item to its shared owner.
    """

    instance: NormalizedInstance
    t_star: WeightPoint
    per_agent: tuple
    common: dict
    realloc: frozenset
    certificates: dict
    mode: str
    epsilon: str
    stats: dict = field(default_factory=dict)
    trace: tuple = field(default=(), compare=False, repr=False)

    @property
    def heuristic(self) -> bool:
        return self.mode == "grid"


def certify(
    inst: NormalizedInstance,
    g: SlotGraph,
    table: CostTable,
    per_agent: Sequence[Allocation],
    realloc: frozenset,
    po_limit: int = PO_CHECK_LIMIT,
) -> dict:
    """Certificates for a bundle; Pareto-optimality by brute force when affordable.

    Beyond ``po_limit`` allocations, Pareto-optimality rests on optimality for
    strictly positive weights, which is checked exactly instead.
    """
    from .oracle import ParetoIndex, feasible_count

    n = inst.n
    base = inst.base or inst
    optimal = [verify_optimality(g, table, a) for a in per_agent]
    if feasible_count(base) <= po_limit:
        index = ParetoIndex(base, limit=po_limit)
        po = [index.is_pareto_optimal(a.restrict(base.m)) for a in per_agent]
        method = "bruteforce"
    else:
        po = list(optimal)
        method = "positive-weight-optimum"
    return {
        "envy_free": [is_envy_free_for(inst, a, i) for i, a in enumerate(per_agent)],
        "optimal_at_t_star": optimal,
        "pareto_optimal": po,
        "pareto_method": method,
        "realloc_size": len(realloc),
        "realloc_bound": n * (n - 1),
        "realloc_within_bound": len(realloc) <= n * (n - 1),
        "agree_outside_realloc": all(
            len({a.owner[j] for a in per_agent}) == 1 for j in range(inst.m) if j not in realloc
        ),
    }


# --- scanning -------------------------------------------------------------------


class _Scanner:
    """Shared state for one search: instance, graph, perturbation and a trace."""

    def __init__(self, inst: Instance, pert: Perturbation, max_cycles: int = DEFAULT_MAX_CYCLES):
        self.inst = inst if isinstance(inst, NormalizedInstance) else normalize(inst)
        self.g = build_slot_graph(self.inst)
        self.K = compute_K(self.inst)
        self.n = self.inst.n
        self.pert = pert
        self.max_cycles = max_cycles
        self.trace = []

    # evaluation at one (possibly perturbed) point
    def evaluate(self, w: WeightPoint):
        """Per-agent first envy-free optimum at ``w``, or None if some agent is uncovered."""
        table = CostTable(edge_costs(self.inst, self.g, w, self.pert))
        face = probe_face(self.g, table)
        self.trace.append((w, len(face.free_items)))
        optima = enumerate_optima(self.g, table, face)
        per = []
        for i in range(self.n):
            a = next((x for x in optima if is_envy_free_for(self.inst, x, i)), None)
            if a is None:
                return None
            per.append(a)
        return table, tuple(per)

    def base_face(self, t: Sequence[Fraction]):
        w = shrink_weights(t, self.K)
        table = CostTable(edge_costs(self.inst, self.g, w, pert=None))
        return probe_face(self.g, table), table

    def face_label(self, face: FaceReport, table: CostTable) -> Optional[frozenset]:
        """Agents with an envy-free allocation in the face; None if too large to list."""
        if count_completions(self.g, face) > FACE_ENUM_CAP:
            return None
        label = set()
        for a in enumerate_optima(self.g, table, face, max_free=self.g.m):
            label |= envy_free_agents(self.inst, a)
            if len(label) == self.n:
                break
        return frozenset(label)

    def local_candidates(self, v: Sequence[Fraction], face: FaceReport) -> Iterator[tuple]:
        """Vertices of the local arrangement around the rational point ``v``.

        The local arrangement is formed by the cycles of the face's free
        subgraph (they are exactly the cycles tight at ``v``) and the simplex
        facets through ``v``.  Its minimal faces are flats of a common
        dimension; one point of each is produced.
        """
        n, K = self.n, self.K
        free = frozenset(
            e.rank for e in self.g.edges if e.rank not in face.fixed_one and e.rank not in face.fixed_zero
        )
        scale = Fraction(-K, K - n) if K != n else None
        rows = {}
        if free and scale is not None:
            for h in enumerate_cycle_hyperplanes(self.g, self.inst, self.max_cycles, allowed=free):
                if len(set(h.weights)) <= 1:
                    continue
                rows.setdefault((h.weights, self.pert.signed_sum(h.normal) * scale), None)
        rows = list(rows)
        for i in range(n):
            if v[i] == 0:
                rows.append((tuple(1 if c == i else 0 for c in range(n)), LEX_ZERO))
        ones = (1,) * n
        target = rank([a for a, _ in rows] + [ones]) - 1
        units = [tuple(1 if c == j else 0 for c in range(n)) for j in range(n)]
        seen = set()
        for combo in combinations(rows, target):
            mat = [a for a, _ in combo] + [ones]
            if rank(mat) != target + 1:
                continue
            for u in units:
                if len(mat) == n:
                    break
                if rank(mat + [u]) == len(mat) + 1:
                    mat.append(u)
            rhs = [b for _, b in combo] + [LEX_ZERO] * (n - len(combo))
            delta = solve_exact(mat, rhs)
            p = tuple(as_lex(x) + y for x, y in zip(delta, v))
            if p in seen or any(x.sign() < 0 for x in p):
                continue
            seen.add(p)
            yield p

    def local_search(self, v: Sequence[Fraction], use_filter: bool = True):
        """Witness near the rational point ``v``; None if there is none there."""
        face, table = self.base_face(v)
        if use_filter:
            label = self.face_label(face, table)
            if label is not None and len(label) < self.n:
                return None
        for p in self.local_candidates(v, face):
            w = shrink_weights(p, self.K)
            found = self.evaluate(w)
            if found is not None:
                return w, found
        return None

    def bundle(self, w: WeightPoint, found, mode: str, stats: dict) -> ResultBundle:
        table, per = found
        realloc = reallocation_set(per)
        common = {j: per[0].owner[j] for j in range(self.inst.m) if j not in realloc}
        stats = dict(stats)
        stats["points_evaluated"] = len(self.trace)
        stats["max_free_items"] = max((c for _, c in self.trace), default=0)
        return ResultBundle(
            instance=self.inst,
            t_star=w,
            per_agent=per,
            common=common,
            realloc=realloc,
            certificates=certify(self.inst, self.g, table, per, realloc),
            mode=mode,
            epsilon=self.pert.mode,
            stats=stats,
            trace=tuple(self.trace),
        )


def _scan_chunk(args):
    """Worker: local search over a chunk of base vertices, in order."""
    inst, mode, alpha, max_cycles, chunk = args
    sc = _Scanner(inst, make_perturbation(inst, mode, alpha), max_cycles)
    for idx, v in chunk:
        found = sc.local_search(v)
        if found is not None:
            return idx, found[0].t, sc.trace
    return None, None, sc.trace


def find_witness(
    inst: Instance,
    epsilon: str = "lex",
    alpha=None,
    strategy: str = "pruned",
    max_cycles: int = DEFAULT_MAX_CYCLES,
    workers: int = 1,
) -> ResultBundle:
    """Scan arrangement vertices in order until every agent is covered.

    Args:
        inst: the instance (normalized internally).
        epsilon: ``"lex"`` or ``"explicit"``.
        alpha: explicit-mode scale; defaults to the largest safe value.
        strategy: ``"pruned"`` or ``"exhaustive"``.
        max_cycles: cap on elementary cycles.
        workers: processes for the pruned scan; the result does not depend on it.

    Raises:
        WitnessNotFound: if no scanned point covers every agent.
        CycleLimitExceeded: if the cycle cap is hit.
    """
    norm = inst if isinstance(inst, NormalizedInstance) else normalize(inst)
    pert = make_perturbation(norm, epsilon, alpha)
    sc = _Scanner(norm, pert, max_cycles)
    hps = enumerate_cycle_hyperplanes(sc.g, norm, max_cycles)
    stats = {"strategy": strategy, "cycles": len(hps)}
    if strategy == "exhaustive":
        points = perturbed_vertices(hps, norm, sc.K, pert)
        stats["vertices"] = len(points)
        for w in points:
            found = sc.evaluate(w)
            if found is not None:
                return sc.bundle(w, found, "arrangement", stats)
        raise WitnessNotFound(f"none of {len(points)} perturbed vertices covers every agent")
    if strategy != "pruned":
        raise ValueError(f"unknown strategy {strategy!r}")

    base = [w.base for w in arrangement_vertices(hps, norm, sc.K)]
    stats["base_vertices"] = len(base)
    if workers > 1 and len(base) > 1:
        size = max(1, -(-len(base) // (4 * workers)))
        chunks = [list(enumerate(base))[s : s + size] for s in range(0, len(base), size)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for idx, t, trace in pool.map(_scan_chunk, [(norm, epsilon, alpha, max_cycles, c) for c in chunks]):
                sc.trace.extend(trace)
                if idx is not None:
                    w = shrink_weights(t, sc.K)
                    found = sc.evaluate(w)
                    sc.trace.pop()
                    return sc.bundle(w, found, "arrangement", stats)
    else:
        for v in base:
            found = sc.local_search(v)
            if found is not None:
                return sc.bundle(found[0], found[1], "arrangement", stats)
    raise WitnessNotFound(f"no witness near any of {len(base)} base vertices")


def two_agent_sweep(inst: Instance, epsilon: str = "lex", alpha=None, max_cycles: int = DEFAULT_MAX_CYCLES) -> ResultBundle:
    """Two agents: scan the sorted breakpoints of ``t_1`` from 0 to 1.

    Raises:
        ValueError: if the instance does not have exactly two agents.
        WitnessNotFound: if no breakpoint covers both agents.
    """
    if inst.n != 2:
        raise ValueError("two_agent_sweep needs exactly two agents")
    norm = inst if isinstance(inst, NormalizedInstance) else normalize(inst)
    pert = make_perturbation(norm, epsilon, alpha)
    sc = _Scanner(norm, pert, max_cycles)
    K = sc.K
    hps = enumerate_cycle_hyperplanes(sc.g, norm, max_cycles)
    cuts = {as_lex(0), as_lex(1)}
    for h in hps:
        w1, w2 = h.weights
        if w1 == w2:
            continue
        t1 = (pert.signed_sum(h.normal) * (-K) - (w1 + w2) - (K - 2) * w2) / ((K - 2) * (w1 - w2))
        if t1.sign() >= 0 and (as_lex(1) - t1).sign() >= 0:
            cuts.add(t1)
    for t1 in sorted(cuts):
        w = shrink_weights((t1, as_lex(1) - t1), K)
        found = sc.evaluate(w)
        if found is not None:
            return sc.bundle(w, found, "sweep2", {"strategy": "sweep", "cycles": len(hps), "breakpoints": len(cuts)})
    raise WitnessNotFound(f"none of {len(cuts)} breakpoints covers both agents")


def derive_ef11(inst: Instance, bundle: ResultBundle) -> Allocation:
    """Pick the EF[1,1] allocation among the two per-agent optima (two agents).

    Args:
        inst: the instance the bundle was computed for.
        bundle: a witness bundle with ``|R| <= 2``.

    Returns:
        An allocation of the normalized instance that is Pareto-optimal and
        envy-free up to one chore and one good.

    Raises:
        ValueError: if there are not two agents or the reallocation set is too large.
    """
    if inst.n != 2 or len(bundle.per_agent) != 2:
        raise ValueError("derive_ef11 needs exactly two agents")
    if len(bundle.realloc) > 2:
        raise ValueError("reallocation set has more than two items")
    a1, a2 = bundle.per_agent
    if a1 == a2:
        return a1
    norm = bundle.instance
    commons = [set(a1.bundle(i)) - bundle.realloc for i in range(2)]
    if bundle_utility(norm, 0, commons[0]) >= bundle_utility(norm, 0, commons[1]):
        return a2
    return a1


# --- grid heuristic --------------------------------------------------------------


def _to_t(y: tuple, D: int) -> tuple:
    """Cumulative coordinates ``0 <= y_0 <= ... <= D`` to a simplex point."""
    cuts = (0,) + y + (D,)
    return tuple(Fraction(cuts[c + 1] - cuts[c], D) for c in range(len(cuts) - 1))


def _grid_cells(points: set, dim: int) -> list:
    """Kuhn simplices all of whose corners are in ``points``."""
    cells = set()
    for y in sorted(points):
        for perm in permutations(range(dim)):
            verts = [y]
            cur = list(y)
            for c in perm:
                cur[c] += 1
                verts.append(tuple(cur))
            if all(v in points for v in verts):
                cells.add(tuple(sorted(verts)))
    return sorted(cells)


def grid_refinement_search(
    inst: Instance,
    depth: int = 4,
    epsilon: str = "lex",
    alpha=None,
    max_cycles: int = DEFAULT_MAX_CYCLES,
) -> Optional[ResultBundle]:
    """Heuristic: label a dyadic grid and refine cells whose labels cover all agents.

    A grid point's label is the set of agents having an envy-free allocation
    in its unperturbed optimal face.  Points with a full label are searched
    locally for a perturbed witness.  Returns None when nothing is found
    after ``depth`` refinements; finding nothing proves nothing.
    """
    norm = inst if isinstance(inst, NormalizedInstance) else normalize(inst)
    sc = _Scanner(norm, make_perturbation(norm, epsilon, alpha), max_cycles)
    n = sc.n
    dim = n - 1
    all_agents = frozenset(range(n))
    labels = {}

    def visit(t):
        if t in labels:
            return None
        face, table = sc.base_face(t)
        label = sc.face_label(face, table)
        labels[t] = all_agents if label is None else label
        if labels[t] == all_agents:
            return sc.local_search(t, use_filter=False)
        return None

    D = 1
    points = {y for y in _all_grid(dim, D)}
    for level in range(depth + 1):
        for y in sorted(points):
            found = visit(_to_t(y, D))
            if found is not None:
                stats = {"strategy": "grid", "depth": level, "grid_points": len(labels), "heuristic": True}
                return sc.bundle(found[0], found[1], "grid", stats)
        if level == depth:
            break
        keep = [
            c for c in _grid_cells(points, dim)
            if frozenset().union(*(labels[_to_t(y, D)] for y in c)) == all_agents
        ]
        if dim == 0 or not keep:
            break
        points = {tuple(p + q for p, q in zip(a, b)) for c in keep for a in c for b in c}
        D *= 2
    return None


def _all_grid(dim: int, D: int) -> list:
    """Every nondecreasing ``dim``-tuple with entries in ``0..D``."""
    out = [()]
    for _ in range(dim):
        out = [y + (x,) for y in out for x in range(y[-1] if y else 0, D + 1)]
    return out
