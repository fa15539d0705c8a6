"""Objective of the weighted problem: K, shrunken weights, edge costs, explicit epsilon.

Edge ``e = ((i, h), j)`` of rank ``s`` has cost ``t'_i * u_i(j) + eps_s`` where
``t'_i = (1 + (K - n) t_i) / K``.  In ``lex`` mode ``eps_s`` is the symbolic
infinitesimal of rank ``s``; in ``explicit`` mode it is the rational
``(alpha / (d * theta)) ** s``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Optional, Sequence

from .exact import LEX_ZERO, LexCost, as_lex, lex_sum
from .model import Edge, Instance, SlotGraph


def compute_K(inst: Instance) -> int:
    """``n * sum_i sum_j |u_i(j)| + 1``."""
    return inst.n * sum(abs(u) for row in inst.utilities for u in row) + 1


@dataclass(frozen=True)
class WeightPoint:
    """A point ``t`` of the standard simplex and its shrunken image ``t'``.

    Coordinates are :class:`LexCost` values so that a point may sit an
    infinitesimal distance away from a rational one; ``base`` drops that part.
    """

    t: tuple
    t_prime: tuple
    K: int

    @property
    def n(self) -> int:
        return len(self.t)

    @property
    def base(self) -> tuple:
        return tuple(x.base for x in self.t)

    def is_rational(self) -> bool:
        return all(x.is_real() for x in self.t)

    def support(self) -> tuple:
        """Agents with ``t_i > 0`` (lexicographically)."""
        return tuple(i for i, x in enumerate(self.t) if x.sign() > 0)


def shrink_weights(t: Sequence, K: int, n: Optional[int] = None) -> WeightPoint:
    """Map ``t`` in the simplex to ``t'_i = (1 + (K - n) t_i) / K``.

    Raises:
        ValueError: if ``t`` is not in the simplex.
    """
    tt = tuple(as_lex(x) for x in t)
    if n is None:
        n = len(tt)
    if len(tt) != n or n < 1:
        raise ValueError(f"weight point needs {n} coordinates")
    if any(x.sign() < 0 for x in tt):
        raise ValueError("weight point has a negative coordinate")
    if lex_sum(tt) != 1:
        raise ValueError("weight point coordinates must sum to 1")
    k = Fraction(1, K)
    tp = tuple((x * (K - n) + 1) * k for x in tt)
    return WeightPoint(t=tt, t_prime=tp, K=K)


@dataclass(frozen=True)
class EpsilonSpec:
    """Explicit rational perturbation ``eps_s = (alpha / (d * theta)) ** s``."""

    alpha: Fraction
    d: int
    theta_prime: int
    theta: int

    @property
    def ratio(self) -> Fraction:
        return self.alpha / (self.d * self.theta)

    def eps(self, s: int) -> Fraction:
        if not 1 <= s <= self.d:
            raise IndexError(s)
        return self.ratio**s

    @property
    def values(self) -> tuple:
        r = self.ratio
        return tuple(r**s for s in range(1, self.d + 1))


def default_alpha(inst: Instance) -> Fraction:
    return Fraction(1, compute_K(inst) * inst.n**2 * max(inst.m, 1) + 1)


def theta_prime(n: int, m: int, k: int, cmax: int) -> int:
    """``(q+1)! ((r+1)!)^q ||C||^q`` with ``q = n - 1`` and ``r = m + n k`` rows."""
    q = n - 1
    r = m + n * k
    return factorial(q + 1) * factorial(r + 1) ** q * max(cmax, 1) ** q


def epsilon_explicit(inst: Instance, alpha: Optional[Fraction] = None) -> EpsilonSpec:
    """Rational perturbation small enough for every guarantee of the weighted problem.

    Raises:
        ValueError: if ``alpha`` is not in ``(0, 1)`` or exceeds ``1 / (K n^2 m)``.
    """
    if alpha is None:
        alpha = default_alpha(inst)
    alpha = Fraction(alpha)
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    bound = Fraction(1, compute_K(inst) * inst.n**2 * max(inst.m, 1))
    if alpha > bound:
        raise ValueError(f"alpha must be at most {bound}")
    cmax = max((abs(u) for row in inst.utilities for u in row), default=0)
    tp = theta_prime(inst.n, inst.m, inst.k, cmax)
    return EpsilonSpec(alpha=alpha, d=inst.n * inst.m, theta_prime=tp, theta=max(2, tp))


class Perturbation:
    """Source of the per-rank perturbation terms: symbolic or explicit."""

    def __init__(self, spec: Optional[EpsilonSpec] = None):
        self.spec = spec
        self._cache = spec.values if spec is not None else None

    @property
    def mode(self) -> str:
        return "lex" if self.spec is None else "explicit"

    def term(self, rank: int) -> LexCost:
        if self._cache is None:
            return LexCost._raw(Fraction(0), ((rank, Fraction(1)),))
        return LexCost._raw(self._cache[rank - 1], ())

    def signed_sum(self, signed_ranks) -> LexCost:
        return lex_sum(self.term(r) * s for r, s in signed_ranks)


LEX = Perturbation()


def make_perturbation(inst: Instance, mode: str = "lex", alpha=None) -> Perturbation:
    if mode == "lex":
        return LEX
    if mode == "explicit":
        return Perturbation(epsilon_explicit(inst, alpha))
    raise ValueError(f"unknown epsilon mode {mode!r}")


def edge_cost(inst: Instance, e: Edge, w: WeightPoint, pert: Perturbation = LEX) -> LexCost:
    return w.t_prime[e.agent] * inst.utilities[e.agent][e.item] + pert.term(e.rank)


def edge_costs(inst: Instance, g: SlotGraph, w: WeightPoint, pert: Optional[Perturbation] = LEX) -> list:
    """Costs of all edges in rank order; ``pert=None`` gives the unperturbed part."""
    out = []
    for e in g.edges:
        c = w.t_prime[e.agent] * inst.utilities[e.agent][e.item]
        out.append(c + pert.term(e.rank) if pert is not None else c + LEX_ZERO)
    return out
