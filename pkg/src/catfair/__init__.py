"""Fair allocation of goods and chores under category constraints.

Finds Pareto-optimal allocations that are envy-free up to reallocating at
most ``n (n - 1)`` items, by scanning weight points of a perturbed weighted
utilitarian program.
"""

from .exact import LexCost, format_rational, parse_rational
from .fairness import envy_graph, is_ef1, is_ef11, is_envy_free_for, reallocation_set
from .model import Allocation, Instance, NormalizedInstance, build_slot_graph, load_instance, normalize
from .search import (
    ResultBundle,
    derive_ef11,
    find_witness,
    grid_refinement_search,
    two_agent_sweep,
)

__all__ = [
    "Allocation",
    "Instance",
    "LexCost",
    "NormalizedInstance",
    "ResultBundle",
    "build_slot_graph",
    "derive_ef11",
    "envy_graph",
    "find_witness",
    "format_rational",
    "grid_refinement_search",
    "is_ef1",
    "is_ef11",
    "is_envy_free_for",
    "load_instance",
    "normalize",
    "parse_rational",
    "reallocation_set",
    "two_agent_sweep",
]
