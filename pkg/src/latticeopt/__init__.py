"""Optimization over finite labeled lattices, with Horn-clause and network-repair front ends."""

from .combinators import (
    CachedOptLattice, OptLattice, audit_downward_closed, audit_monotone, cached, flat_map, opt,
)
from .lattices import (
    ForeignNodeError, Interval, IntervalLattice, InvertedLattice, Lattice, PowerSetLattice,
    ProductLattice, covering_differences, interval_lattice, inverted, powerset, product,
)
from .search import (
    BudgetExhausted, ContractViolation, SearchConfig, SearchState, SearchStats, greedy_ascend,
    is_pruned, maximal_feasible_objects, optimal_feasible_objects, record_infeasible,
)

__version__ = "0.1.0"

__all__ = [
    "CachedOptLattice", "OptLattice", "audit_downward_closed", "audit_monotone", "cached",
    "flat_map", "opt", "ForeignNodeError", "Interval", "IntervalLattice", "InvertedLattice",
    "Lattice", "PowerSetLattice", "ProductLattice", "covering_differences", "interval_lattice",
    "inverted", "powerset", "product", "BudgetExhausted", "ContractViolation", "SearchConfig",
    "SearchState", "SearchStats", "greedy_ascend", "is_pruned", "maximal_feasible_objects",
    "optimal_feasible_objects", "record_infeasible",
]
