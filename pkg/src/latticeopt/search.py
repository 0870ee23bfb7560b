"""Enumeration of maximal and optimal feasible nodes.

Three ingredients drive the search:

* greedy ascent from a feasible node to a maximal feasible one, probing
  covers in a seeded random order;
* a work-set of start candidates, refined with
  :meth:`Lattice.covering_differences` after each new maximal node so that
  no candidate sits below a node already found;
* a store of known-infeasible nodes (kept as an antichain) that prunes
  everything above them without asking the oracle.

All randomness comes from ``random.Random(config.seed)``, so a given seed
reproduces both the results and the oracle-call sequence.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Any

from .combinators import OptLattice
from .lattices import Node


class ContractViolation(ValueError):
    """A precondition of a search operation does not hold."""


class BudgetExhausted(RuntimeError):
    """The oracle-call budget ran out; ``partial`` holds what was found."""

    def __init__(self, partial: list[Node], state: "SearchState"):
        super().__init__(f"oracle budget exhausted after {state.stats.oracle_calls} calls "
                         f"({len(partial)} nodes found, result incomplete)")
        self.partial = partial
        self.state = state
        self.complete = False


@dataclass
class SearchConfig:
    seed: int = 0
    max_oracle_calls: int | None = None
    objective_pruning: bool = True


@dataclass
class SearchStats:
    oracle_calls: int = 0
    cache_hits: int = 0
    ascent_steps: int = 0
    pruned_by_bounds: int = 0
    pruned_by_objective: int = 0


@dataclass
class SearchState:
    lattice: OptLattice
    config: SearchConfig = field(default_factory=SearchConfig)
    maximals: list = field(default_factory=list)
    infeasible_bounds: list = field(default_factory=list)
    stats: SearchStats = field(default_factory=SearchStats)

    def __post_init__(self):
        self.rng = random.Random(self.config.seed)
        self._memo: dict[Node, bool] = {}

    def feasible(self, n: Node) -> bool:
        """Memoized, budgeted feasibility query."""
        if n in self._memo:
            self.stats.cache_hits += 1
            return self._memo[n]
        budget = self.config.max_oracle_calls
        if budget is not None and self.stats.oracle_calls >= budget:
            raise BudgetExhausted(list(self.maximals), self)
        self.stats.oracle_calls += 1
        value = bool(self.lattice.is_feasible(n))
        self._memo[n] = value
        if not value:
            record_infeasible(self, n)
        return value


def is_pruned(state: SearchState, n: Node) -> bool:
    leq = state.lattice.leq
    return any(leq(b, n) for b in state.infeasible_bounds)


def record_infeasible(state: SearchState, n: Node) -> None:
    leq = state.lattice.leq
    bounds = state.infeasible_bounds
    if any(leq(b, n) for b in bounds):
        return
    state.infeasible_bounds = [b for b in bounds if not leq(n, b)]
    state.infeasible_bounds.append(n)


def _state_for(l: OptLattice, state: SearchState | None, config: SearchConfig | None) -> SearchState:
    if state is not None:
        return state
    return SearchState(l, config or SearchConfig())


def greedy_ascend(l: OptLattice, start: Node, state: SearchState | None = None,
                  config: SearchConfig | None = None) -> Node:
    """Walk upward from the feasible ``start`` until every cover is infeasible."""
    state = _state_for(l, state, config)
    l.lattice.check(start)
    if not state.feasible(start):
        raise ContractViolation(f"ascent must start from a feasible node, got {start!r}")
    current = start
    while True:
        succ = list(l.successors(current))
        state.rng.shuffle(succ)
        for s in succ:
            if is_pruned(state, s):
                state.stats.pruned_by_bounds += 1
                continue
            if state.feasible(s):
                current = s
                state.stats.ascent_steps += 1
                break
        else:
            return current


def _minimal(l: OptLattice, xs: list[Node]) -> list[Node]:
    out: list[Node] = []
    for x in dict.fromkeys(xs):
        if any(l.leq(y, x) for y in out):
            continue
        out = [y for y in out if not l.leq(x, y)]
        out.append(x)
    return out


def _enumerate(l: OptLattice, lower_bound: Node, state: SearchState, optimal: bool) -> list[Node]:
    l.lattice.check(lower_bound)
    if not state.feasible(lower_bound):
        return []
    prune = optimal and state.config.objective_pruning
    best: Any = None
    work = [lower_bound]
    while work:
        c = work.pop()
        if is_pruned(state, c):
            state.stats.pruned_by_bounds += 1
            continue
        if prune and best is not None:
            cap = l.upper_region(c, lambda s: is_pruned(state, s))
            if l.score(cap) < best:
                state.stats.pruned_by_objective += 1
                continue
        if not state.feasible(c):
            continue
        m = greedy_ascend(l, c, state)
        state.maximals.append(m)
        score = l.score(m)
        if best is None or score > best:
            best = score
        refined = []
        for w in work:
            refined.extend(l.covering_differences(w, m))
        refined.extend(d for d in l.covering_differences(c, m))
        work = [w for w in _minimal(l, refined) if not is_pruned(state, w)]
    return list(state.maximals)


def maximal_feasible_objects(l: OptLattice, lower_bound: Node | None = None,
                             config: SearchConfig | None = None,
                             state: SearchState | None = None) -> list[Node]:
    """All maximal feasible nodes above ``lower_bound`` (default: bottom).

    Returns an empty list when ``lower_bound`` itself is infeasible.
    """
    state = _state_for(l, state, config)
    if lower_bound is None:
        lower_bound = l.bottom
    return _enumerate(l, lower_bound, state, optimal=False)


def optimal_feasible_objects(l: OptLattice, lower_bound: Node | None = None,
                             config: SearchConfig | None = None,
                             state: SearchState | None = None) -> list[Node]:
    """Maximal feasible nodes above ``lower_bound`` that attain the best score."""
    state = _state_for(l, state, config)
    if lower_bound is None:
        lower_bound = l.bottom
    found = _enumerate(l, lower_bound, state, optimal=True)
    if not found:
        return []
    best = max(l.score(m) for m in found)
    return [m for m in found if l.score(m) == best]
