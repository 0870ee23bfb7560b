"""MaxCHC and MUS as lattice optimization problems over clause flags."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Mapping

from ..combinators import OptLattice, opt
from ..lattices import inverted, powerset
from ..search import SearchConfig, SearchState, maximal_feasible_objects, optimal_feasible_objects
from .clauses import PARAMETER, Atom, Clause, ParameterizedClauseSet, Relation
from .oracle import HornOracle, clause_sat_lattice, clause_unsat_lattice
from .terms import FALSE, TRUE


@dataclass
class HornProblem:
    """An optimization lattice together with the oracle that backs it."""

    lattice: OptLattice
    oracle: HornOracle
    render: Callable[[Any], Any] | None = None

    def describe(self, node) -> Any:
        """A JSON-friendly view of ``node`` (its label unless ``render`` is set)."""
        if self.render is not None:
            return self.render(node)
        label = self.lattice.label(node)
        return sorted(label) if isinstance(label, (set, frozenset)) else label

    def maximal(self, config: SearchConfig | None = None,
                state: SearchState | None = None) -> list:
        return maximal_feasible_objects(self.lattice, self.lattice.bottom, config, state)

    def optimal(self, config: SearchConfig | None = None,
                state: SearchState | None = None) -> list:
        return optimal_feasible_objects(self.lattice, self.lattice.bottom, config, state)


def flag_name(clause_name: str) -> str:
    return f"flag[{clause_name}]"


def flagged(hc: ParameterizedClauseSet, names: list[str]) -> ParameterizedClauseSet:
    """Add a nullary parameter to the body of each named clause."""
    if hc.parameters:
        raise ValueError("flagging expects a clause set without parameters")
    relations = dict(hc.relations)
    for n in names:
        relations[flag_name(n)] = Relation(flag_name(n), (), PARAMETER)
    wanted = set(names)
    clauses = tuple(
        Clause(c.name, c.head, c.body + (Atom(flag_name(c.name)),), c.constraint)
        if c.name in wanted else c
        for c in hc.clauses)
    return ParameterizedClauseSet(relations, clauses, hc.variables)


def set2map(names: list[str], enabled) -> dict:
    return {flag_name(n): TRUE if n in enabled else FALSE for n in names}


def maxchc(hc: ParameterizedClauseSet, weights: Mapping[str, int] | None = None,
           hard=(), **oracle_options) -> HornProblem:
    """Weighted partial MaxCHC over the clauses of ``hc``.

    Nodes are sets of enabled soft clauses, scored by their total weight
    (1 per clause by default). Hard clauses are always present; if they are
    unsatisfiable on their own the bottom is infeasible and no solution exists.
    """
    names = [c.name for c in hc.clauses]
    hard = set(hard)
    unknown = hard - set(names)
    if unknown:
        raise ValueError(f"unknown hard clauses {sorted(unknown)}")
    soft = [n for n in names if n not in hard]
    weights = dict(weights or {})
    for n, w in weights.items():
        if n not in names:
            raise ValueError(f"weight for unknown clause {n!r}")
        if w < 0:
            raise ValueError(f"negative weight for clause {n!r}")
    w = {n: weights.get(n, 1) for n in soft}
    base = (opt(powerset(soft))
            .with_score(lambda s: sum(w[n] for n in s))
            .map(lambda s: set2map(soft, s)))
    sat = clause_sat_lattice(base, flagged(hc, soft), **oracle_options)
    labelled = sat.map(lambda m: frozenset(n for n in soft if m[flag_name(n)] == TRUE))
    return HornProblem(labelled, sat.oracle)


def mus_problem(hc: ParameterizedClauseSet, **oracle_options) -> HornProblem:
    """Inverted powerset over the clauses, feasible when the chosen subset is unsatisfiable.

    The maximal feasible nodes are exactly the minimal unsatisfiable subsets.
    """
    names = [c.name for c in hc.clauses]
    base = (opt(inverted(powerset(names)))
            .with_score(lambda s: -len(s))
            .map(lambda s: set2map(names, s)))
    unsat = clause_unsat_lattice(base, flagged(hc, names), **oracle_options)
    labelled = unsat.map(lambda m: frozenset(n for n in names if m[flag_name(n)] == TRUE))
    return HornProblem(labelled, unsat.oracle)


def mus(hc: ParameterizedClauseSet, config: SearchConfig | None = None,
        **oracle_options) -> list[frozenset]:
    """All minimal unsatisfiable subsets of ``hc`` (empty if ``hc`` is satisfiable)."""
    p = mus_problem(hc, **oracle_options)
    return [p.lattice.label(n) for n in p.maximal(config)]
