"""Ready-made problem instances used by the tests, the CLI and the README."""

from __future__ import annotations

from .chc import Clause, ParameterizedClauseSet, Relation, Sort, Var, clause
from .combinators import OptLattice, opt
from .lattices import powerset


def squares_lattice(n: int = 16) -> OptLattice:
    """Subsets of ``0..n`` free of any pair ``x, x*x``, scored by element sum."""
    return (opt(powerset(range(n + 1)))
            .with_score(sum)
            .filter(lambda s: not any(x * x in s for x in s)))


def counter_clauses(value_hi: int = 8, bound_lo: int = 1, bound_hi: int = 4) -> ParameterizedClauseSet:
    """Four clauses over ``I(x, y, n)`` that together are unsatisfiable.

    ``c0`` starts the counter at (0, 0), ``c1`` and ``c2`` step ``y`` by one
    while ``x`` grows by one or two, and ``c3`` rejects ``x >= 2n``.
    """
    val = Sort("Val", 0, value_hi)
    bound = Sort("Bound", bound_lo, bound_hi)
    inv = Relation("I", (val, val, bound))
    x, y, n = Var("x"), Var("y"), Var("n")
    clauses: list[Clause] = [
        clause("c0", inv(0, 0, n), n > 0),
        clause("c1", inv(x + 1, y + 1, n), inv(x, y, n), y < n),
        clause("c2", inv(x + 2, y + 1, n), inv(x, y, n), y < n),
        clause("c3", None, inv(x, y, n), x >= 2 * n),
    ]
    return ParameterizedClauseSet.of([inv], clauses, {"x": val, "y": val, "n": bound})
