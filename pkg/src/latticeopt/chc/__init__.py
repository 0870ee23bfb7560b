"""Parameterized constrained Horn clauses and Horn-backed optimization lattices."""

from .clauses import (
    PARAMETER, SYMBOL, Atom, Clause, ParameterizedClauseSet, Relation, Sort, Substitution,
    clause, instantiate,
)
from .engine import (
    Derivation, Sat, SolveBudgetExceeded, Unknown, Unsat, Verdict, check_counterexample,
    check_model, solve,
)
from .oracle import (
    BoundLimited, CertificateStore, ClauseLattice, HornOracle, clause_sat_lattice,
    clause_unsat_lattice,
)
from .problems import HornProblem, flag_name, maxchc, mus, mus_problem, set2map
from .smtlib import ExternalSolverError, ExternalSolverTimeout, emit_smtlib_horn, external_solve
from .terms import FALSE, TRUE, Const, Var, conj, disj, v

__all__ = [
    "PARAMETER", "SYMBOL", "Atom", "Clause", "ParameterizedClauseSet", "Relation", "Sort",
    "Substitution", "clause", "instantiate", "Derivation", "Sat", "SolveBudgetExceeded",
    "Unknown", "Unsat", "Verdict", "check_counterexample", "check_model", "solve",
    "BoundLimited", "CertificateStore", "ClauseLattice", "HornOracle", "clause_sat_lattice",
    "clause_unsat_lattice", "HornProblem", "flag_name", "maxchc", "mus", "mus_problem",
    "set2map", "ExternalSolverError", "ExternalSolverTimeout", "emit_smtlib_horn",
    "external_solve", "FALSE", "TRUE", "Const", "Var", "conj", "disj", "v",
]
