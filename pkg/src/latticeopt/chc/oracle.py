"""Feasibility oracles backed by the Horn engine, with certificate reuse.

:func:`clause_sat_lattice` marks a node feasible when the clause set
instantiated with the node's substitution is satisfiable;
:func:`clause_unsat_lattice` is the dual. Both memoize per substitution and
try stored models and counterexamples before running the engine.
"""

from __future__ import annotations

import threading
from collections import deque
from dataclasses import dataclass
from typing import Iterable

from ..combinators import OptLattice
from .clauses import ParameterizedClauseSet, Substitution, instantiate
from .engine import Derivation, Sat, Unknown, Unsat, Verdict, check_counterexample, check_model, solve

MAX_CERTIFICATES = 64

INFEASIBLE = "infeasible"
ERROR = "error"


class BoundLimited(RuntimeError):
    """The engine left its declared domains and the policy says to stop."""


class CertificateStore:
    """Most-recently-useful models and counterexamples, at most ``capacity`` each."""

    def __init__(self, capacity: int = MAX_CERTIFICATES):
        self.models: deque = deque(maxlen=capacity)
        self.counterexamples: deque[Derivation] = deque(maxlen=capacity)
        self._lock = threading.Lock()

    def add_model(self, model) -> None:
        with self._lock:
            self.models.appendleft(model)

    def add_counterexample(self, cex: Derivation) -> None:
        with self._lock:
            self.counterexamples.appendleft(cex)

    @staticmethod
    def _touch(items: deque, item) -> None:
        try:
            items.remove(item)
        except ValueError:
            return
        items.appendleft(item)

    def find_model(self, cs: ParameterizedClauseSet):
        for m in list(self.models):
            if check_model(m, cs):
                with self._lock:
                    self._touch(self.models, m)
                return m
        return None

    def find_counterexample(self, cs: ParameterizedClauseSet) -> Derivation | None:
        for d in list(self.counterexamples):
            if check_counterexample(d, cs):
                with self._lock:
                    self._touch(self.counterexamples, d)
                return d
        return None


@dataclass
class OracleStats:
    queries: int = 0
    memo_hits: int = 0
    solves: int = 0
    model_reuses: int = 0
    counterexample_reuses: int = 0
    unknowns: int = 0

    @property
    def certificate_reuses(self) -> int:
        return self.model_reuses + self.counterexample_reuses


def _key(m: Substitution):
    return frozenset(m.items())


class HornOracle:
    """Answers "is HC[m] satisfiable?" for substitutions ``m``."""

    def __init__(self, hc: ParameterizedClauseSet, params: Iterable[str] | None = None,
                 unknown_policy: str = INFEASIBLE, store: CertificateStore | None = None,
                 reuse: bool = True, solve_budget: int | None = None, backend=None):
        params = set(hc.parameters if params is None else params)
        declared = set(hc.parameters)
        if params != declared:
            raise ValueError(f"parameters {sorted(params)} do not match the clause set's "
                             f"{sorted(declared)}")
        for c in hc.clauses:
            if c.head is not None and c.head.rel in params:
                raise ValueError(f"clause {c.name}: parameter {c.head.rel} in a head")
        if unknown_policy not in (INFEASIBLE, ERROR):
            raise ValueError(f"unknown_policy must be {INFEASIBLE!r} or {ERROR!r}")
        self.hc = hc
        self.params = params
        self.unknown_policy = unknown_policy
        self.store = store if store is not None else CertificateStore()
        self.reuse = reuse
        self.solve_budget = solve_budget
        # backend(cs) -> Verdict replaces the built-in engine (e.g. an external solver);
        # its verdicts carry no certificates, so nothing is stored for reuse.
        self.backend = backend
        self.stats = OracleStats()
        self.bound_limited = False
        self._memo: dict = {}

    def verdict(self, m: Substitution) -> Verdict:
        """Sat/Unsat/Unknown for ``HC[m]``; reused certificates come back as verdicts."""
        cs = instantiate(self.hc, m)
        if self.reuse:
            cex = self.store.find_counterexample(cs)
            if cex is not None:
                self.stats.counterexample_reuses += 1
                return Unsat(cex)
            model = self.store.find_model(cs)
            if model is not None:
                self.stats.model_reuses += 1
                return Sat(model)
        self.stats.solves += 1
        if self.backend is not None:
            return self.backend(cs)
        v = solve(cs, self.solve_budget)
        if isinstance(v, Sat):
            self.store.add_model(v.model)
        elif isinstance(v, Unsat):
            self.store.add_counterexample(v.derivation)
        return v

    def is_sat(self, m: Substitution) -> bool | None:
        """True/False, or None for an Unknown verdict under the infeasible policy."""
        self.stats.queries += 1
        key = _key(m)
        if key in self._memo:
            self.stats.memo_hits += 1
            return self._memo[key]
        v = self.verdict(m)
        if isinstance(v, Unknown):
            self.stats.unknowns += 1
            self.bound_limited = True
            if self.unknown_policy == ERROR:
                raise BoundLimited(f"engine overflow, e.g. {v.overflow[:3]}")
            result = None
        else:
            result = isinstance(v, Sat)
        self._memo.setdefault(key, result)
        return result


class ClauseLattice(OptLattice):
    """An optimization lattice whose feasibility comes from a :class:`HornOracle`."""

    oracle: HornOracle


def _clause_lattice(base: OptLattice, oracle: HornOracle, want_sat: bool) -> ClauseLattice:
    label, feasible = base.label, base.is_feasible

    def is_feasible(n):
        if not feasible(n):
            return False
        answer = oracle.is_sat(label(n))
        if answer is None:
            return False
        return answer if want_sat else not answer

    out = ClauseLattice(base.lattice, label=base._label, score=base._score, feasible=is_feasible)
    out.oracle = oracle
    return out


def clause_sat_lattice(base: OptLattice, hc: ParameterizedClauseSet,
                       params: Iterable[str] | None = None, **oracle_options) -> ClauseLattice:
    """Nodes are feasible when ``hc`` instantiated with their label is satisfiable.

    Labels of ``base`` must be substitutions for ``params``. Unknown verdicts
    count as infeasible and set ``oracle.bound_limited`` unless
    ``unknown_policy="error"``.
    """
    return _clause_lattice(base, HornOracle(hc, params, **oracle_options), want_sat=True)


def clause_unsat_lattice(base: OptLattice, hc: ParameterizedClauseSet,
                         params: Iterable[str] | None = None, **oracle_options) -> ClauseLattice:
    """Nodes are feasible when ``hc`` instantiated with their label is unsatisfiable."""
    return _clause_lattice(base, HornOracle(hc, params, **oracle_options), want_sat=False)
