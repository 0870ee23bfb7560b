"""Bounded least-fixpoint engine for ground clause sets.

Facts are saturated breadth-first with semi-naive evaluation, so the first
derivation recorded for a fact has minimal depth. Variables range over
their sorts; a head fact whose arguments leave the relation's sorts is an
overflow and makes a Sat answer inconclusive (:class:`Unknown`).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Mapping

from .clauses import Clause, ParameterizedClauseSet
from .terms import Const, FALSE, Var, compile_expr, variables

Fact = tuple[str, tuple[int, ...]]
Model = Mapping[str, frozenset]


class SolveBudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class Derivation:
    """One step of a derivation tree; ``fact`` is None for the False root."""

    clause: str
    fact: Fact | None
    assignment: tuple[tuple[str, int], ...]
    children: tuple["Derivation", ...] = ()

    def depth(self) -> int:
        return 1 + max((c.depth() for c in self.children), default=0)

    def steps(self) -> Iterator["Derivation"]:
        yield self
        for c in self.children:
            yield from c.steps()


@dataclass(frozen=True)
class Sat:
    model: Model | None

    is_sat = True
    is_unsat = False


@dataclass(frozen=True)
class Unsat:
    derivation: Derivation | None

    is_sat = False
    is_unsat = True


@dataclass(frozen=True)
class Unknown:
    overflow: tuple[Fact, ...]

    is_sat = False
    is_unsat = False


Verdict = Sat | Unsat | Unknown


class _CompiledClause:
    """Matching plan for one clause.

    Body atoms bind plain variables left to right; any argument that is a
    compound expression is checked once its variables are bound. Variables
    still unbound after the body are enumerated over their sorts.
    """

    def __init__(self, c: Clause, cs: ParameterizedClauseSet):
        self.clause = c
        self.sorts = cs.sort_of_variables(c)
        self.never = c.constraint == FALSE
        self.constraint = compile_expr(c.constraint)
        bound: set[str] = set()
        late = []
        self.body = []
        for a in c.body:
            plan = []
            pending = []
            for i, t in enumerate(a.args):
                if isinstance(t, Var):
                    plan.append(("bind" if t.name not in bound else "same", i, t.name))
                    bound.add(t.name)
                elif isinstance(t, Const):
                    plan.append(("const", i, t.value))
                else:
                    pending.append((i, t))
            checks = []
            for i, t in pending:
                if variables(t) <= bound:
                    checks.append((i, compile_expr(t)))
                else:
                    late.append((len(self.body), i, t))
            self.body.append((a.rel, plan, checks))
        self.late = [(j, i, compile_expr(t)) for j, i, t in late]
        self.free = sorted(c.variables() - bound)
        self.free_domains = [self.sorts[n].values() for n in self.free]
        if c.head is None:
            self.head = None
        else:
            rel = cs.relations[c.head.rel]
            self.head = (rel.name, [compile_expr(t) for t in c.head.args], rel.sorts)

    def matches(self, sources: list[Mapping[tuple, object]]) -> Iterator[tuple[dict, tuple]]:
        """Yield (env, body facts) for body instantiations drawn from ``sources``."""
        if self.never:
            return
        sorts = self.sorts
        n = len(self.body)

        def rec(j: int, env: dict, facts: tuple):
            if j == n:
                yield from self._finish(env, facts)
                return
            rel, plan, checks = self.body[j]
            for tup in sources[j]:
                ok = True
                new = dict(env)
                for kind, i, x in plan:
                    val = tup[i]
                    if kind == "bind":
                        if val not in sorts[x]:
                            ok = False
                            break
                        new[x] = val
                    elif kind == "same":
                        if new[x] != val:
                            ok = False
                            break
                    elif val != x:
                        ok = False
                        break
                if ok:
                    for i, f in checks:
                        if f(new) != tup[i]:
                            ok = False
                            break
                if ok:
                    yield from rec(j + 1, new, facts + ((rel, tup),))

        yield from rec(0, {}, ())

    def _finish(self, env: dict, facts: tuple) -> Iterator[tuple[dict, tuple]]:
        if not self.free:
            envs = [env]
        else:
            envs = (dict(env, **dict(zip(self.free, vals)))
                    for vals in itertools.product(*self.free_domains))
        for e in envs:
            if any(f(e) != facts[j][1][i] for j, i, f in self.late):
                continue
            if self.constraint(e):
                yield e, facts

    def head_fact(self, env: dict) -> tuple[Fact | None, bool]:
        """Head fact under ``env`` and whether it lies inside the relation's sorts."""
        if self.head is None:
            return None, True
        name, args, rel_sorts = self.head
        tup = tuple(f(env) for f in args)
        return (name, tup), all(v in s for v, s in zip(tup, rel_sorts))


def _compile(cs: ParameterizedClauseSet) -> list[_CompiledClause]:
    if not cs.is_ground():
        raise ValueError("clause set still contains parameters; instantiate it first")
    return [_CompiledClause(c, cs) for c in cs.clauses]


def _assignment(env: dict) -> tuple[tuple[str, int], ...]:
    return tuple(sorted(env.items()))


def solve(cs: ParameterizedClauseSet, budget: int | None = None) -> Verdict:
    """Decide a ground clause set over its bounded sorts.

    ``budget`` caps the number of body instantiations examined.
    """
    plans = _compile(cs)
    facts: dict[str, dict[tuple, None]] = {r: {} for r in cs.relations}
    origin: dict[Fact, Derivation] = {}
    overflow: list[Fact] = []
    work = 0

    def derivation(plan: _CompiledClause, fact, env: dict, body: tuple) -> Derivation:
        children = tuple(origin[b] for b in body)
        return Derivation(plan.clause.name, fact, _assignment(env), children)

    delta: dict[str, dict[tuple, None]] = {r: {} for r in cs.relations}
    first = True
    while True:
        new: dict[str, dict[tuple, None]] = {r: {} for r in cs.relations}
        for plan in plans:
            k = len(plan.body)
            if k == 0:
                if not first:
                    continue
                rounds = [[]]
            else:
                rounds = []
                for i in range(k):
                    src = []
                    for j, (rel, _, _) in enumerate(plan.body):
                        if j < i:
                            src.append([t for t in facts[rel] if t not in delta[rel]])
                        elif j == i:
                            src.append(list(delta[rel]))
                        else:
                            src.append(list(facts[rel]))
                    if all(src):
                        rounds.append(src)
            for src in rounds:
                for env, body in plan.matches(src):
                    work += 1
                    if budget is not None and work > budget:
                        raise SolveBudgetExceeded(f"budget of {budget} instantiations exhausted")
                    fact, inside = plan.head_fact(env)
                    if fact is None:
                        return Unsat(derivation(plan, None, env, body))
                    if not inside:
                        overflow.append(fact)
                        continue
                    rel, tup = fact
                    if tup in facts[rel] or tup in new[rel]:
                        continue
                    new[rel][tup] = None
                    origin[fact] = derivation(plan, fact, env, body)
        first = False
        if not any(new.values()):
            break
        for rel, tups in new.items():
            facts[rel].update(tups)
        delta = new
    if overflow:
        return Unknown(tuple(dict.fromkeys(overflow)))
    return Sat({r: frozenset(t) for r, t in facts.items()})


def check_model(model: Model, cs: ParameterizedClauseSet) -> bool:
    """True iff ``model`` is closed under every clause of ``cs`` within the sorts."""
    plans = _compile(cs)
    lookup = {r: frozenset(model.get(r, ())) for r in cs.relations}
    for plan in plans:
        sources = [list(lookup[rel]) for rel, _, _ in plan.body]
        for env, _ in plan.matches(sources):
            fact, inside = plan.head_fact(env)
            if fact is None or not inside or fact[1] not in lookup[fact[0]]:
                return False
    return True


def check_counterexample(cex: Derivation | None, cs: ParameterizedClauseSet) -> bool:
    """Replay a derivation of False against ``cs``."""
    if cex is None:
        return False
    if not isinstance(cex, Derivation):
        raise TypeError(f"not a derivation: {cex!r}")
    if cex.fact is not None:
        return False
    by_name = {c.name: c for c in cs.clauses}
    return _replay(cex, cs, by_name)


def _replay(d: Derivation, cs: ParameterizedClauseSet, by_name: dict[str, Clause]) -> bool:
    if not isinstance(d, Derivation):
        raise TypeError(f"malformed derivation node: {d!r}")
    c = by_name.get(d.clause)
    if c is None:
        return False
    if any(cs.relations[a.rel].is_parameter for a in c.body):
        raise ValueError("clause set still contains parameters; instantiate it first")
    env = dict(d.assignment)
    sorts = cs.sort_of_variables(c)
    for name, sort in sorts.items():
        if name not in env or env[name] not in sort:
            return False
    if len(d.children) != len(c.body):
        return False
    for atom, child in zip(c.body, d.children):
        if not isinstance(child, Derivation):
            raise TypeError(f"malformed derivation node: {child!r}")
        expect = (atom.rel, tuple(compile_expr(t)(env) for t in atom.args))
        if child.fact != expect:
            return False
    if not compile_expr(c.constraint)(env):
        return False
    if c.head is None:
        if d.fact is not None:
            return False
    else:
        rel = cs.relations[c.head.rel]
        tup = tuple(compile_expr(t)(env) for t in c.head.args)
        if d.fact != (rel.name, tup) or not all(v in s for v, s in zip(tup, rel.sorts)):
            return False
    return all(_replay(ch, cs, by_name) for ch in d.children)
