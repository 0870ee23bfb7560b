"""Parameterized constrained Horn clauses over bounded integer sorts."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .terms import Expr, TRUE, Var, _lift, conj, fill_placeholders, placeholders, variables


@dataclass(frozen=True)
class Sort:
    name: str
    lo: int
    hi: int

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"sort {self.name}: empty range [{self.lo}, {self.hi}]")

    def __contains__(self, value: int) -> bool:
        return self.lo <= value <= self.hi

    def values(self) -> range:
        return range(self.lo, self.hi + 1)


SYMBOL = "symbol"
PARAMETER = "parameter"


@dataclass(frozen=True)
class Relation:
    name: str
    sorts: tuple[Sort, ...] = ()
    kind: str = SYMBOL

    def __post_init__(self):
        if self.kind not in (SYMBOL, PARAMETER):
            raise ValueError(f"relation kind must be {SYMBOL!r} or {PARAMETER!r}")

    @property
    def arity(self) -> int:
        return len(self.sorts)

    @property
    def is_parameter(self) -> bool:
        return self.kind == PARAMETER

    def __call__(self, *args) -> "Atom":
        if len(args) != self.arity:
            raise ValueError(f"{self.name} expects {self.arity} arguments, got {len(args)}")
        return Atom(self.name, tuple(_lift(a) for a in args))


@dataclass(frozen=True)
class Atom:
    rel: str
    args: tuple[Expr, ...] = ()

    def __str__(self):
        return f"{self.rel}({', '.join(map(str, self.args))})"


@dataclass(frozen=True)
class Clause:
    """``head <- body /\\ constraint``; a ``None`` head means False."""

    name: str
    head: Atom | None
    body: tuple[Atom, ...] = ()
    constraint: Expr = TRUE

    def __str__(self):
        head = "false" if self.head is None else str(self.head)
        parts = [str(a) for a in self.body]
        if self.constraint != TRUE or not parts:
            parts.append(str(self.constraint))
        return f"{self.name}: {head} :- {', '.join(parts)}"

    def variables(self) -> set[str]:
        out = variables(self.constraint)
        for a in self.atoms():
            for t in a.args:
                out |= variables(t)
        return out

    def atoms(self) -> Iterable[Atom]:
        if self.head is not None:
            yield self.head
        yield from self.body


def clause(name: str, head: Atom | None, *body: Atom | Expr | bool) -> Clause:
    """Build a clause from a head and a mix of body atoms and constraints."""
    atoms = tuple(b for b in body if isinstance(b, Atom))
    constraint = conj(*(b for b in body if not isinstance(b, Atom)))
    return Clause(name, head, atoms, constraint)


Substitution = Mapping[str, Expr]


@dataclass(frozen=True)
class ParameterizedClauseSet:
    """Relations, typed variables and clauses.

    ``variables`` maps variable names to sorts; variables that only occur
    as plain atom arguments may be left out and take the argument's sort.
    """

    relations: Mapping[str, Relation]
    clauses: tuple[Clause, ...]
    variables: Mapping[str, Sort] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "clauses", tuple(self.clauses))
        names = [c.name for c in self.clauses]
        if len(set(names)) != len(names):
            raise ValueError("clause names must be unique")
        for c in self.clauses:
            for a in c.atoms():
                rel = self.relations.get(a.rel)
                if rel is None:
                    raise ValueError(f"clause {c.name}: undeclared relation {a.rel!r}")
                if rel.arity != len(a.args):
                    raise ValueError(f"clause {c.name}: {a.rel} expects {rel.arity} "
                                     f"arguments, got {len(a.args)}")
            if c.head is not None and self.relations[c.head.rel].is_parameter:
                raise ValueError(f"clause {c.name}: parameter {c.head.rel} in a head")
            self.sort_of_variables(c)

    @classmethod
    def of(cls, relations: Iterable[Relation], clauses: Iterable[Clause],
           variables: Mapping[str, Sort] | None = None) -> "ParameterizedClauseSet":
        rels: dict[str, Relation] = {}
        for r in relations:
            if r.name in rels:
                raise ValueError(f"duplicate relation {r.name!r}")
            rels[r.name] = r
        return cls(rels, tuple(clauses), dict(variables or {}))

    @property
    def parameters(self) -> list[str]:
        return [r.name for r in self.relations.values() if r.is_parameter]

    def clause(self, name: str) -> Clause:
        for c in self.clauses:
            if c.name == name:
                return c
        raise KeyError(name)

    def sort_of_variables(self, c: Clause) -> dict[str, Sort]:
        """Sort of every variable of ``c``, declared or inferred from argument positions."""
        sorts: dict[str, Sort] = {}
        for a in c.atoms():
            rel = self.relations[a.rel]
            for t, s in zip(a.args, rel.sorts):
                if isinstance(t, Var) and t.name not in sorts:
                    sorts[t.name] = s
        for name in c.variables():
            if name in self.variables:
                sorts[name] = self.variables[name]
            elif name not in sorts:
                raise ValueError(f"clause {c.name}: cannot determine sort of {name!r}")
        return sorts

    def without(self, *names: str) -> "ParameterizedClauseSet":
        return type(self)(self.relations, tuple(c for c in self.clauses if c.name not in names),
                          self.variables)

    def restrict(self, names: Iterable[str]) -> "ParameterizedClauseSet":
        keep = set(names)
        return type(self)(self.relations, tuple(c for c in self.clauses if c.name in keep),
                          self.variables)

    def is_ground(self) -> bool:
        return not any(self.relations[a.rel].is_parameter for c in self.clauses for a in c.body)


def check_substitution(hc: ParameterizedClauseSet, m: Substitution) -> None:
    for p in hc.parameters:
        if p not in m:
            raise ValueError(f"substitution has no constraint for parameter {p!r}")
        arity = hc.relations[p].arity
        bad = [i for i in placeholders(m[p]) if i >= arity]
        if bad:
            raise ValueError(f"substitution for {p} uses v({bad[0]}) but {p} has arity {arity}")
        if variables(m[p]):
            raise ValueError(f"substitution for {p} mentions clause variables")


def instantiate(hc: ParameterizedClauseSet, m: Substitution) -> ParameterizedClauseSet:
    """Replace every parameter atom by its constraint, with ``v(i)`` bound to argument ``i``."""
    check_substitution(hc, m)
    clauses = []
    for c in hc.clauses:
        body, extra = [], []
        for a in c.body:
            if hc.relations[a.rel].is_parameter:
                extra.append(fill_placeholders(m[a.rel], a.args))
            else:
                body.append(a)
        clauses.append(Clause(c.name, c.head, tuple(body), conj(c.constraint, *extra)))
    relations = {n: r for n, r in hc.relations.items() if not r.is_parameter}
    return ParameterizedClauseSet(relations, tuple(clauses), hc.variables)
