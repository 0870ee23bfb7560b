"""JSON problem files: schema validation, the label expression grammar and problem builders.

A problem file is a JSON object with ``"version": 1`` and a ``kind``:

* ``powerset-opt``: a (possibly inverted) powerset lattice, a score
  expression and filter expressions over the node's label set;
* ``chc-maxsat`` / ``chc-mus``: a clause set, plus weights and hard clauses
  for MaxCHC;
* ``net-repair``: a network scenario (inline or a path) and a repair mode.

Expressions are JSON trees: integers and booleans are literals, strings are
variables and lists are ``[operator, arg...]``. Over label sets the extra
operators are ``sum``, ``card``, ``in``, ``exists`` and ``forall``;
quantifiers bind a variable ranging over the label set.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any, Callable

import jsonschema
from referencing import Registry, Resource

from .chc import FALSE, TRUE, Atom, Clause, ParameterizedClauseSet, Relation, Sort, Var, conj, disj
from .chc.problems import HornProblem, maxchc, mus_problem
from .chc.terms import Const, Expr, Not
from .combinators import OptLattice, opt
from .lattices import inverted, powerset
from .netrepair import (
    FILTERS, LINKS, PORTS, Scenario, filter_problem, link_disable_problem, port_interval_problem,
)

PROBLEM_SCHEMA = "problem-v1.json"
SCENARIO_SCHEMA = "scenario-v1.json"

DEFAULT_MODES = {
    "powerset-opt": "optimal",
    "chc-maxsat": "maximal",
    "chc-mus": "maximal",
    LINKS: "maximal",
    FILTERS: "optimal",
    PORTS: "maximal",
}


class ProblemError(ValueError):
    """The problem file is malformed or inconsistent."""


def load_schema(name: str) -> dict:
    return json.loads(resources.files("latticeopt.schema").joinpath(name).read_text())


def _validator(name: str):
    problem, scenario = load_schema(PROBLEM_SCHEMA), load_schema(SCENARIO_SCHEMA)
    registry = Registry().with_resources([
        (problem["$id"], Resource.from_contents(problem)),
        (scenario["$id"], Resource.from_contents(scenario)),
        (SCENARIO_SCHEMA, Resource.from_contents(scenario)),
    ])
    schema = problem if name == PROBLEM_SCHEMA else scenario
    return jsonschema.Draft202012Validator(schema, registry=registry)


def validate(doc: Any, schema: str = PROBLEM_SCHEMA) -> None:
    errors = sorted(_validator(schema).iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        e = errors[0]
        where = "/".join(map(str, e.absolute_path)) or "<root>"
        raise ProblemError(f"{where}: {e.message}")


def read_json(path: str | Path) -> Any:
    try:
        with open(path) as f:
            return json.load(f)
    except OSError as e:
        raise ProblemError(f"cannot read {path}: {e.strerror}") from e
    except json.JSONDecodeError as e:
        raise ProblemError(f"{path}: invalid JSON ({e})") from e


# label expressions

_ARITH = {"+", "-", "*"}
_CMP = {"=": lambda a, b: a == b, "!=": lambda a, b: a != b, "<": lambda a, b: a < b,
        "<=": lambda a, b: a <= b, ">": lambda a, b: a > b, ">=": lambda a, b: a >= b}


def compile_label_expr(tree: Any, bound: tuple[str, ...] = ()) -> Callable[[frozenset, dict], Any]:
    """Compile ``tree`` to ``f(label_set, env)``."""
    if isinstance(tree, bool) or isinstance(tree, int):
        return lambda s, env: tree
    if isinstance(tree, str):
        if tree not in bound:
            raise ProblemError(f"unbound variable {tree!r}")
        return lambda s, env: env[tree]
    if not isinstance(tree, list) or not tree or not isinstance(tree[0], str):
        raise ProblemError(f"bad expression {tree!r}")
    op, args = tree[0], tree[1:]

    def arity(n):
        if len(args) != n:
            raise ProblemError(f"{op!r} takes {n} argument(s), got {len(args)}")

    if op == "lit":
        arity(1)
        value = args[0]
        return lambda s, env: value
    if op == "sum":
        arity(0)
        return lambda s, env: sum(s)
    if op == "card":
        arity(0)
        return lambda s, env: len(s)
    if op == "in":
        arity(1)
        x = compile_label_expr(args[0], bound)
        return lambda s, env: x(s, env) in s
    if op in ("exists", "forall"):
        arity(2)
        name = args[0]
        if not isinstance(name, str):
            raise ProblemError(f"{op!r} needs a variable name")
        body = compile_label_expr(args[1], bound + (name,))
        agg = any if op == "exists" else all
        return lambda s, env: agg(body(s, {**env, name: e}) for e in s)
    subs = [compile_label_expr(a, bound) for a in args]
    if op == "+":
        return lambda s, env: sum(f(s, env) for f in subs)
    if op == "*":
        def product(s, env):
            out = 1
            for f in subs:
                out *= f(s, env)
            return out
        return product
    if op == "-":
        if len(subs) == 1:
            return lambda s, env: -subs[0](s, env)
        arity(2)
        return lambda s, env: subs[0](s, env) - subs[1](s, env)
    if op in _CMP:
        arity(2)
        cmp = _CMP[op]
        return lambda s, env: cmp(subs[0](s, env), subs[1](s, env))
    if op == "and":
        return lambda s, env: all(f(s, env) for f in subs)
    if op == "or":
        return lambda s, env: any(f(s, env) for f in subs)
    if op == "not":
        arity(1)
        return lambda s, env: not subs[0](s, env)
    raise ProblemError(f"unknown operator {op!r}")


def label_function(tree: Any) -> Callable[[frozenset], Any]:
    f = compile_label_expr(tree)
    return lambda s: f(s, {})


# clause sets

def constraint_from_json(tree: Any) -> Expr:
    """Terms and constraints of the clause format, as engine expressions."""
    if isinstance(tree, bool):
        return TRUE if tree else FALSE
    if isinstance(tree, int):
        return Const(tree)
    if isinstance(tree, str):
        return Var(tree)
    if not isinstance(tree, list) or not tree or not isinstance(tree[0], str):
        raise ProblemError(f"bad constraint {tree!r}")
    op, args = tree[0], [constraint_from_json(a) for a in tree[1:]]
    if op == "+" and args:
        out = args[0]
        for a in args[1:]:
            out = out + a
        return out
    if op == "-" and len(args) == 1:
        return -args[0]
    if op == "-" and len(args) == 2:
        return args[0] - args[1]
    if op == "*" and len(args) == 2:
        k, e = tree[1], args[1]
        if isinstance(k, bool) or not isinstance(k, int):
            raise ProblemError("'*' needs an integer constant as its first argument")
        return k * e
    if op in ("=", "!=", "<", "<=", ">", ">=") and len(args) == 2:
        a, b = args
        return {"=": a.eq, "!=": a.ne, "<": a.__lt__, "<=": a.__le__,
                ">": a.__gt__, ">=": a.__ge__}[op](b)
    if op == "and":
        return conj(*args)
    if op == "or":
        return disj(*args)
    if op == "not" and len(args) == 1:
        return Not(args[0])
    raise ProblemError(f"bad constraint operator {op!r} with {len(args)} argument(s)")


def clauses_from_json(doc: dict) -> ParameterizedClauseSet:
    sorts = {}
    for name, (lo, hi) in doc["sorts"].items():
        if lo > hi:
            raise ProblemError(f"sort {name}: empty range [{lo}, {hi}]")
        sorts[name] = Sort(name, lo, hi)

    def sort(name, where):
        if name not in sorts:
            raise ProblemError(f"{where}: undeclared sort {name!r}")
        return sorts[name]

    relations = [Relation(r, tuple(sort(s, f"relation {r}") for s in ss))
                 for r, ss in doc["relations"].items()]
    variables = {v: sort(s, f"variable {v}") for v, s in doc.get("variables", {}).items()}

    def atom(a):
        return Atom(a[0], tuple(constraint_from_json(t) for t in a[1:]))

    clauses = []
    for c in doc["clauses"]:
        head = None if c["head"] is None else atom(c["head"])
        body = tuple(atom(a) for a in c.get("body", []))
        clauses.append(Clause(c["name"], head, body, constraint_from_json(c.get("constraint", True))))
    try:
        return ParameterizedClauseSet.of(relations, clauses, variables)
    except ValueError as e:
        raise ProblemError(str(e)) from e


# problems

@dataclass
class Problem:
    """A loaded problem ready to search."""

    kind: str
    lattice: OptLattice
    default_mode: str
    seed: int = 0
    max_oracle_calls: int | None = None
    objective_pruning: bool = True
    horn: HornProblem | None = None
    audit: bool = False

    def describe(self, node) -> Any:
        if self.horn is not None:
            return self.horn.describe(node)
        return canonical_label(self.lattice.label(node))

    @property
    def oracle(self):
        return None if self.horn is None else self.horn.oracle


def canonical_label(label: Any) -> Any:
    if isinstance(label, (set, frozenset)):
        return sorted(label, key=lambda e: (type(e).__name__, e))
    return label


def _with_search(p: Problem, doc: dict) -> Problem:
    s = doc.get("search", {})
    p.seed = s.get("seed", 0)
    p.max_oracle_calls = s.get("max_oracle_calls")
    p.objective_pruning = s.get("objective_pruning", True)
    p.default_mode = s.get("mode", p.default_mode)
    return p


def _powerset_problem(doc: dict) -> Problem:
    spec = doc["lattice"]
    if "range" in spec:
        lo, hi = spec["range"]
        elements = list(range(lo, hi + 1))
    else:
        elements = spec["elements"]
    lat = powerset(elements)
    if spec["family"] == "inverted-powerset":
        lat = inverted(lat)
    l = opt(lat).with_score(label_function(doc.get("score", ["card"])))
    for f in doc.get("filters", []):
        l = l.filter(label_function(f))
    return Problem("powerset-opt", l, DEFAULT_MODES["powerset-opt"], audit=doc.get("audit", False))


def _horn_options(options: dict) -> dict:
    return {k: v for k, v in options.items() if v is not None}


def _chc_problem(doc: dict, **oracle_options) -> Problem:
    hc = clauses_from_json(doc["clauses"])
    if doc["kind"] == "chc-mus":
        hp = mus_problem(hc, **_horn_options(oracle_options))
    else:
        try:
            hp = maxchc(hc, doc.get("weights"), doc.get("hard", ()), **_horn_options(oracle_options))
        except ValueError as e:
            raise ProblemError(str(e)) from e
    return Problem(doc["kind"], hp.lattice, DEFAULT_MODES[doc["kind"]], horn=hp)


def load_scenario_doc(doc: Any) -> Scenario:
    validate(doc, SCENARIO_SCHEMA)
    try:
        return Scenario.from_dict(doc)
    except (ValueError, KeyError) as e:
        raise ProblemError(f"scenario: {e}") from e


def net_repair_problem(scenario: Scenario, mode: str, link=None, points=None,
                       **oracle_options) -> Problem:
    opts = _horn_options(oracle_options)
    try:
        if mode == LINKS:
            hp = link_disable_problem(scenario, **opts)
        elif mode == FILTERS:
            hp = filter_problem(scenario, link, **opts)
        elif mode == PORTS:
            hp = port_interval_problem(scenario, link, points, **opts)
        else:
            raise ProblemError(f"unknown repair mode {mode!r}")
    except (KeyError, ValueError) as e:
        if isinstance(e, ProblemError):
            raise
        raise ProblemError(f"scenario: {e}") from e
    return Problem("net-repair", hp.lattice, DEFAULT_MODES[mode], horn=hp)


def build_problem(doc: dict, base_dir: str | Path = ".", **oracle_options) -> Problem:
    """Validate ``doc`` and build its problem; relative scenario paths resolve against ``base_dir``."""
    validate(doc)
    kind = doc["kind"]
    if kind == "powerset-opt":
        p = _powerset_problem(doc)
    elif kind in ("chc-maxsat", "chc-mus"):
        p = _chc_problem(doc, **oracle_options)
    else:
        sc = doc["scenario"]
        if isinstance(sc, str):
            sc = read_json(Path(base_dir) / sc)
        scenario = load_scenario_doc(sc)
        p = net_repair_problem(scenario, doc["mode"], doc.get("link"), doc.get("points"),
                               **oracle_options)
    return _with_search(p, doc)


def load_problem(path: str | Path, **oracle_options) -> Problem:
    return build_problem(read_json(path), Path(path).parent, **oracle_options)
