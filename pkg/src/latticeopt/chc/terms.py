"""Integer constraint expressions.

Arithmetic uses the Python operators (``x + 1``, ``2 * n``, ``x >= y``);
equality is spelled ``a.eq(b)`` / ``a.ne(b)`` because ``==`` keeps its
structural meaning. ``&``, ``|`` and ``~`` build conjunctions,
disjunctions and negations. ``v(i)`` is the placeholder for the ``i``-th
argument of a parameter inside a substitution body.
"""

from __future__ import annotations

import operator
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Union

Env = Mapping[str, int]


def _lift(x: "ExprLike") -> "Expr":
    if isinstance(x, Expr):
        return x
    if isinstance(x, bool):
        return TRUE if x else FALSE
    if isinstance(x, int):
        return Const(x)
    if isinstance(x, str):
        return Var(x)
    raise TypeError(f"cannot use {x!r} in a constraint")


class Expr:
    __slots__ = ()

    def __add__(self, other):
        return Add(self, _lift(other))

    def __radd__(self, other):
        return Add(_lift(other), self)

    def __sub__(self, other):
        return Sub(self, _lift(other))

    def __rsub__(self, other):
        return Sub(_lift(other), self)

    def __mul__(self, other):
        if not isinstance(other, int):
            raise TypeError("only multiplication by integer constants is supported")
        return Mul(other, self)

    __rmul__ = __mul__

    def __neg__(self):
        return Mul(-1, self)

    def __lt__(self, other):
        return Cmp("<", self, _lift(other))

    def __le__(self, other):
        return Cmp("<=", self, _lift(other))

    def __gt__(self, other):
        return Cmp(">", self, _lift(other))

    def __ge__(self, other):
        return Cmp(">=", self, _lift(other))

    def eq(self, other):
        return Cmp("=", self, _lift(other))

    def ne(self, other):
        return Cmp("!=", self, _lift(other))

    def __and__(self, other):
        return conj(self, _lift(other))

    def __or__(self, other):
        return disj(self, _lift(other))

    def __invert__(self):
        return Not(self)


@dataclass(frozen=True, eq=True)
class Const(Expr):
    value: int

    def __str__(self):
        return str(self.value)


@dataclass(frozen=True, eq=True)
class Var(Expr):
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True, eq=True)
class Placeholder(Expr):
    index: int

    def __str__(self):
        return f"v({self.index})"


@dataclass(frozen=True, eq=True)
class Add(Expr):
    left: Expr
    right: Expr

    def __str__(self):
        return f"({self.left} + {self.right})"


@dataclass(frozen=True, eq=True)
class Sub(Expr):
    left: Expr
    right: Expr

    def __str__(self):
        return f"({self.left} - {self.right})"


@dataclass(frozen=True, eq=True)
class Mul(Expr):
    coef: int
    arg: Expr

    def __str__(self):
        return f"{self.coef}*{self.arg}"


CMP_OPS: dict[str, Callable[[int, int], bool]] = {
    "=": operator.eq, "!=": operator.ne, "<": operator.lt,
    "<=": operator.le, ">": operator.gt, ">=": operator.ge,
}


@dataclass(frozen=True, eq=True)
class Cmp(Expr):
    op: str
    left: Expr
    right: Expr

    def __post_init__(self):
        if self.op not in CMP_OPS:
            raise ValueError(f"unknown comparison {self.op!r}")

    def __str__(self):
        return f"{self.left} {self.op} {self.right}"


@dataclass(frozen=True, eq=True)
class And(Expr):
    args: tuple

    def __str__(self):
        return "(" + " & ".join(map(str, self.args)) + ")"


@dataclass(frozen=True, eq=True)
class Or(Expr):
    args: tuple

    def __str__(self):
        return "(" + " | ".join(map(str, self.args)) + ")"


@dataclass(frozen=True, eq=True)
class Not(Expr):
    arg: Expr

    def __str__(self):
        return f"!{self.arg}"


@dataclass(frozen=True, eq=True)
class BoolConst(Expr):
    value: bool

    def __str__(self):
        return "true" if self.value else "false"


TRUE = BoolConst(True)
FALSE = BoolConst(False)

ExprLike = Union[Expr, int, str, bool]


def v(i: int) -> Placeholder:
    return Placeholder(i)


def conj(*args: ExprLike) -> Expr:
    """Flattened conjunction; drops ``true`` and collapses on ``false``."""
    out = []
    for a in map(_lift, args):
        parts = a.args if isinstance(a, And) else (a,)
        for p in parts:
            if p == FALSE:
                return FALSE
            if p != TRUE:
                out.append(p)
    if not out:
        return TRUE
    return out[0] if len(out) == 1 else And(tuple(out))


def disj(*args: ExprLike) -> Expr:
    """Flattened disjunction; drops ``false`` and collapses on ``true``."""
    out = []
    for a in map(_lift, args):
        parts = a.args if isinstance(a, Or) else (a,)
        for p in parts:
            if p == TRUE:
                return TRUE
            if p != FALSE:
                out.append(p)
    if not out:
        return FALSE
    return out[0] if len(out) == 1 else Or(tuple(out))


def variables(e: Expr) -> set[str]:
    out: set[str] = set()
    _collect(e, out, Var)
    return out


def placeholders(e: Expr) -> set[int]:
    out: set[int] = set()
    _collect(e, out, Placeholder)
    return out


def _collect(e: Expr, out: set, kind: type) -> None:
    if isinstance(e, kind):
        out.add(e.name if kind is Var else e.index)
    elif isinstance(e, (Add, Sub, Cmp)):
        _collect(e.left, out, kind)
        _collect(e.right, out, kind)
    elif isinstance(e, Mul):
        _collect(e.arg, out, kind)
    elif isinstance(e, Not):
        _collect(e.arg, out, kind)
    elif isinstance(e, (And, Or)):
        for a in e.args:
            _collect(a, out, kind)


def transform(e: Expr, leaf: Callable[[Expr], Expr | None]) -> Expr:
    """Rebuild ``e`` bottom-up, replacing leaves for which ``leaf`` returns an Expr."""
    if isinstance(e, (Var, Placeholder, Const, BoolConst)):
        r = leaf(e)
        return e if r is None else r
    if isinstance(e, Add):
        return Add(transform(e.left, leaf), transform(e.right, leaf))
    if isinstance(e, Sub):
        return Sub(transform(e.left, leaf), transform(e.right, leaf))
    if isinstance(e, Mul):
        return Mul(e.coef, transform(e.arg, leaf))
    if isinstance(e, Cmp):
        return Cmp(e.op, transform(e.left, leaf), transform(e.right, leaf))
    if isinstance(e, Not):
        return Not(transform(e.arg, leaf))
    if isinstance(e, And):
        return conj(*(transform(a, leaf) for a in e.args))
    if isinstance(e, Or):
        return disj(*(transform(a, leaf) for a in e.args))
    raise TypeError(f"not an expression: {e!r}")


def fill_placeholders(e: Expr, args: Iterable[Expr]) -> Expr:
    args = tuple(args)

    def leaf(x):
        if isinstance(x, Placeholder):
            if x.index >= len(args):
                raise ValueError(f"v({x.index}) used with only {len(args)} arguments")
            return args[x.index]
        return None

    return transform(e, leaf)


def compile_expr(e: Expr) -> Callable[[Env], int | bool]:
    """Turn ``e`` into a closure over a variable environment."""
    if isinstance(e, Const):
        c = e.value
        return lambda env: c
    if isinstance(e, BoolConst):
        b = e.value
        return lambda env: b
    if isinstance(e, Var):
        name = e.name
        return lambda env: env[name]
    if isinstance(e, Placeholder):
        raise ValueError(f"unfilled placeholder {e}")
    if isinstance(e, Add):
        f, g = compile_expr(e.left), compile_expr(e.right)
        return lambda env: f(env) + g(env)
    if isinstance(e, Sub):
        f, g = compile_expr(e.left), compile_expr(e.right)
        return lambda env: f(env) - g(env)
    if isinstance(e, Mul):
        k, f = e.coef, compile_expr(e.arg)
        return lambda env: k * f(env)
    if isinstance(e, Cmp):
        op, f, g = CMP_OPS[e.op], compile_expr(e.left), compile_expr(e.right)
        return lambda env: op(f(env), g(env))
    if isinstance(e, Not):
        f = compile_expr(e.arg)
        return lambda env: not f(env)
    if isinstance(e, And):
        fs = [compile_expr(a) for a in e.args]
        return lambda env: all(f(env) for f in fs)
    if isinstance(e, Or):
        fs = [compile_expr(a) for a in e.args]
        return lambda env: any(f(env) for f in fs)
    raise TypeError(f"not an expression: {e!r}")


def evaluate(e: Expr, env: Env) -> int | bool:
    return compile_expr(e)(env)
