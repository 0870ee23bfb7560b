"""SMT-LIB 2 Horn output and an adapter for external Horn solvers.

Emitted format, one item per line::

    (set-logic HORN)
    (declare-fun <rel> (<Int>*) Bool)            ; per relation, declaration order
    (assert (forall ((<var> Int)+) (=> <body> <head>)))  ; per clause, in order
    (check-sat)

Variables are listed in sorted order and the body is the conjunction of
the body atoms, the range constraints of every variable's sort and the
clause constraint. Clauses without variables drop the ``forall``. The head
is the atom or ``false``. Relation argument sorts are not encoded.
"""

from __future__ import annotations

import os
import shlex
import subprocess
import tempfile
from typing import Sequence

from .clauses import Atom, Clause, ParameterizedClauseSet
from .engine import Sat, Unknown, Unsat, Verdict
from .terms import Add, And, BoolConst, Cmp, Const, Expr, Mul, Not, Or, Sub, Var

DEFAULT_TIMEOUT = 10.0

_OPS = {"=": "=", "<": "<", "<=": "<=", ">": ">", ">=": ">="}


class ExternalSolverError(RuntimeError):
    pass


class ExternalSolverTimeout(ExternalSolverError):
    pass


def _int(n: int) -> str:
    return str(n) if n >= 0 else f"(- {-n})"


def expr_to_smt(e: Expr) -> str:
    if isinstance(e, Const):
        return _int(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, BoolConst):
        return "true" if e.value else "false"
    if isinstance(e, Add):
        return f"(+ {expr_to_smt(e.left)} {expr_to_smt(e.right)})"
    if isinstance(e, Sub):
        return f"(- {expr_to_smt(e.left)} {expr_to_smt(e.right)})"
    if isinstance(e, Mul):
        return f"(* {_int(e.coef)} {expr_to_smt(e.arg)})"
    if isinstance(e, Cmp):
        if e.op == "!=":
            return f"(not (= {expr_to_smt(e.left)} {expr_to_smt(e.right)}))"
        return f"({_OPS[e.op]} {expr_to_smt(e.left)} {expr_to_smt(e.right)})"
    if isinstance(e, Not):
        return f"(not {expr_to_smt(e.arg)})"
    if isinstance(e, And):
        return "(and " + " ".join(map(expr_to_smt, e.args)) + ")"
    if isinstance(e, Or):
        return "(or " + " ".join(map(expr_to_smt, e.args)) + ")"
    raise ValueError(f"cannot emit {e!r}")


def _atom(a: Atom) -> str:
    if not a.args:
        return a.rel
    return f"({a.rel} {' '.join(map(expr_to_smt, a.args))})"


def _clause(c: Clause, cs: ParameterizedClauseSet) -> str:
    sorts = cs.sort_of_variables(c)
    names = sorted(sorts)
    parts = [_atom(a) for a in c.body]
    for n in names:
        s = sorts[n]
        parts.append(f"(<= {_int(s.lo)} {n})")
        parts.append(f"(<= {n} {_int(s.hi)})")
    if c.constraint != BoolConst(True):
        parts.append(expr_to_smt(c.constraint))
    if not parts:
        body = "true"
    elif len(parts) == 1:
        body = parts[0]
    else:
        body = "(and " + " ".join(parts) + ")"
    head = "false" if c.head is None else _atom(c.head)
    impl = f"(=> {body} {head})"
    if names:
        binders = " ".join(f"({n} Int)" for n in names)
        impl = f"(forall ({binders}) {impl})"
    return f"(assert {impl})"


def emit_smtlib_horn(cs: ParameterizedClauseSet) -> str:
    if not cs.is_ground():
        raise ValueError("clause set still contains parameters; instantiate it first")
    lines = ["(set-logic HORN)"]
    for r in cs.relations.values():
        lines.append(f"(declare-fun {r.name} ({' '.join('Int' for _ in r.sorts)}) Bool)")
    lines.extend(_clause(c, cs) for c in cs.clauses)
    lines.append("(check-sat)")
    return "\n".join(lines) + "\n"


def parse_answer(output: str) -> Verdict:
    for line in output.splitlines():
        line = line.strip()
        if not line or line.startswith(";"):
            continue
        if line == "sat":
            return Sat(None)
        if line == "unsat":
            return Unsat(None)
        if line == "unknown":
            return Unknown(())
        raise ExternalSolverError(f"unexpected solver output: {line!r}")
    raise ExternalSolverError("solver produced no answer")


def external_solve(cs: ParameterizedClauseSet, command: str | Sequence[str],
                   timeout: float = DEFAULT_TIMEOUT) -> Verdict:
    """Run an external Horn solver on ``cs``.

    ``command`` is a template; ``{file}`` is replaced by the path of the
    emitted problem (appended when absent). Only the sat/unsat answer is
    read back, so the verdict carries no certificate.
    """
    argv = shlex.split(command) if isinstance(command, str) else list(command)
    if not argv:
        raise ExternalSolverError("empty solver command")
    fd, path = tempfile.mkstemp(suffix=".smt2")
    try:
        with os.fdopen(fd, "w") as f:
            f.write(emit_smtlib_horn(cs))
        if any("{file}" in a for a in argv):
            argv = [a.replace("{file}", path) for a in argv]
        else:
            argv.append(path)
        try:
            proc = subprocess.run(argv, capture_output=True, text=True, timeout=timeout)
        except subprocess.TimeoutExpired as e:
            raise ExternalSolverTimeout(f"solver timed out after {timeout}s") from e
        except OSError as e:
            raise ExternalSolverError(f"could not launch {argv[0]!r}: {e}") from e
        return parse_answer(proc.stdout)
    finally:
        os.unlink(path)
