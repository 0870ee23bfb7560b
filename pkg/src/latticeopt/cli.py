"""Command-line front end.

    latticeopt solve PROBLEM.json [--optimal|--maximal] [--seed N] [--budget K] [--json|--text]
    latticeopt mus PROBLEM.json [...]
    latticeopt net-repair SCENARIO.json --mode links|filters|ports [...]

Reports go to stdout, diagnostics to stderr. Exit codes: 0 complete,
2 invalid input, 3 oracle budget exhausted, 4 bound-limited (the Horn
engine overflowed its domains somewhere), 5 no solution, 1 other errors.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .chc import BoundLimited, ExternalSolverError, external_solve
from .combinators import audit_downward_closed, audit_monotone
from .problemfile import (
    Problem, ProblemError, build_problem, load_scenario_doc, net_repair_problem, read_json,
)
from .search import (
    BudgetExhausted, SearchConfig, SearchState, maximal_feasible_objects, optimal_feasible_objects,
)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_VALIDATION = 2
EXIT_BUDGET = 3
EXIT_BOUND_LIMITED = 4
EXIT_NO_SOLUTION = 5

REPORT_VERSION = 1


@dataclass
class Report:
    command: str
    kind: str
    mode: str
    seed: int
    solutions: list = field(default_factory=list)
    complete: bool = True
    budget_truncated: bool = False
    bound_limited: bool = False
    stats: dict = field(default_factory=dict)

    @property
    def exit_code(self) -> int:
        if self.budget_truncated:
            return EXIT_BUDGET
        if self.bound_limited:
            return EXIT_BOUND_LIMITED
        if not self.solutions:
            return EXIT_NO_SOLUTION
        return EXIT_OK

    def to_dict(self) -> dict:
        return {
            "version": REPORT_VERSION,
            "command": self.command,
            "kind": self.kind,
            "mode": self.mode,
            "seed": self.seed,
            "solutions": self.solutions,
            "complete": self.complete,
            "budget_truncated": self.budget_truncated,
            "bound_limited": self.bound_limited,
            "stats": self.stats,
        }


def _jsonable(x: Any) -> Any:
    if isinstance(x, (set, frozenset)):
        return sorted((_jsonable(e) for e in x), key=_canon)
    if isinstance(x, (list, tuple)):
        return [_jsonable(e) for e in x]
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (bool, int, float, str)) or x is None:
        return x
    return str(x)


def _canon(x: Any) -> str:
    return json.dumps(x, sort_keys=True)


def sort_solutions(solutions: list[dict]) -> list[dict]:
    """Score descending, ties by canonical JSON of the label."""
    out = sorted(solutions, key=lambda s: _canon(s["label"]))
    out.sort(key=lambda s: s["score"], reverse=True)
    return out


def run(problem: Problem, command: str, mode: str, config: SearchConfig) -> Report:
    l = problem.lattice
    state = SearchState(l, config)
    report = Report(command, problem.kind, mode, config.seed)
    start = time.perf_counter()
    search = optimal_feasible_objects if mode == "optimal" else maximal_feasible_objects
    try:
        nodes = search(l, l.bottom, config, state)
    except BudgetExhausted as e:
        nodes = e.partial
        report.complete = False
        report.budget_truncated = True
    wall = time.perf_counter() - start
    if mode == "optimal" and report.budget_truncated and nodes:
        best = max(l.score(n) for n in nodes)
        nodes = [n for n in nodes if l.score(n) == best]
    report.solutions = sort_solutions(
        [{"label": _jsonable(problem.describe(n)), "score": _jsonable(l.score(n))} for n in nodes])
    oracle = problem.oracle
    if oracle is not None and oracle.bound_limited:
        report.bound_limited = True
        report.complete = False
    report.stats = {
        "oracle_calls": state.stats.oracle_calls,
        "cache_hits": state.stats.cache_hits,
        "certificate_reuses": 0 if oracle is None else oracle.stats.certificate_reuses,
        "solver_calls": 0 if oracle is None else oracle.stats.solves,
        "ascent_steps": state.stats.ascent_steps,
        "pruned_by_bounds": state.stats.pruned_by_bounds,
        "pruned_by_objective": state.stats.pruned_by_objective,
        "wall_time": round(wall, 6),
    }
    return report


def render_text(report: Report) -> str:
    lines = [f"{report.command}: {report.kind}, {report.mode} elements, seed {report.seed}"]
    if report.solutions:
        width = max(len(_canon(s["score"])) for s in report.solutions)
        width = max(width, len("score"))
        lines.append(f"{'score'.rjust(width)}  label")
        for s in report.solutions:
            lines.append(f"{_canon(s['score']).rjust(width)}  {_canon(s['label'])}")
    else:
        lines.append("no solutions")
    flags = []
    if report.budget_truncated:
        flags.append("budget exhausted, result incomplete")
    if report.bound_limited:
        flags.append("bound-limited: some verdicts were Unknown and treated as infeasible")
    lines.append("status: " + ("; ".join(flags) if flags else "complete"))
    st = report.stats
    lines.append(f"{len(report.solutions)} solution(s), {st['oracle_calls']} oracle calls, "
                 f"{st['cache_hits']} cache hits, {st['certificate_reuses']} certificate reuses, "
                 f"{st['wall_time']:.3f}s")
    return "\n".join(lines)


def _oracle_options(args) -> dict:
    opts: dict[str, Any] = {"unknown_policy": args.unknown_policy}
    if args.external_solver:
        cmd, timeout = args.external_solver, args.solver_timeout
        opts["backend"] = lambda cs: external_solve(cs, cmd, timeout)
        opts["reuse"] = False
    return opts


def _config(problem: Problem, args) -> tuple[str, SearchConfig]:
    mode = args.search_mode or problem.default_mode
    seed = problem.seed if args.seed is None else args.seed
    budget = problem.max_oracle_calls if args.budget is None else args.budget
    pruning = problem.objective_pruning and not args.no_pruning
    return mode, SearchConfig(seed=seed, max_oracle_calls=budget, objective_pruning=pruning)


def _audit(problem: Problem, seed: int) -> None:
    bad = audit_downward_closed(problem.lattice, seed)
    if bad:
        raise ProblemError(f"filters are not downward-closed, e.g. between {bad[0]}")
    bad = audit_monotone(problem.lattice, seed)
    if bad:
        raise ProblemError(f"score is not monotone, e.g. between {bad[0]}")


def _load(args) -> Problem:
    opts = _oracle_options(args)
    doc = read_json(args.path)
    if args.command == "net-repair":
        if isinstance(doc, dict) and "kind" in doc:
            if doc.get("kind") != "net-repair":
                raise ProblemError(f"net-repair expects a scenario or net-repair problem, "
                                   f"got kind {doc.get('kind')!r}")
            if args.mode is not None:
                doc = {**doc, "mode": args.mode}
            return build_problem(doc, Path(args.path).parent, **opts)
        if args.mode is None:
            raise ProblemError("--mode is required with a scenario file")
        scenario = load_scenario_doc(doc)
        return net_repair_problem(scenario, args.mode, args.link, args.points, **opts)
    problem = build_problem(doc, Path(args.path).parent, **opts)
    if args.command == "mus":
        if problem.kind not in ("chc-mus", "chc-maxsat"):
            raise ProblemError(f"mus expects a clause-set problem, got kind {problem.kind!r}")
        if problem.kind == "chc-maxsat":
            mus_doc = {k: v for k, v in doc.items() if k in ("version", "clauses", "search", "description")}
            problem = build_problem({**mus_doc, "kind": "chc-mus"}, Path(args.path).parent, **opts)
        problem.default_mode = "maximal"
    return problem


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="latticeopt",
                                     description="Search optimization lattices for maximal and optimal feasible elements.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=None, help="random seed (default: file's, else 0)")
        g = p.add_mutually_exclusive_group()
        g.add_argument("--optimal", dest="search_mode", action="store_const", const="optimal")
        g.add_argument("--maximal", dest="search_mode", action="store_const", const="maximal")
        p.add_argument("--budget", type=int, default=None, metavar="K", help="oracle-call budget")
        p.add_argument("--no-pruning", action="store_true", help="disable objective pruning")
        out = p.add_mutually_exclusive_group()
        out.add_argument("--json", dest="output", action="store_const", const="json")
        out.add_argument("--text", dest="output", action="store_const", const="text")
        p.set_defaults(output="text")
        p.add_argument("--unknown-policy", choices=["infeasible", "error"], default="infeasible")
        p.add_argument("--external-solver", metavar="CMD", default=None,
                       help="Horn solver command; {file} is replaced by the problem path")
        p.add_argument("--solver-timeout", type=float, default=10.0, metavar="SECONDS")

    p = sub.add_parser("solve", help="solve a problem file")
    p.add_argument("path")
    common(p)
    p = sub.add_parser("mus", help="all minimal unsatisfiable subsets of a clause set")
    p.add_argument("path")
    common(p)
    p = sub.add_parser("net-repair", help="repair a network scenario")
    p.add_argument("path")
    p.add_argument("--mode", choices=["links", "filters", "ports"], default=None)
    p.add_argument("--link", nargs=2, metavar=("SRC", "DST"), default=None)
    p.add_argument("--points", nargs="+", type=int, default=None)
    common(p)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        problem = _load(args)
        mode, config = _config(problem, args)
        if problem.audit:
            _audit(problem, config.seed)
        report = run(problem, args.command, mode, config)
    except ProblemError as e:
        print(f"latticeopt: invalid input: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    except BoundLimited as e:
        print(f"latticeopt: bound-limited: {e}", file=sys.stderr)
        return EXIT_BOUND_LIMITED
    except ExternalSolverError as e:
        print(f"latticeopt: external solver: {e}", file=sys.stderr)
        return EXIT_ERROR
    except Exception as e:  # noqa: BLE001 - report and exit non-zero
        print(f"latticeopt: error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_ERROR
    if args.output == "json":
        print(json.dumps(report.to_dict(), indent=2, sort_keys=True))
    else:
        print(render_text(report))
    if report.budget_truncated:
        print("latticeopt: oracle budget exhausted; result is incomplete", file=sys.stderr)
    elif report.bound_limited:
        print("latticeopt: Unknown verdicts were treated as infeasible", file=sys.stderr)
    elif not report.solutions:
        print("latticeopt: no solution", file=sys.stderr)
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
