import itertools
import random

import pytest

from latticeopt.catalog import counter_clauses
from latticeopt.chc import (
    PARAMETER, TRUE, Atom, Clause, Derivation, ParameterizedClauseSet, Relation, Sat, Sort,
    SolveBudgetExceeded, Unknown, Unsat, Var, check_counterexample, check_model, clause,
    instantiate, solve, v,
)
from latticeopt.chc.problems import flag_name, flagged, set2map
from latticeopt.chc.terms import Cmp, Const, Or, evaluate, fill_placeholders

import oracles

NAMES = ["c0", "c1", "c2", "c3"]


def flags_cs():
    return flagged(counter_clauses(), NAMES)


def subset_instance(enabled):
    return instantiate(flags_cs(), set2map(NAMES, enabled))


# terms and clauses

def test_expression_building_and_evaluation():
    x, y = Var("x"), Var("y")
    e = (x + 2 * y - 1 >= 3) & ~(x.eq(y))
    assert evaluate(e, {"x": 2, "y": 1})
    assert not evaluate(e, {"x": 1, "y": 1})
    assert evaluate((x < 0) | (y > 0), {"x": 1, "y": 1})


def test_fill_placeholders_example():
    sub = (v(0).eq(1)) | (v(0).eq(2))
    filled = fill_placeholders(sub, (Var("dst"),))
    assert isinstance(filled, Or)
    assert filled.args == (Cmp("=", Var("dst"), Const(1)), Cmp("=", Var("dst"), Const(2)))


def test_instantiate_all_true_erases_flags():
    cs = subset_instance(NAMES)
    assert cs.is_ground()
    orig = counter_clauses()
    for a, b in zip(cs.clauses, orig.clauses):
        assert a.name == b.name and a.head == b.head and a.body == b.body
        assert evaluate(a.constraint, {"x": 0, "y": 0, "n": 1}) == \
            evaluate(b.constraint, {"x": 0, "y": 0, "n": 1})


def test_instantiate_false_flag_blocks_clause():
    cs = subset_instance(["c0", "c1", "c2"])
    c3 = cs.clause("c3")
    assert all(not evaluate(c3.constraint, {"x": x, "y": 0, "n": n})
               for x in range(9) for n in range(1, 5))


def test_instantiate_errors():
    hc = flags_cs()
    with pytest.raises(ValueError):
        instantiate(hc, {flag_name("c0"): TRUE})
    d = Sort("D", 0, 3)
    p = Relation("f", (d,), PARAMETER)
    r = Relation("R", (d,))
    x = Var("x")
    hc2 = ParameterizedClauseSet.of([p, r], [clause("k", r(x), p(x))])
    with pytest.raises(ValueError):
        instantiate(hc2, {"f": v(1).eq(0)})


def test_parameter_in_head_rejected():
    d = Sort("D", 0, 3)
    p = Relation("f", (d,), PARAMETER)
    with pytest.raises(ValueError):
        ParameterizedClauseSet.of([p], [clause("bad", p(Var("x")))])


def test_arity_checked():
    d = Sort("D", 0, 3)
    r = Relation("R", (d, d))
    with pytest.raises(ValueError):
        ParameterizedClauseSet.of([r], [Clause("bad", Atom("R", (Const(1),)), (), TRUE)])


# engine

def test_counter_clauses_unsat_with_short_witness():
    verdict = solve(counter_clauses())
    assert isinstance(verdict, Unsat)
    d = verdict.derivation
    assert d.depth() == 3
    steps = [(s.clause, s.fact) for s in d.steps()]
    assert steps == [("c3", None), ("c2", ("I", (2, 1, 1))), ("c0", ("I", (0, 0, 1)))]
    assert check_counterexample(d, counter_clauses())


def test_counter_clause_subsets():
    base = counter_clauses()
    assert isinstance(solve(base.without("c3")), Sat)
    assert isinstance(solve(base.without("c1")), Unsat)
    assert isinstance(solve(base.without("c0")), Sat)
    assert isinstance(solve(base.without("c2")), Sat)


def test_all_sixteen_subsets_match_naive_oracle():
    for r in range(5):
        for enabled in itertools.combinations(NAMES, r):
            cs = subset_instance(enabled)
            got = solve(cs)
            assert oracles.verdict_name(got) == oracles.naive_verdict(cs) != "unknown", enabled


def test_counterexample_checks():
    d = solve(counter_clauses()).derivation
    assert check_counterexample(d, counter_clauses())
    assert not check_counterexample(d, counter_clauses().without("c2"))
    assert not check_counterexample(None, counter_clauses())
    with pytest.raises(TypeError):
        check_counterexample(Derivation("c3", None, (("n", 1), ("x", 2), ("y", 1)), ("junk",)),
                             counter_clauses())


def test_model_checks():
    base = counter_clauses()
    no_facts = base.without("c0")
    assert check_model({}, no_facts)
    assert not check_model({}, base.restrict(["c0"]))
    sub = base.restrict(["c0", "c1", "c3"])
    verdict = solve(sub)
    assert isinstance(verdict, Sat)
    assert check_model(verdict.model, sub)
    assert verdict.model["I"] == {(k, k, n) for n in range(1, 5) for k in range(n + 1)}


def test_empty_and_false_clause_sets():
    empty = ParameterizedClauseSet.of([], [])
    assert isinstance(solve(empty), Sat)
    f = ParameterizedClauseSet.of([], [clause("goal", None)])
    assert isinstance(solve(f), Unsat)


def test_overflow_gives_unknown():
    d = Sort("D", 0, 3)
    r = Relation("R", (d,))
    x = Var("x")
    cs = ParameterizedClauseSet.of([r], [clause("z", r(0)), clause("s", r(x + 1), r(x))])
    verdict = solve(cs)
    assert isinstance(verdict, Unknown)
    assert ("R", (4,)) in verdict.overflow
    # a reachable False still wins
    cs2 = ParameterizedClauseSet.of([r], list(cs.clauses) + [clause("bad", None, r(x), x.eq(2))])
    assert isinstance(solve(cs2), Unsat)


def test_solve_budget():
    with pytest.raises(SolveBudgetExceeded):
        solve(counter_clauses().without("c3"), budget=5)


def test_engine_vs_naive_on_random_clause_sets():
    rng = random.Random(2024)
    seen = {"sat": 0, "unsat": 0, "unknown": 0}
    for _ in range(400):
        cs = oracles.random_clause_set(rng)
        got = solve(cs)
        expected, depth = oracles.naive_rounds(cs)
        assert oracles.verdict_name(got) == expected
        seen[expected] += 1
        if isinstance(got, Unsat):
            assert check_counterexample(got.derivation, cs)
            assert got.derivation.depth() == depth
        elif isinstance(got, Sat):
            assert check_model(got.model, cs)
    assert all(seen.values()), seen


def test_unsat_derivations_replay_and_sat_models_check_on_flag_subsets():
    for r in range(5):
        for enabled in itertools.combinations(NAMES, r):
            cs = subset_instance(enabled)
            got = solve(cs)
            if isinstance(got, Unsat):
                assert check_counterexample(got.derivation, cs)
            else:
                assert check_model(got.model, cs)
