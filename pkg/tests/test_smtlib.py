import itertools
import os
import shutil
import stat
import sys
from pathlib import Path

import pytest

from latticeopt.catalog import counter_clauses
from latticeopt.chc import ParameterizedClauseSet, Sat, Unknown, Unsat, clause
from latticeopt.chc.problems import flagged
from latticeopt.chc.smtlib import (
    ExternalSolverError, ExternalSolverTimeout, emit_smtlib_horn, external_solve, parse_answer,
)

import oracles

GOLDEN = Path(__file__).parent / "golden"
NAMES = ["c0", "c1", "c2", "c3"]


def fake_solver(tmp_path, body):
    p = tmp_path / "solver.py"
    p.write_text(f"#!{sys.executable}\nimport sys, time\n{body}\n")
    p.chmod(p.stat().st_mode | stat.S_IEXEC)
    return str(p)


def test_golden_counter_output():
    assert emit_smtlib_horn(counter_clauses()) == (GOLDEN / "counter.smt2").read_text()


def test_parameterized_set_rejected():
    with pytest.raises(ValueError):
        emit_smtlib_horn(flagged(counter_clauses(), NAMES))


def test_parse_answer():
    assert isinstance(parse_answer("; hi\n\nsat\n"), Sat)
    assert isinstance(parse_answer("unsat"), Unsat)
    assert isinstance(parse_answer("unknown"), Unknown)
    with pytest.raises(ExternalSolverError):
        parse_answer("(error oops)")
    with pytest.raises(ExternalSolverError):
        parse_answer("")


def test_fake_solver_decides_by_content(tmp_path):
    # answers unsat exactly when some assertion has head false
    cmd = fake_solver(tmp_path, "t = open(sys.argv[1]).read()\n"
                                "print('unsat' if 'false)' in t else 'sat')")
    assert isinstance(external_solve(ParameterizedClauseSet.of([], []), cmd), Sat)
    f = ParameterizedClauseSet.of([], [clause("goal", None)])
    assert emit_smtlib_horn(f).splitlines()[1] == "(assert (=> true false))"
    assert isinstance(external_solve(f, [cmd, "{file}"]), Unsat)


def test_solver_timeout_and_garbage(tmp_path):
    slow = fake_solver(tmp_path, "time.sleep(5)")
    with pytest.raises(ExternalSolverTimeout):
        external_solve(counter_clauses(), slow, timeout=0.3)
    junk = fake_solver(tmp_path, "print('maybe')")
    with pytest.raises(ExternalSolverError):
        external_solve(counter_clauses(), junk)
    with pytest.raises(ExternalSolverError):
        external_solve(counter_clauses(), str(tmp_path / "missing-binary"))
    with pytest.raises(ExternalSolverError):
        external_solve(counter_clauses(), "")


def test_temp_file_removed(tmp_path):
    log = tmp_path / "seen"
    cmd = fake_solver(tmp_path, f"open({str(log)!r}, 'w').write(sys.argv[1])\nprint('sat')")
    external_solve(counter_clauses(), cmd)
    assert not os.path.exists(log.read_text())


@pytest.mark.skipif(shutil.which("z3") is None, reason="z3 not installed")
def test_z3_agrees_on_all_subsets():
    for r in range(5):
        for s in itertools.combinations(NAMES, r):
            cs = counter_clauses().restrict(s)
            got = external_solve(cs, "z3 {file}")
            assert oracles.verdict_name(got) == oracles.naive_verdict(cs), s
