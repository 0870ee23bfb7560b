import random

import pytest

from latticeopt.catalog import squares_lattice
from latticeopt.combinators import opt
from latticeopt.lattices import interval_lattice, inverted, powerset, product
from latticeopt.search import (
    BudgetExhausted, ContractViolation, SearchConfig, SearchState, greedy_ascend, is_pruned,
    maximal_feasible_objects, optimal_feasible_objects, record_infeasible,
)

import oracles
import suites

BEST = frozenset({2} | set(range(5, 17)))


def test_squares_greedy_ascend_reaches_a_maximal():
    l = squares_lattice()
    maximals = {l.label(m) for m in maximal_feasible_objects(l)}
    for seed in range(20):
        m = greedy_ascend(l, l.bottom, config=SearchConfig(seed=seed))
        assert l.label(m) in maximals


@pytest.mark.parametrize("seed", [0, 1, 123, 2 ** 63 - 1])
def test_squares_maximal_and_optimal(seed):
    l = squares_lattice()
    cfg = SearchConfig(seed=seed)
    ms = maximal_feasible_objects(l, config=cfg)
    assert len(ms) == 4
    opt_ = optimal_feasible_objects(l, config=cfg)
    assert [l.label(n) for n in opt_] == [BEST]
    assert l.score(opt_[0]) == 128


def test_top_feasible_ascends_to_top():
    l = opt(powerset(range(5)))
    assert greedy_ascend(l, l.lattice.node_of({1})) == l.top
    assert maximal_feasible_objects(l) == [l.top]


def test_chain_with_only_bottom_feasible():
    l = opt(powerset(["x"])).filter(lambda s: not s)
    assert greedy_ascend(l, l.bottom) == l.bottom


def test_greedy_ascend_rejects_infeasible_start():
    l = opt(powerset([1, 2])).filter(lambda s: len(s) < 2)
    with pytest.raises(ContractViolation):
        greedy_ascend(l, l.top)


def test_infeasible_lower_bound_gives_empty():
    l = opt(powerset([1, 2])).filter(lambda s: 1 not in s)
    assert maximal_feasible_objects(l, l.lattice.node_of({1})) == []
    assert optimal_feasible_objects(l, l.lattice.node_of({1})) == []


def test_lower_bound_restricts_results():
    l = squares_lattice()
    lb = l.lattice.node_of({3})
    ms = maximal_feasible_objects(l, lb)
    assert ms and all(3 in l.label(m) for m in ms)
    assert all(l.leq(lb, m) for m in ms)


def test_constant_score_optimal_equals_maximal():
    l = opt(powerset(range(6))).filter(lambda s: len(s) <= 3 and not {0, 1} <= s)
    cfg = SearchConfig(seed=4)
    assert set(optimal_feasible_objects(l, config=cfg)) == set(maximal_feasible_objects(l, config=cfg))


def test_bound_store_antichain():
    l = squares_lattice()
    state = SearchState(l)
    n = l.lattice.node_of
    record_infeasible(state, n({3, 9}))
    assert is_pruned(state, n({3, 9, 11}))
    assert not is_pruned(state, l.bottom)
    state = SearchState(opt(powerset("ab")))
    a, ab = state.lattice.lattice.node_of("a"), state.lattice.lattice.node_of("ab")
    record_infeasible(state, a)
    record_infeasible(state, ab)
    assert state.infeasible_bounds == [a]
    state2 = SearchState(opt(powerset("ab")))
    record_infeasible(state2, ab)
    record_infeasible(state2, a)
    assert state2.infeasible_bounds == [a]


def test_budget_exhaustion_carries_partial_results():
    l = squares_lattice()
    with pytest.raises(BudgetExhausted) as e:
        maximal_feasible_objects(l, config=SearchConfig(seed=1, max_oracle_calls=30))
    assert e.value.state.stats.oracle_calls == 30
    assert not e.value.complete
    for m in e.value.partial:
        assert l.is_feasible(m)


def test_determinism_same_seed_same_results_and_stats():
    l = squares_lattice()
    runs = []
    for _ in range(3):
        st = SearchState(l, SearchConfig(seed=77))
        res = optimal_feasible_objects(l, config=st.config, state=st)
        runs.append((res, list(st.maximals), vars(st.stats).copy()))
    assert runs[0] == runs[1] == runs[2]


def test_oracle_sequence_is_reproducible():
    seen = [[], []]
    for k in range(2):
        l = squares_lattice().filter(lambda s, k=k: seen[k].append(s) or True)
        maximal_feasible_objects(l, config=SearchConfig(seed=9))
    assert seen[0] == seen[1]


def _soundness(l, ms):
    for m in ms:
        assert l.is_feasible(m)
        assert not any(l.is_feasible(s) for s in l.successors(m))
    for a in ms:
        for b in ms:
            assert a == b or not l.leq(a, b)


@pytest.mark.parametrize("lat", [
    powerset(range(8)),
    inverted(powerset(range(7))),
    interval_lattice([1, 2, 4, 8, 16]),
    product(interval_lattice([0, 3]), inverted(powerset(range(4)))),
], ids=["powerset", "inverted", "interval", "product"])
def test_soundness_antichain_and_call_bound(lat):
    rng = random.Random(3)
    for _ in range(10):
        picks = [lat.random_node(rng) for _ in range(rng.randint(1, 5))]
        l = opt(lat).filter(lambda lab, picks=picks: any(
            lat.leq(n, p) for p in picks for n in [_node_of_label(lat, lab)]))
        st = SearchState(l, SearchConfig(seed=rng.getrandbits(32)))
        ms = maximal_feasible_objects(l, state=st)
        _soundness(l, ms)
        assert set(ms) == set(_maximal_of(lat, picks))
        assert st.stats.oracle_calls <= lat.node_count


def _node_of_label(lat, lab):
    for n in lat.nodes():
        if lat.label(n) == lab:
            return n
    raise KeyError(lab)


def _maximal_of(lat, picks):
    return {p for p in picks if not any(lat.lt(p, q) for q in picks)}


def test_objective_pruning_skips_work_on_squares():
    l = squares_lattice()
    on = SearchState(l, SearchConfig(seed=5, objective_pruning=True))
    off = SearchState(l, SearchConfig(seed=5, objective_pruning=False))
    a = optimal_feasible_objects(l, state=on)
    b = optimal_feasible_objects(l, state=off)
    assert a == b
    assert on.stats.oracle_calls <= off.stats.oracle_calls


def test_search_vs_brute_force_smoke():
    res = suites.search_vs_brute_force(n_lattices=25, n_seeds=12, master_seed=11)
    assert res.mismatches == []
    assert res.runs >= 25 * 12


def test_random_mask_oracle_is_downward_closed():
    rng = random.Random(0)
    spec = ("product", ("powerset", (0, 1, 2)), ("interval", (1, 2)))
    masks = [oracles.encode(spec, lab) for lab in oracles.carrier(spec)]
    mp = oracles.random_mask_problem(rng, masks, oracles.width(spec))
    for a in masks:
        for b in masks:
            if oracles.is_subset(a, b) and mp.feasible(b):
                assert mp.feasible(a)
