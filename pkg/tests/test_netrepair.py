import json
import random
from dataclasses import replace
from pathlib import Path

import pytest

from latticeopt.chc import TRUE, Sat, Unsat, instantiate, solve
from latticeopt.combinators import audit_downward_closed, audit_monotone
from latticeopt.lattices import interval_lattice
from latticeopt.netrepair import (
    DST_FILTER, FILTERS, LINKS, PORT_FILTER, PORTS, TYP_FILTER, PolicyRule, Scenario, Traffic,
    encode_network, datacenter_scenario, filter_problem, link_disable_problem, load_scenario,
    port_interval_problem,
)
from latticeopt.search import SearchConfig

import oracles
import suites

PROBLEMS = Path(__file__).parent.parent / "problems"


# scenario

def test_datacenter_unsafe_as_given():
    sc = datacenter_scenario()
    assert isinstance(solve(encode_network(sc)), Unsat)
    assert not oracles.safe(sc)


def test_datacenter_safe_once_c2_is_off_again():
    sc = datacenter_scenario().with_disabled(datacenter_scenario().links_of("C2"))
    assert isinstance(solve(encode_network(sc)), Sat)
    assert oracles.safe(sc)


@pytest.mark.parametrize("link", [("A4", "T4"), ("C2", "A4")])
def test_single_link_disable_fixes_datacenter(link):
    sc = datacenter_scenario().with_disabled([link])
    assert isinstance(solve(encode_network(sc)), Sat)


def test_counterexample_reaches_h4():
    d = solve(encode_network(datacenter_scenario())).derivation
    names = [s.clause for s in d.steps()]
    assert names[0] == "policy:0"
    assert names[-1] == "ingress:H1"
    assert "fwd:C2->A4" in names


def test_scenario_file_round_trip():
    sc = datacenter_scenario()
    text = (PROBLEMS / "datacenter.json").read_text()
    assert text == json.dumps(sc.to_dict(), indent=2) + "\n"
    assert load_scenario(PROBLEMS / "datacenter.json") == sc
    assert Scenario.from_dict(sc.to_dict()) == sc


@pytest.mark.parametrize("change", [
    lambda d: d["switches"].append(dict(d["switches"][0])),
    lambda d: d["switches"][0].update(layer="spine"),
    lambda d: d["switches"][0].update(pod=None),
    lambda d: d["hosts"][0].update(tor="C1"),
    lambda d: d["links"].append(["T1", "Z9"]),
    lambda d: d["links"].append(["A2", "T1"]),
    lambda d: d["disabled"].append(["T1", "T3"]),
    lambda d: d["traffic"][0].update(host="H9"),
    lambda d: d["static_filters"][0].update(src="T1"),
    lambda d: d["policy"][0].update(types=[9]),
    lambda d: d["repair"].update(filter_link=["T1", "T4"]),
    lambda d: d.update(version=2),
])
def test_scenario_validation(change):
    d = datacenter_scenario().to_dict()
    change(d)
    with pytest.raises(ValueError):
        Scenario.from_dict(d)


# encoding

def test_parameters_only_in_bodies_and_only_on_the_repair_link():
    sc = datacenter_scenario()
    for mode, names in [(LINKS, None), (FILTERS, {DST_FILTER, TYP_FILTER}), (PORTS, {PORT_FILTER})]:
        hc = encode_network(sc, mode)
        params = set(hc.parameters)
        if names is not None:
            assert params == names
        for c in hc.clauses:
            assert c.head is None or c.head.rel not in params
            used = {a.rel for a in c.body} & params
            if used and mode != LINKS:
                link = sc.repair.filter_link if mode == FILTERS else sc.repair.port_link
                assert c.name == f"fwd:{link[0]}->{link[1]}"
    links = encode_network(sc, LINKS)
    assert len(links.parameters) == len(sc.enabled_links()) == 15


def test_unknown_mode_and_missing_repair_space():
    sc = datacenter_scenario()
    with pytest.raises(ValueError):
        encode_network(sc, "bogus")
    bare = replace(sc, repair=replace(sc.repair, filter_link=None, port_points=()))
    with pytest.raises(ValueError):
        encode_network(bare, FILTERS)
    with pytest.raises(ValueError):
        encode_network(bare, PORTS)


def test_engine_agrees_with_packet_simulation():
    res = suites.network_vs_simulation(n=600, master_seed=7)
    assert res.runs == 600
    assert res.mismatches == []
    assert res.verdicts["sat"] > 50 and res.verdicts["unsat"] > 50


def test_policy_groups_are_conjunctive_in_ports_mode():
    sc = datacenter_scenario()
    only_low = replace(sc, traffic=(Traffic("H1", (0,), (4,), (2, 3)),))
    hc = encode_network(only_low, PORTS)
    assert isinstance(solve(instantiate(hc, {PORT_FILTER: TRUE})), Sat)
    both = replace(only_low, traffic=(Traffic("H1", (0,), (4,), (2, 5)),))
    assert isinstance(solve(instantiate(encode_network(both, PORTS), {PORT_FILTER: TRUE})), Unsat)
    # without ports any delivery violates
    assert isinstance(solve(encode_network(only_low)), Unsat)
    ungrouped = replace(only_low, policy=(PolicyRule((0,), "H4"),))
    assert isinstance(solve(instantiate(encode_network(ungrouped, PORTS), {PORT_FILTER: TRUE})), Unsat)


# repair problems against brute force

def test_link_disable_matches_brute_force():
    sc = datacenter_scenario()
    expected = set(oracles.maximal_of(list(oracles.safe_link_sets(sc)), lambda a, b: a <= b))
    p = link_disable_problem(sc)
    res = p.maximal(SearchConfig(seed=0))
    assert {p.lattice.label(n) for n in res} == expected
    disables = sorted(sorted(p.describe(n)["disabled"]) for n in res)
    assert disables == [["A4-T4"], ["C2-A1", "C2-A2"], ["C2-A1", "T1-A2"], ["C2-A2", "T1-A1"],
                        ["C2-A4"], ["T1-A1", "T1-A2"]]


def _filter_labels(p, nodes):
    return {(frozenset(p.describe(n)["keep_dsts"]), frozenset(p.describe(n)["keep_types"]))
            for n in nodes}


def test_filter_optima_match_brute_force():
    sc = datacenter_scenario()
    link = ("A4", "T4")
    feasible = oracles.safe_filters(sc, link)
    best = max(len(a) + len(b) for a, b in feasible)
    expected = {(a, b) for a, b in feasible if len(a) + len(b) == best}
    assert best == 11
    assert expected == {(frozenset({1, 2, 3, 4}), frozenset(range(1, 8))),
                        (frozenset({1, 2, 3}), frozenset(range(8)))}
    p = filter_problem(sc, link)
    res = p.optimal(SearchConfig(seed=1))
    assert _filter_labels(p, res) == expected
    assert all(p.lattice.score(n) == 11 for n in res)
    expected_max = set(oracles.maximal_of(feasible, lambda x, y: x[0] <= y[0] and x[1] <= y[1]))
    assert _filter_labels(p, p.maximal(SearchConfig(seed=2))) == expected_max


def test_filter_lattice_is_downward_closed_and_monotone():
    p = filter_problem(datacenter_scenario())
    assert p.lattice.node_count == 4096
    assert audit_downward_closed(p.lattice) == []
    assert audit_monotone(p.lattice) == []


def test_port_intervals_match_brute_force():
    sc = datacenter_scenario()
    lat = interval_lattice(sc.repair.port_points)
    by_label = {lat.label(n): n for n in lat.nodes()}
    feasible = oracles.safe_port_blocks(sc, tuple(sc.repair.port_link), list(by_label))
    expected = {str(iv) for iv in oracles.maximal_of(feasible, lambda a, b: lat.leq(by_label[a], by_label[b]))}
    p = port_interval_problem(sc)
    res = p.maximal(SearchConfig(seed=0))
    assert {p.describe(n)["blocked"] for n in res} == expected == {"[2,3]", "[4,+inf)"}
    assert sorted(p.lattice.score(n) for n in res) == [4, 6]


def test_random_scenarios_link_repair_vs_simulation():
    rng = random.Random(3)
    for _ in range(6):
        sc = suites.random_scenario(rng)
        en = sc.enabled_links()
        if len(en) > 12:
            sc = sc.with_disabled(rng.sample(en, len(en) - 12))
            en = sc.enabled_links()
        safe = oracles.safe_link_sets(sc)
        expected = set(oracles.maximal_of(list(safe), lambda a, b: a <= b))
        p = link_disable_problem(sc)
        assert {p.lattice.label(n) for n in p.maximal(SearchConfig(seed=rng.getrandbits(32)))} == expected
