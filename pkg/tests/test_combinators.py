import random

import pytest

from latticeopt import combinators as C
from latticeopt.catalog import squares_lattice
from latticeopt.combinators import audit_downward_closed, audit_monotone, cached, opt
from latticeopt.lattices import interval_lattice, powerset, product

import oracles


def squares():
    return squares_lattice(16)


def node(l, xs):
    return l.lattice.node_of(xs)


def test_squares_scores_and_filter():
    l = squares()
    assert l.score(node(l, {2, 5})) == 7
    assert l.score(l.bottom) == 0
    best = {2} | set(range(5, 17))
    assert l.score(node(l, best)) == sum(best) == 128
    assert not l.is_feasible(node(l, {3, 9}))
    assert l.is_feasible(l.bottom)
    assert not l.is_feasible(node(l, {4, 16}))
    assert l.is_feasible(node(l, {4}))


def test_map_relabels_without_touching_scores():
    l = opt(powerset([1, 2])).with_score(sum).map(len)
    top = l.top
    assert l.label(top) == 2
    assert l.score(top) == 3
    ident = opt(powerset([1, 2])).with_score(sum).map(lambda s: s)
    for n in ident.nodes():
        assert ident.label(n) == ident.lattice.label(n)


def test_map_set2map_style():
    names = ["a", "b"]
    l = opt(powerset(names)).map(lambda s: {f: f in s for f in names})
    assert l.label(l.top) == {"a": True, "b": True}
    assert l.label(l.bottom) == {"a": False, "b": False}


def test_combinator_laws():
    base = opt(powerset(range(6))).with_score(len)
    p = lambda s: 0 not in s or 1 not in s  # noqa: E731
    q = lambda s: len(s) <= 4  # noqa: E731
    g = lambda s: sorted(s)  # noqa: E731
    h = lambda xs: tuple(reversed(xs))  # noqa: E731
    two = base.filter(p).filter(q)
    one = base.filter(lambda s: p(s) and q(s))
    mm = base.map(g).map(h)
    m1 = base.map(lambda s: h(g(s)))
    over = base.with_score(lambda s: -1).with_score(sum)
    for n in base.nodes():
        assert two.is_feasible(n) == one.is_feasible(n)
        assert mm.label(n) == m1.label(n)
        assert over.score(n) == sum(base.label(n))


def test_module_level_combinators():
    l = C.filter(C.with_score(opt(powerset([1, 2, 3])), sum), lambda s: 3 not in s)
    l = C.map_score(l, lambda x: 2 * x)
    assert l.score(l.top) == 12
    assert not l.is_feasible(l.top)
    assert C.map(l, len).label(l.top) == 3


def test_map_score_pair_sum_and_argmax():
    d = opt(powerset([1, 2])).with_score(len)
    t = opt(powerset([0, 1, 2])).with_score(len)
    p = d.flat_map(lambda a: t.map(lambda b: (a, b)))
    assert p.score(p.top) == (2, 3)
    s = p.map_score(lambda pair: pair[0] + pair[1])
    assert s.score(s.top) == 5
    table = {n: s.score(n) for n in s.nodes()}
    doubled = s.map_score(lambda x: 2 * x)
    best = max(table.values())
    assert {n for n in table if table[n] == best} == \
        {n for n in table if doubled.score(n) == 2 * best}


def test_flat_map_product_labels():
    dst = opt(powerset([1, 2, 3, 4])).map(lambda s: ("dst", frozenset(s)))
    typ = opt(powerset(range(8))).map(lambda s: ("typ", frozenset(s)))
    l = dst.flat_map(lambda a: typ.map(lambda b: {"dstFilter": a, "typFilter": b}))
    assert l.node_count == 2 ** 12
    top = l.label(l.top)
    assert top["dstFilter"] == ("dst", frozenset({1, 2, 3, 4}))
    assert top["typFilter"] == ("typ", frozenset(range(8)))


def test_flat_map_unit_law():
    unit = opt(powerset([]))
    inner = opt(powerset([1, 2, 3])).with_score(sum).filter(lambda s: 1 not in s or 2 not in s)
    l = unit.flat_map(lambda _: inner)
    for n in inner.nodes():
        assert l.label((0, n)) == inner.label(n)
        assert l.is_feasible((0, n)) == inner.is_feasible(n)
        assert l.score((0, n))[1] == inner.score(n)


def test_flat_map_two_chains_is_diamond():
    chain = opt(powerset(["x"])).filter(lambda s: True)
    a = chain.filter(lambda s: "x" not in s)
    l = chain.flat_map(lambda _: a)
    nodes = list(l.nodes())
    assert len(nodes) == 4
    # componentwise: only the second component's top is infeasible
    feasible = {n for n in nodes if l.is_feasible(n)}
    assert feasible == {(0, 0), (1, 0)}
    assert len(list(l.successors((0, 0)))) == 2


def test_flat_map_rejects_varying_carriers():
    outer = opt(powerset([1, 2]))
    with pytest.raises(ValueError):
        outer.flat_map(lambda s: opt(powerset(range(len(s)))))


def test_cached_counters():
    calls = []
    base = opt(powerset(range(4))).filter(lambda s: calls.append(s) or len(s) < 3)
    c = cached(base)
    n = c.lattice.node_of({1})
    assert c.is_feasible(n) and c.is_feasible(n)
    assert (c.queries, c.hits, c.oracle_calls) == (2, 1, 1)
    c2 = cached(base)
    for m in c2.nodes():
        c2.is_feasible(m)
    assert c2.oracle_calls == 16
    for m in c2.nodes():
        assert c2.is_feasible(m) == base.is_feasible(m)


def test_cached_search_is_cheaper_than_node_count():
    from latticeopt.search import maximal_feasible_objects
    c = cached(squares())
    ms = maximal_feasible_objects(c)
    assert len(ms) == 4
    assert c.oracle_calls < c.node_count


def test_audits_exhaustive_on_small_lattices():
    for spec in [("powerset", tuple(range(8))), ("interval", (1, 2, 3, 4)),
                 ("product", ("powerset", (0, 1, 2)), ("inverted", ("powerset", (0, 1, 2))))]:
        lat = oracles.build(spec)
        good = opt(lat).with_score(lambda lab, s=spec: bin(oracles.encode(s, lab)).count("1"))
        good = good.filter(lambda lab, s=spec: bin(oracles.encode(s, lab)).count("1") <= 3)
        assert audit_downward_closed(good) == []
        assert audit_monotone(good) == []
        bad = opt(lat).filter(lambda lab, s=spec: bin(oracles.encode(s, lab)).count("1") >= 1)
        assert audit_downward_closed(bad)
        anti = opt(lat).with_score(lambda lab, s=spec: -bin(oracles.encode(s, lab)).count("1"))
        assert audit_monotone(anti)


def test_audits_sampled_on_large_lattice():
    l = squares()
    assert l.node_count > 4096
    assert audit_downward_closed(l, seed=1) == []
    assert audit_monotone(l, seed=1) == []
    bad = opt(powerset(range(16))).filter(lambda s: len(s) != 3)
    assert audit_downward_closed(bad, seed=2)


def test_audit_on_filter_product_lattice():
    dst = opt(powerset([1, 2, 3, 4])).with_score(len)
    typ = opt(powerset(range(8))).with_score(len)
    l = dst.flat_map(lambda a: typ.map(lambda b: (a, b))).map_score(lambda p: p[0] + p[1])
    assert l.node_count == 4096
    assert audit_monotone(l) == []


def test_audit_interval_lattice_score():
    l = opt(interval_lattice([2, 3, 4])).with_score(
        lambda iv: sum(1 for q in range(8) if not iv.contains(q)))
    assert audit_monotone(l) == []
    assert l.score(l.bottom) == 0 and l.score(l.top) == 8


def test_product_of_opt_lattices_random_feasibility_audit():
    rng = random.Random(5)
    lat = product(powerset(range(5)), interval_lattice([1, 3, 5]))
    spec = ("product", ("powerset", tuple(range(5))), ("interval", (1, 3, 5)))
    masks = [oracles.encode(spec, lat.label(n)) for n in lat.nodes()]
    mp = oracles.random_mask_problem(rng, masks, oracles.width(spec))
    l = opt(lat).filter(lambda lab: mp.feasible(oracles.encode(spec, lab)))
    assert audit_downward_closed(l) == []
