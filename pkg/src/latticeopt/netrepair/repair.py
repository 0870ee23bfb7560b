"""Horn encoding of a scenario and the three repair problems.

Every switch ``X`` gets a relation ``s_X(dst, typ)`` (``s_X(dst, typ,
port)`` with ports) holding the packets that can reach it. Ingress clauses
inject each host's traffic at its ToR, one forwarding clause per enabled
directed hop copies packets along the fat-tree routes, and each policy rule
becomes a clause with head False. Repair parameters are added to the bodies
of forwarding clauses only.
"""

from __future__ import annotations

from dataclasses import replace
from typing import Iterable

from ..chc import (
    FALSE, PARAMETER, TRUE, Atom, Clause, ParameterizedClauseSet, Relation, Sort, Var,
    clause_sat_lattice, conj, disj, v,
)
from ..chc.problems import HornProblem
from ..combinators import opt
from ..lattices import Interval, interval_lattice, powerset
from .scenario import Scenario, link_name

LINKS = "links"
FILTERS = "filters"
PORTS = "ports"
MODES = (LINKS, FILTERS, PORTS)

DST_FILTER = "dstFilter"
TYP_FILTER = "typFilter"
PORT_FILTER = "portFilter"


def relation_name(switch: str) -> str:
    return f"s_{switch}"


def link_flag(name: str) -> str:
    return f"link[{name}]"


def forwarding_clause_name(src: str, dst: str) -> str:
    return f"fwd:{src}->{dst}"


def _member(x, values: Iterable[int]):
    return disj(*(x.eq(t) for t in sorted(set(values))))


def encode_network(scenario: Scenario, mode: str | None = None) -> ParameterizedClauseSet:
    """Clauses for ``scenario``; ``mode`` selects the repair parameters to add.

    ``links`` flags every enabled switch-to-switch link, ``filters`` adds
    destination and type filters to the repair space's filter link and
    ``ports`` adds a port filter to its port link (and a port argument to
    every relation). Without a mode the clause set has no parameters.
    """
    if mode not in (None,) + MODES:
        raise ValueError(f"unknown repair mode {mode!r}")
    with_ports = mode == PORTS
    ids = scenario.host_ids
    dst_sort = Sort("Dst", min(ids), max(ids))
    typ_sort = Sort("Typ", *scenario.types)
    port_sort = Sort("Port", *scenario.ports)
    sorts = (dst_sort, typ_sort) + ((port_sort,) if with_ports else ())
    d, t, p = Var("dst"), Var("typ"), Var("port")
    args = (d, t, p) if with_ports else (d, t)

    relations = [Relation(relation_name(s.name), sorts) for s in scenario.switches]
    params: list[Relation] = []
    clauses: list[Clause] = []

    def at(switch: str, *xs) -> Atom:
        return Atom(relation_name(switch), tuple(xs or args))

    for tr in scenario.traffic:
        host = scenario.host(tr.host)
        parts = [_member(t, tr.types)]
        dsts = tr.dsts if tr.dsts is not None else [i for i in ids if i != host.ident]
        parts.append(_member(d, dsts))
        if with_ports and tr.ports is not None:
            parts.append(_member(p, tr.ports))
        clauses.append(Clause(f"ingress:{tr.host}", at(host.tor), (), conj(*parts)))

    filter_link = scenario.repair.filter_link if mode == FILTERS else None
    port_link = scenario.repair.port_link if mode == PORTS else None
    if mode == FILTERS:
        if filter_link is None:
            raise ValueError("scenario has no filter link in its repair space")
        params += [Relation(DST_FILTER, (dst_sort,), PARAMETER),
                   Relation(TYP_FILTER, (typ_sort,), PARAMETER)]
    if mode == PORTS:
        if port_link is None or not scenario.repair.port_points:
            raise ValueError("scenario has no port link or port points in its repair space")
        params.append(Relation(PORT_FILTER, (port_sort,), PARAMETER))

    for a, b in scenario.enabled_links():
        name = link_name(a, b)
        if mode == LINKS:
            params.append(Relation(link_flag(name), (), PARAMETER))
        for src, dst in ((a, b), (b, a)):
            guard = scenario.forwarding_guard(src, dst)
            if not guard:
                continue
            body = [at(src)]
            if mode == LINKS:
                body.append(Atom(link_flag(name)))
            if filter_link is not None and (src, dst) == tuple(filter_link):
                body += [Atom(DST_FILTER, (d,)), Atom(TYP_FILTER, (t,))]
            if port_link is not None and (src, dst) == tuple(port_link):
                body.append(Atom(PORT_FILTER, (p,)))
            parts = [_member(d, guard)]
            dropped = scenario.dropped_types(src, dst)
            if dropped:
                parts.append(~_member(t, dropped))
            clauses.append(Clause(forwarding_clause_name(src, dst), at(dst), tuple(body),
                                  conj(*parts)))

    for k, rule in enumerate(scenario.policy):
        host = scenario.host(rule.host)
        groups = rule.port_groups if with_ports else ()
        if not groups:
            clauses.append(Clause(f"policy:{k}", None, (at(host.tor),),
                                  conj(d.eq(host.ident), _member(t, rule.types))))
            continue
        body, parts = [], []
        for g, (lo, hi) in enumerate(groups):
            dg, tg, pg = Var(f"dst{g}"), Var(f"typ{g}"), Var(f"port{g}")
            body.append(at(host.tor, dg, tg, pg))
            parts += [dg.eq(host.ident), _member(tg, rule.types), pg >= lo]
            if hi is not None:
                parts.append(pg <= hi)
        clauses.append(Clause(f"policy:{k}", None, tuple(body), conj(*parts)))

    return ParameterizedClauseSet.of(relations + params, clauses)


def network_links(scenario: Scenario) -> list[str]:
    """Names of the links a link-disabling repair may switch off."""
    return [link_name(a, b) for a, b in scenario.enabled_links()]


def link_disable_problem(scenario: Scenario, **oracle_options) -> HornProblem:
    """Powerset of enabled links; feasible when the enabled links are safe.

    Scores count enabled links, so maximal feasible nodes are maximal safe
    link sets and their complements the minimal disable-sets.
    """
    names = network_links(scenario)
    hc = encode_network(scenario, LINKS)
    flags = [link_flag(n) for n in names]
    base = (opt(powerset(names))
            .with_score(len)
            .map(lambda s: {link_flag(n): TRUE if n in s else FALSE for n in names}))
    sat = clause_sat_lattice(base, hc, flags, **oracle_options)
    lat = sat.map(lambda m: frozenset(n for n in names if m[link_flag(n)] == TRUE))
    everything = frozenset(names)
    return HornProblem(lat, sat.oracle,
                       render=lambda n: {"disabled": sorted(everything - lat.label(n))})


def filter_problem(scenario: Scenario, link: tuple[str, str] | None = None,
                   **oracle_options) -> HornProblem:
    """Destination and type filters on one directed link.

    Nodes pair the kept destinations with the kept types; the score is the
    total number kept.
    """
    if link is not None:
        scenario = replace(scenario, repair=replace(scenario.repair, filter_link=tuple(link)))
    hc = encode_network(scenario, FILTERS)
    dst_latt = opt(powerset(scenario.host_ids)).with_score(len)
    typ_values = range(scenario.types[0], scenario.types[1] + 1)
    typ_latt = opt(powerset(typ_values)).with_score(len)
    dst_filters = dst_latt.map(lambda s: _member(v(0), s))
    typ_filters = typ_latt.map(lambda s: _member(v(0), s))
    latt1 = dst_filters.flat_map(
        lambda c1: typ_filters.map(lambda c2: {DST_FILTER: c1, TYP_FILTER: c2}))
    latt2 = latt1.map_score(lambda pair: pair[0] + pair[1])
    latt3 = clause_sat_lattice(latt2, hc, {DST_FILTER, TYP_FILTER}, **oracle_options)

    def render(n):
        return {"keep_dsts": sorted(dst_latt.label(n[0])),
                "keep_types": sorted(typ_latt.label(n[1]))}

    return HornProblem(latt3, latt3.oracle, render=render)


def port_substitution(interval: Interval):
    """Packets pass unless their port lies in ``interval``."""
    if interval.empty:
        return TRUE
    parts = []
    if interval.lo is not None:
        parts.append(v(0) < interval.lo)
    if interval.hi is not None:
        parts.append(v(0) > interval.hi)
    return disj(*parts) if parts else FALSE


def port_interval_problem(scenario: Scenario, link: tuple[str, str] | None = None,
                          points: Iterable[int] | None = None, **oracle_options) -> HornProblem:
    """Blocked port range on one directed link, over the interval lattice of ``points``.

    Walking up shrinks the blocked range; the score counts unblocked ports.
    """
    repair = scenario.repair
    if link is not None:
        repair = replace(repair, port_link=tuple(link))
    if points is not None:
        repair = replace(repair, port_points=tuple(points))
    scenario = replace(scenario, repair=repair)
    hc = encode_network(scenario, PORTS)
    ports = range(scenario.ports[0], scenario.ports[1] + 1)
    base = (opt(interval_lattice(scenario.repair.port_points))
            .with_score(lambda iv: sum(1 for q in ports if not iv.contains(q))))
    lat = clause_sat_lattice(base.map(lambda iv: {PORT_FILTER: port_substitution(iv)}),
                             hc, {PORT_FILTER}, **oracle_options)
    return HornProblem(lat, lat.oracle, render=lambda n: {"blocked": str(base.label(n))})
