"""Network scenarios: topology, traffic, static filters, policy and repair space.

Switches live in three layers (``tor``, ``agg``, ``core``); ToR and
aggregation switches belong to a pod. Routing is destination based and
follows the fat-tree discipline: up from the source ToR while the
destination is elsewhere, then down towards the destination's ToR.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Iterable

LAYERS = ("tor", "agg", "core")


@dataclass(frozen=True)
class Switch:
    name: str
    layer: str
    pod: int | None = None


@dataclass(frozen=True)
class Host:
    name: str
    ident: int
    tor: str


@dataclass(frozen=True)
class Traffic:
    """Packets a host injects at its ToR. ``None`` means "any value"."""

    host: str
    types: tuple[int, ...]
    dsts: tuple[int, ...] | None = None
    ports: tuple[int, ...] | None = None


@dataclass(frozen=True)
class StaticFilter:
    """Drops the listed packet types on the directed link ``src -> dst``."""

    src: str
    dst: str
    drop_types: tuple[int, ...]


@dataclass(frozen=True)
class PolicyRule:
    """Packets of ``types`` must not be delivered to ``host``.

    With ``port_groups`` the rule is only violated when, for every group, some
    such packet with a port in that group is delivered. Groups are inclusive
    ``(lo, hi)`` ranges; ``hi = None`` is unbounded.
    """

    types: tuple[int, ...]
    host: str
    port_groups: tuple[tuple[int, int | None], ...] = ()


@dataclass(frozen=True)
class RepairSpace:
    filter_link: tuple[str, str] | None = None
    port_link: tuple[str, str] | None = None
    port_points: tuple[int, ...] = ()


def link_name(a: str, b: str) -> str:
    return f"{a}-{b}"


@dataclass(frozen=True)
class Scenario:
    switches: tuple[Switch, ...]
    hosts: tuple[Host, ...]
    links: tuple[tuple[str, str], ...]
    disabled: frozenset = frozenset()
    traffic: tuple[Traffic, ...] = ()
    static_filters: tuple[StaticFilter, ...] = ()
    policy: tuple[PolicyRule, ...] = ()
    types: tuple[int, int] = (0, 7)
    ports: tuple[int, int] = (0, 7)
    repair: RepairSpace = field(default_factory=RepairSpace)

    def __post_init__(self):
        names = {s.name for s in self.switches}
        if len(names) != len(self.switches):
            raise ValueError("duplicate switch name")
        for s in self.switches:
            if s.layer not in LAYERS:
                raise ValueError(f"switch {s.name}: unknown layer {s.layer!r}")
            if s.layer != "core" and s.pod is None:
                raise ValueError(f"switch {s.name}: ToR and aggregation switches need a pod")
        hosts = {h.name for h in self.hosts}
        for h in self.hosts:
            if h.tor not in names or self.switch(h.tor).layer != "tor":
                raise ValueError(f"host {h.name}: {h.tor!r} is not a ToR switch")
        seen = set()
        for a, b in self.links:
            if a not in names or b not in names:
                raise ValueError(f"link {link_name(a, b)} references an undeclared switch")
            key = frozenset((a, b))
            if key in seen:
                raise ValueError(f"duplicate link {link_name(a, b)}")
            seen.add(key)
        for d in self.disabled:
            if d not in seen:
                raise ValueError(f"disabled link {'-'.join(sorted(d))} is not declared")
        for t in self.traffic:
            if t.host not in hosts:
                raise ValueError(f"traffic from undeclared host {t.host!r}")
        for f in self.static_filters:
            if frozenset((f.src, f.dst)) not in seen:
                raise ValueError(f"static filter on undeclared link {link_name(f.src, f.dst)}")
        for r in self.policy:
            if r.host not in hosts:
                raise ValueError(f"policy over undeclared host {r.host!r}")
            for t in r.types:
                if not self.types[0] <= t <= self.types[1]:
                    raise ValueError(f"policy over undeclared packet type {t}")
        for link in (self.repair.filter_link, self.repair.port_link):
            if link is not None and frozenset(link) not in seen:
                raise ValueError(f"repair link {link_name(*link)} is not declared")

    def switch(self, name: str) -> Switch:
        for s in self.switches:
            if s.name == name:
                return s
        raise KeyError(name)

    def host(self, name: str) -> Host:
        for h in self.hosts:
            if h.name == name:
                return h
        raise KeyError(name)

    @property
    def host_ids(self) -> tuple[int, ...]:
        return tuple(sorted(h.ident for h in self.hosts))

    def hosts_under(self, tor: str) -> set[int]:
        return {h.ident for h in self.hosts if h.tor == tor}

    def hosts_in_pod(self, pod: int) -> set[int]:
        return {h.ident for h in self.hosts if self.switch(h.tor).pod == pod}

    def enabled_links(self) -> list[tuple[str, str]]:
        return [l for l in self.links if frozenset(l) not in self.disabled]

    def with_disabled(self, links: Iterable[tuple[str, str]]) -> "Scenario":
        extra = {frozenset(l) for l in links}
        return replace(self, disabled=frozenset(self.disabled | extra))

    def with_enabled(self, links: Iterable[tuple[str, str]]) -> "Scenario":
        drop = {frozenset(l) for l in links}
        return replace(self, disabled=frozenset(self.disabled - drop))

    def links_of(self, switch: str) -> list[tuple[str, str]]:
        return [l for l in self.links if switch in l]

    def forwarding_guard(self, src: str, dst: str) -> set[int] | None:
        """Destinations forwarded over ``src -> dst``, or None if the hop is never used."""
        a, b = self.switch(src), self.switch(dst)
        everything = set(self.host_ids)
        if a.layer == "tor" and b.layer == "agg" and a.pod == b.pod:
            return everything - self.hosts_under(src)
        if a.layer == "agg" and b.layer == "tor" and a.pod == b.pod:
            return self.hosts_under(dst)
        if a.layer == "agg" and b.layer == "core":
            return everything - self.hosts_in_pod(a.pod)
        if a.layer == "core" and b.layer == "agg":
            return self.hosts_in_pod(b.pod)
        return None

    def dropped_types(self, src: str, dst: str) -> set[int]:
        out: set[int] = set()
        for f in self.static_filters:
            if (f.src, f.dst) == (src, dst):
                out |= set(f.drop_types)
        return out

    def to_dict(self) -> dict[str, Any]:
        return {
            "version": 1,
            "switches": [{"name": s.name, "layer": s.layer, "pod": s.pod} for s in self.switches],
            "hosts": [{"name": h.name, "id": h.ident, "tor": h.tor} for h in self.hosts],
            "links": [list(l) for l in self.links],
            "disabled": sorted(sorted(d) for d in self.disabled),
            "traffic": [{"host": t.host, "types": list(t.types),
                         "dsts": None if t.dsts is None else list(t.dsts),
                         "ports": None if t.ports is None else list(t.ports)}
                        for t in self.traffic],
            "static_filters": [{"src": f.src, "dst": f.dst, "drop_types": list(f.drop_types)}
                               for f in self.static_filters],
            "policy": [{"types": list(r.types), "host": r.host,
                        "port_groups": [list(g) for g in r.port_groups]} for r in self.policy],
            "types": list(self.types),
            "ports": list(self.ports),
            "repair": {
                "filter_link": None if self.repair.filter_link is None else list(self.repair.filter_link),
                "port_link": None if self.repair.port_link is None else list(self.repair.port_link),
                "port_points": list(self.repair.port_points),
            },
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "Scenario":
        if d.get("version") != 1:
            raise ValueError("scenario version must be 1")
        opt_tuple = lambda x: None if x is None else tuple(x)  # noqa: E731
        repair = d.get("repair") or {}
        return cls(
            switches=tuple(Switch(s["name"], s["layer"], s.get("pod")) for s in d["switches"]),
            hosts=tuple(Host(h["name"], h["id"], h["tor"]) for h in d["hosts"]),
            links=tuple((a, b) for a, b in d["links"]),
            disabled=frozenset(frozenset(l) for l in d.get("disabled", [])),
            traffic=tuple(Traffic(t["host"], tuple(t["types"]), opt_tuple(t.get("dsts")),
                                  opt_tuple(t.get("ports"))) for t in d.get("traffic", [])),
            static_filters=tuple(StaticFilter(f["src"], f["dst"], tuple(f["drop_types"]))
                                 for f in d.get("static_filters", [])),
            policy=tuple(PolicyRule(tuple(r["types"]), r["host"],
                                    tuple(tuple(g) for g in r.get("port_groups", [])))
                         for r in d.get("policy", [])),
            types=tuple(d.get("types", (0, 7))),
            ports=tuple(d.get("ports", (0, 7))),
            repair=RepairSpace(opt_tuple(repair.get("filter_link")),
                               opt_tuple(repair.get("port_link")),
                               tuple(repair.get("port_points", ()))),
        )


def load_scenario(path: str | Path) -> Scenario:
    with open(path) as f:
        return Scenario.from_dict(json.load(f))


def datacenter_scenario() -> Scenario:
    """The three-layer data-center network with core C2 back online.

    H1 sends type-0 traffic to every other host; H2..H4 send types 1..7.
    C1 drops type 0 towards A4 and A3-T4 is switched off, so H1 cannot
    reach H4 without C2. Type-0 delivery to H4 is only a violation when
    both control ports (2-3) and data ports (>= 4) get through, which is
    what gives the port-interval repair two incomparable answers.
    """
    switches = (
        [Switch(f"T{i}", "tor", 1 if i <= 2 else 2) for i in range(1, 5)]
        + [Switch(f"A{i}", "agg", 1 if i <= 2 else 2) for i in range(1, 5)]
        + [Switch("C1", "core"), Switch("C2", "core")]
    )
    hosts = tuple(Host(f"H{i}", i, f"T{i}") for i in range(1, 5))
    links = (
        ("T1", "A2"), ("T2", "A2"), ("T2", "A1"), ("T1", "A1"),
        ("A1", "C1"), ("A2", "C1"),
        ("A3", "T3"), ("A3", "T4"), ("A4", "T3"), ("A4", "T4"),
        ("C1", "A4"), ("C1", "A3"),
        ("C2", "A1"), ("C2", "A3"), ("C2", "A4"), ("C2", "A2"),
    )
    traffic = (Traffic("H1", (0,), (2, 3, 4), (2, 3, 5)),) + tuple(
        Traffic(f"H{i}", tuple(range(1, 8)), tuple(j for j in range(1, 5) if j != i))
        for i in range(2, 5))
    return Scenario(
        switches=tuple(switches),
        hosts=hosts,
        links=links,
        disabled=frozenset({frozenset(("A3", "T4"))}),
        traffic=traffic,
        static_filters=(StaticFilter("C1", "A4", (0,)),),
        policy=(PolicyRule((0,), "H4", ((2, 3), (4, None))),),
        types=(0, 7),
        ports=(0, 7),
        repair=RepairSpace(("A4", "T4"), ("A4", "T4"), (2, 3, 4)),
    )
