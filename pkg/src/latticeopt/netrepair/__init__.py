"""Network repair: scenarios, their Horn encoding and repair problems."""

from .repair import (
    DST_FILTER, FILTERS, LINKS, MODES, PORT_FILTER, PORTS, TYP_FILTER, encode_network,
    filter_problem, link_disable_problem, link_flag, network_links, port_interval_problem,
    port_substitution,
)
from .scenario import (
    Host, PolicyRule, RepairSpace, Scenario, StaticFilter, Switch, Traffic, datacenter_scenario,
    link_name, load_scenario,
)

__all__ = [
    "DST_FILTER", "FILTERS", "LINKS", "MODES", "PORT_FILTER", "PORTS", "TYP_FILTER",
    "encode_network", "filter_problem", "link_disable_problem", "link_flag", "network_links",
    "port_interval_problem", "port_substitution",
    "Host", "PolicyRule", "RepairSpace", "Scenario", "StaticFilter", "Switch", "Traffic",
    "datacenter_scenario", "link_name", "load_scenario",
]
