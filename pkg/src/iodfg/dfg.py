"""Directly-follows graph construction, merging and set-difference queries.

Nodes are activities (plus the START/END sentinels); a directed edge
(a1, a2) carries the number of times a1 was immediately followed by a2
across the activity-log, weighted by trace multiplicity.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from typing import NamedTuple, TYPE_CHECKING

from .mapping import ActivityLog, END, START

if TYPE_CHECKING:
    from .stats import NodeStats


@dataclass(frozen=True)
class Provenance:
    """Identifies the mapping and case set a graph was synthesized from."""

    mapping_id: str = ""
    case_ids: tuple[str, ...] = ()


@dataclass(frozen=True)
class Dfg:
    nodes: frozenset[str]
    edges: dict[tuple[str, str], int]
    provenance: Provenance = Provenance()
    node_stats: dict[str, "NodeStats"] | None = None


class ExclusiveElements(NamedTuple):
    green_nodes: frozenset[str]
    green_edges: frozenset[tuple[str, str]]
    red_nodes: frozenset[str]
    red_edges: frozenset[tuple[str, str]]


def _node_sort_key(node: str) -> tuple[int, str]:
    # START first, END last, everything else lexicographic
    return (0 if node == START else 2 if node == END else 1, node)


def ordered_nodes(dfg: Dfg) -> list[str]:
    return sorted(dfg.nodes, key=_node_sort_key)


def ordered_edges(dfg: Dfg) -> list[tuple[tuple[str, str], int]]:
    return sorted(dfg.edges.items())


def build_dfg(activity_log: ActivityLog) -> Dfg:
    """Single pass over the trace multiset, counting adjacent pairs."""
    nodes: set[str] = set()
    edges: Counter[tuple[str, str]] = Counter()
    for trace, mult in activity_log.traces:
        nodes.update(trace)
        for pair in zip(trace, trace[1:]):
            edges[pair] += mult
    return Dfg(
        nodes=frozenset(nodes),
        edges=dict(edges),
        provenance=Provenance(activity_log.mapping_id, activity_log.case_ids),
    )


def merge_dfg(d1: Dfg, d2: Dfg) -> Dfg:
    """Node union and edge-count sum; the empty graph is the identity."""
    edges = Counter(d1.edges)
    edges.update(d2.edges)
    if d1.provenance.mapping_id == d2.provenance.mapping_id:
        mapping_id = d1.provenance.mapping_id
    else:
        mapping_id = "+".join(p for p in (d1.provenance.mapping_id, d2.provenance.mapping_id) if p)
    case_ids = tuple(sorted(set(d1.provenance.case_ids) | set(d2.provenance.case_ids)))
    return Dfg(
        nodes=d1.nodes | d2.nodes,
        edges=dict(edges),
        provenance=Provenance(mapping_id, case_ids),
    )


def exclusive_elements(green: Dfg, red: Dfg) -> ExclusiveElements:
    """Nodes and edges present in exactly one of the two graphs (by key)."""
    green_keys = set(green.edges)
    red_keys = set(red.edges)
    return ExclusiveElements(
        green_nodes=frozenset(green.nodes - red.nodes),
        green_edges=frozenset(green_keys - red_keys),
        red_nodes=frozenset(red.nodes - green.nodes),
        red_edges=frozenset(red_keys - green_keys),
    )


def to_json_dict(dfg: Dfg) -> dict:
    nodes = []
    for node in ordered_nodes(dfg):
        entry: dict = {"activity": node}
        if dfg.node_stats and node in dfg.node_stats:
            stats = dfg.node_stats[node]
            entry["stats"] = {
                "rd": stats.rd,
                "total_dur_us": stats.total_dur_us,
                "bytes": stats.bytes,
                "data_rate_mean": stats.data_rate_mean,
                "max_concurrency": stats.max_concurrency,
                "sample_count": stats.sample_count,
            }
            entry["load"] = stats.load_label()
            entry["dr"] = stats.dr_label()
        nodes.append(entry)
    return {
        "nodes": nodes,
        "edges": [
            {"src": src, "dst": dst, "count": count}
            for (src, dst), count in ordered_edges(dfg)
        ],
        "provenance": {
            "mapping": dfg.provenance.mapping_id,
            "cases": list(dfg.provenance.case_ids),
        },
    }


def dumps(dfg: Dfg) -> str:
    return json.dumps(to_json_dict(dfg), indent=2) + "\n"


def from_json_dict(data: dict) -> Dfg:
    from .stats import NodeStats

    nodes = frozenset(entry["activity"] for entry in data["nodes"])
    node_stats: dict[str, NodeStats] = {}
    for entry in data["nodes"]:
        if "stats" in entry:
            node_stats[entry["activity"]] = NodeStats(**entry["stats"])
    edges = {(e["src"], e["dst"]): int(e["count"]) for e in data["edges"]}
    prov = data.get("provenance", {})
    return Dfg(
        nodes=nodes,
        edges=edges,
        provenance=Provenance(prov.get("mapping", ""), tuple(prov.get("cases", ()))),
        node_stats=node_stats or None,
    )
