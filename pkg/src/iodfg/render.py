"""Graph coloring and Graphviz-DOT emission.

Two coloring strategies: a five-step blue ramp driven by a node statistic
(relative duration or bytes moved), and a green/red/neutral partition that
marks elements exclusive to one of two disjoint case subsets.  Output is
deterministic DOT text, or the graph JSON extended with style fields.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .dfg import Dfg, exclusive_elements, ordered_edges, ordered_nodes, to_json_dict
from .errors import MissingStats, NotAPartition, SpecMismatch
from .mapping import END, START

#: Blue ramp, lightest to darkest.
RAMP = ("#deebf7", "#c6dbef", "#9ecae1", "#6baed6", "#3182bd")
GREEN = "#2ca25f"
RED = "#de2d26"
NEUTRAL = "white"
SENTINEL_FILL = "#d9d9d9"
EDGE_NEUTRAL = "black"

START_GLYPH = "•"  # bullet
END_GLYPH = "■"  # filled square

COLOR_METRICS = ("rd", "bytes")


@dataclass(frozen=True)
class StyledDfg:
    dfg: Dfg
    node_fill: dict[str, str]
    edge_color: dict[tuple[str, str], str]
    legend: str


def _ramp_step(values: list[float], value: float) -> int:
    # rank-based quintile; equal values share a step, ties land mid-ramp
    n = len(values)
    if n <= 1:
        return 2
    lo = sum(1 for x in values if x < value)
    hi = sum(1 for x in values if x <= value) - 1
    fraction = (lo + hi) / 2 / (n - 1)
    return min(4, int(fraction * 5))


def color_by_stat(dfg: Dfg, metric: str = "rd") -> StyledDfg:
    """Shade nodes on the blue ramp by their statistic's rank quintile."""
    if metric not in COLOR_METRICS:
        raise ValueError(f"unknown color metric {metric!r}; expected one of {COLOR_METRICS}")
    if dfg.node_stats is None:
        raise MissingStats("graph is not annotated with node statistics")
    regular = [n for n in dfg.nodes if n not in (START, END)]
    missing = [n for n in regular if n not in dfg.node_stats]
    if missing:
        raise MissingStats(f"no statistics for nodes: {sorted(missing)}")
    values = {n: float(getattr(dfg.node_stats[n], metric)) for n in regular}
    pool = list(values.values())
    node_fill = {}
    for node in dfg.nodes:
        if node in (START, END):
            node_fill[node] = SENTINEL_FILL
        else:
            node_fill[node] = RAMP[_ramp_step(pool, values[node])]
    edge_color = {edge: EDGE_NEUTRAL for edge in dfg.edges}
    return StyledDfg(
        dfg=dfg,
        node_fill=node_fill,
        edge_color=edge_color,
        legend=f"blue ramp by {metric} rank quintile (light to dark)",
    )


def color_by_partition(full: Dfg, green: Dfg, red: Dfg) -> StyledDfg:
    """Mark elements exclusive to the green or red sub-graph; rest neutral."""
    for sub, name in ((green, "green"), (red, "red")):
        if sub.provenance.mapping_id != full.provenance.mapping_id:
            raise SpecMismatch(f"{name} graph was built under a different mapping")
    green_cases = set(green.provenance.case_ids)
    red_cases = set(red.provenance.case_ids)
    overlap = green_cases & red_cases
    if overlap:
        raise NotAPartition(f"cases in both subsets: {sorted(overlap)}")
    full_cases = set(full.provenance.case_ids)
    stray = (green_cases | red_cases) - full_cases
    if stray:
        raise NotAPartition(f"cases outside the full log: {sorted(stray)}")
    exclusive = exclusive_elements(green, red)
    node_fill = {}
    for node in full.nodes:
        if node in exclusive.green_nodes:
            node_fill[node] = GREEN
        elif node in exclusive.red_nodes:
            node_fill[node] = RED
        else:
            node_fill[node] = NEUTRAL
    edge_color = {}
    for edge in full.edges:
        if edge in exclusive.green_edges:
            edge_color[edge] = GREEN
        elif edge in exclusive.red_edges:
            edge_color[edge] = RED
        else:
            edge_color[edge] = EDGE_NEUTRAL
    return StyledDfg(
        dfg=full,
        node_fill=node_fill,
        edge_color=edge_color,
        legend="green: exclusive to green subset; red: exclusive to red subset",
    )


def _display(node: str, ascii_sentinels: bool) -> str:
    if node == START:
        return START if ascii_sentinels else START_GLYPH
    if node == END:
        return END if ascii_sentinels else END_GLYPH
    return node


def _escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def emit_dot(styled: StyledDfg, ascii_sentinels: bool = False) -> str:
    """Deterministic DOT text for a styled graph."""
    dfg = styled.dfg
    lines = ["digraph {"]
    for node in ordered_nodes(dfg):
        shown = _escape(_display(node, ascii_sentinels))
        label = shown
        if dfg.node_stats and node in dfg.node_stats:
            stats = dfg.node_stats[node]
            label = "\\n".join([shown, _escape(stats.load_label()), _escape(stats.dr_label())])
        lines.append(
            f'  "{shown}" [label="{label}", style=filled, fillcolor="{styled.node_fill[node]}"];'
        )
    for (src, dst), count in ordered_edges(dfg):
        lines.append(
            f'  "{_escape(_display(src, ascii_sentinels))}" -> '
            f'"{_escape(_display(dst, ascii_sentinels))}" '
            f'[label="{count}", color="{styled.edge_color[(src, dst)]}"];'
        )
    lines.append("}")
    return "\n".join(lines) + "\n"


def styled_json(styled: StyledDfg, ascii_sentinels: bool = False) -> str:
    """Graph JSON plus fill, edge color and legend fields."""
    data = to_json_dict(styled.dfg)
    for entry in data["nodes"]:
        entry["fill"] = styled.node_fill[entry["activity"]]
    for entry in data["edges"]:
        entry["color"] = styled.edge_color[(entry["src"], entry["dst"])]
    data["legend"] = styled.legend
    return json.dumps(data, indent=2) + "\n"
