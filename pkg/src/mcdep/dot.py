"""Deterministic DOT rendering of dependency graphs.

Output is byte-stable: isolated nodes are listed in id order, edges in
(source label, target label, edge label) order, and nothing else varies.
"""

from __future__ import annotations

from .analysis import DependencyGraph
from .errors import InvalidArgumentError
from .timemodel import ExpandedTimeGraph


def export_dot(graph: DependencyGraph | ExpandedTimeGraph) -> str:
    if isinstance(graph, DependencyGraph):
        names = {cid: name for cid, name in graph.nodes}
        node_order = [names[cid] for cid, _ in sorted(graph.nodes)]
        edges = [
            (names[e.source], names[e.target], e.label) for e in graph.edges
        ]
    elif isinstance(graph, ExpandedTimeGraph):
        node_order = [graph.name_of(node) for node in sorted(graph.nodes)]
        edges = [
            (graph.name_of(src), graph.name_of(dst), "time")
            for src, dst in graph.edges
        ]
    else:
        raise InvalidArgumentError(f"cannot render {type(graph).__name__} as DOT")

    connected = {name for src, dst, _ in edges for name in (src, dst)}
    lines = ["digraph G {"]
    for name in node_order:
        if name not in connected:
            lines.append(f'  "{name}";')
    for src, dst, label in sorted(edges):
        lines.append(f'  "{src}" -> "{dst}" [label="{label}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
