"""JSON persistence plus GraphML and DOT export."""

from __future__ import annotations

import colorsys
import json
import xml.etree.ElementTree as ET
from os import PathLike
from typing import Any

from dtgraph.errors import ValidationError
from dtgraph.graph import PropertyGraph

TIER_COLORS = {1: "#4c78a8", 2: "#f2cf5b", 3: "#54a24b", 4: "#e45756"}
INSTANCE_PALETTE = [
    "#e6194b", "#3cb44b", "#4363d8", "#f58231", "#911eb4", "#42d4f4", "#f032e6",
    "#bfef45", "#fabed4", "#469990", "#dcbeff", "#9a6324", "#800000", "#aaffc3",
    "#808000", "#000075",
]

FORMATS = ("json", "graphml", "dot")


def dump_json(doc: Any, path: str | PathLike) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True, ensure_ascii=False)
        fh.write("\n")


def load_json(path: str | PathLike) -> Any:
    with open(path, encoding="utf-8") as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path}: invalid JSON ({exc.msg}, line {exc.lineno})") from None


def save_graph(graph: PropertyGraph, path: str | PathLike) -> None:
    dump_json(graph.to_dict(), path)


def load_graph(path: str | PathLike) -> PropertyGraph:
    return PropertyGraph.from_dict(load_json(path))


def to_graphml(graph: PropertyGraph) -> str:
    ns = "http://graphml.graphdrawing.org/xmlns"
    root = ET.Element("graphml", xmlns=ns)
    keys = [
        ("d_name", "node", "name", "string"),
        ("d_type", "node", "type", "string"),
        ("d_tier", "node", "tier", "int"),
        ("d_rel", "edge", "rel", "string"),
        ("d_etier", "edge", "tier", "int"),
    ]
    for kid, target, name, kind in keys:
        ET.SubElement(root, "key", id=kid, attrib={"for": target, "attr.name": name, "attr.type": kind})
    body = ET.SubElement(root, "graph", id="G", edgedefault="directed" if graph.directed else "undirected")
    for n in graph.nodes():
        el = ET.SubElement(body, "node", id=n.id)
        for kid, value in (("d_name", n.name), ("d_type", n.type_term), ("d_tier", int(n.tier))):
            ET.SubElement(el, "data", key=kid).text = str(value)
    for e in graph.edges():
        el = ET.SubElement(body, "edge", id=e.id, source=e.src, target=e.dst)
        ET.SubElement(el, "data", key="d_rel").text = e.relation
        ET.SubElement(el, "data", key="d_etier").text = str(int(e.tier))
    ET.indent(root)
    return '<?xml version="1.0" encoding="UTF-8"?>\n' + ET.tostring(root, encoding="unicode") + "\n"


def _q(text: str) -> str:
    return '"' + str(text).replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(graph: PropertyGraph, node_colors: dict[str, str] | None = None,
           clusters: dict[str, list[str]] | None = None) -> str:
    """DOT text; nodes coloured by tier unless ``node_colors`` overrides them."""
    kind, arrow = ("digraph", "->") if graph.directed else ("graph", "--")
    lines = [f"{kind} abox {{", "  node [style=filled, fontname=Helvetica];"]
    node_colors = node_colors or {}
    in_cluster = set()
    for k, (label, members) in enumerate((clusters or {}).items()):
        lines.append(f"  subgraph cluster_{k} {{")
        lines.append(f"    label={_q(label)};")
        color = node_colors.get(members[0]) if members else None
        if color:
            lines.append(f"    color={_q(color)};")
        for nid in members:
            lines.append(f"    {_q(nid)};")
            in_cluster.add(nid)
        lines.append("  }")
    for n in graph.nodes():
        color = node_colors.get(n.id, TIER_COLORS[int(n.tier)])
        lines.append(f"  {_q(n.id)} [label={_q(n.name + chr(10) + n.type_term)}, fillcolor={_q(color)}];")
    for e in graph.edges():
        lines.append(f"  {_q(e.src)} {arrow} {_q(e.dst)} [label={_q(e.relation)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def instance_color(k: int) -> str:
    """Distinct colour for the k-th instance; golden-ratio hues past the palette."""
    if k < len(INSTANCE_PALETTE):
        return INSTANCE_PALETTE[k]
    hue = (k * 0.618033988749895) % 1.0
    r, g, b = colorsys.hsv_to_rgb(hue, 0.65, 0.85 - 0.25 * ((k // 7) % 2))
    return "#{:02x}{:02x}{:02x}".format(round(r * 255), round(g * 255), round(b * 255))


def leaf_instances(templatized) -> list[tuple[str, list[str]]]:
    """(instance node id, member ids) for instances whose members are ABox nodes."""
    from dtgraph.template import TEMPLATE_TYPE_PREFIX

    out = []
    for rec in templatized.instance_nodes.values():
        members = [m.id for m in rec.members if not m.type_term.startswith(TEMPLATE_TYPE_PREFIX)]
        if members:
            out.append((rec.node_id, members))
    return out


def instance_colors(templatized) -> dict[str, str]:
    """Node id of the expanded graph -> colour of the leaf instance holding it."""
    return {nid: instance_color(k)
            for k, (_, members) in enumerate(leaf_instances(templatized)) for nid in members}


def templatized_to_dot(templatized) -> str:
    """Expanded graph with every leaf-level template instance in its own colour."""
    from dtgraph.template import expand

    records = templatized.instance_nodes
    clusters = {f"{records[node].template_id} instance {node}": members
                for node, members in leaf_instances(templatized)}
    return to_dot(expand(templatized), instance_colors(templatized), clusters)
