"""Report figures and the delimited pattern summary.

Figures are rendered headless (Agg) and saved without timestamps so the
same inputs produce byte-identical files.
"""

from __future__ import annotations

import csv
from collections import Counter
from os import PathLike
from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import networkx as nx  # noqa: E402

from dtgraph.export import TIER_COLORS, instance_colors, leaf_instances  # noqa: E402
from dtgraph.graph import PropertyGraph  # noqa: E402
from dtgraph.miner.gspan import Pattern  # noqa: E402
from dtgraph.template import TemplatizedGraph, expand, score_pattern  # noqa: E402

STYLE = {
    "font.size": 9,
    "axes.labelsize": 9,
    "axes.titlesize": 10,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "savefig.dpi": 120,
    "svg.hashsalt": "dtgraph",
}

PNG_METADATA = {"Software": None}

CSV_COLUMNS = ("rank", "edges", "nodes", "support", "score", "node_labels", "relations", "code")


def pattern_rows(patterns: Sequence[Pattern]) -> list[dict]:
    rows = []
    for rank, p in enumerate(patterns, start=1):
        rows.append({
            "rank": rank,
            "edges": p.num_edges,
            "nodes": p.num_nodes,
            "support": p.support,
            "score": score_pattern(p),
            "node_labels": ";".join(p.labels),
            "relations": ";".join(le for _, _, le in p.edge_list),
            "code": " ".join(f"({t.i},{t.j},{t.li},{t.le},{t.lj})" for t in p.code),
        })
    return rows


def write_pattern_csv(patterns: Sequence[Pattern], path: str | PathLike) -> Path:
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS, lineterminator="\n")
        writer.writeheader()
        writer.writerows(pattern_rows(patterns))
    return path


def _save(fig, path: Path) -> Path:
    fig.savefig(path, metadata=PNG_METADATA, bbox_inches="tight")
    plt.close(fig)
    return path


def plot_support(patterns: Sequence[Pattern], path: str | PathLike, min_support: int | None = None) -> Path:
    """Pattern count per size (left) and support against size (right)."""
    path = Path(path)
    with plt.rc_context(STYLE):
        fig, (left, right) = plt.subplots(1, 2, figsize=(8.0, 3.2))
        sizes = Counter(p.num_edges for p in patterns)
        xs = sorted(sizes)
        left.bar(xs, [sizes[x] for x in xs], color="#4c78a8", width=0.7)
        left.set_xlabel("pattern edges")
        left.set_ylabel("frequent patterns")
        left.set_title("patterns per size")
        if xs:
            left.set_xticks(xs)

        pts = Counter((p.num_edges, p.support) for p in patterns)
        if pts:
            ex, sy = zip(*sorted(pts))
            area = [12 + 6 * pts[k] ** 0.5 for k in sorted(pts)]
            right.scatter(ex, sy, s=area, color="#f58518", alpha=0.7, edgecolors="none")
            right.set_xticks(sorted(set(ex)))
        if min_support is not None:
            right.axhline(min_support, color="0.4", lw=0.8, ls="--", label=f"min support {min_support}")
            right.legend(loc="upper right", frameon=False)
        right.set_xlabel("pattern edges")
        right.set_ylabel("MNI support")
        right.set_title("support by size")
        fig.tight_layout()
        return _save(fig, path)


def _nx_graph(graph: PropertyGraph) -> nx.Graph:
    g = nx.MultiDiGraph() if graph.directed else nx.MultiGraph()
    for n in graph.nodes():
        g.add_node(n.id)
    for e in graph.edges():
        g.add_edge(e.src, e.dst, key=e.id)
    return g


def plot_instances(templatized: TemplatizedGraph, path: str | PathLike, seed: int = 0) -> Path:
    """The expanded ABox; every template instance in its own colour, the rest by tier."""
    path = Path(path)
    graph = expand(templatized)
    colors = instance_colors(templatized)
    g = _nx_graph(graph)
    pos = nx.spring_layout(g, seed=seed, k=1.6 / max(1, g.number_of_nodes()) ** 0.5)
    ids = graph.node_ids()
    fill = [colors.get(nid, TIER_COLORS[int(graph.node(nid).tier)]) for nid in ids]
    sizes = [70 if nid in colors else 30 for nid in ids]
    with plt.rc_context(STYLE):
        side = 4.0 + min(6.0, graph.number_of_nodes() / 40)
        fig, ax = plt.subplots(figsize=(side, side))
        nx.draw_networkx_edges(g, pos, ax=ax, edge_color="0.75", width=0.6)
        nx.draw_networkx_nodes(g, pos, nodelist=ids, node_color=fill, node_size=sizes,
                               linewidths=0.4, edgecolors="0.3", ax=ax)
        if graph.number_of_nodes() <= 60:
            labels = {nid: graph.node(nid).name for nid in ids}
            nx.draw_networkx_labels(g, pos, labels, font_size=6, ax=ax)
        leaf = len(leaf_instances(templatized))
        ax.set_title(f"templates: {len(templatized.templates)}, leaf instances: {leaf}")
        ax.set_axis_off()
        fig.tight_layout()
        return _save(fig, path)


def render_report(
    patterns: Sequence[Pattern],
    templatized: TemplatizedGraph | None,
    outdir: str | PathLike,
    min_support: int | None = None,
    seed: int = 0,
) -> list[Path]:
    """Write patterns.csv, support.png and (with templates) instances.png into ``outdir``."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written = [
        write_pattern_csv(patterns, outdir / "patterns.csv"),
        plot_support(patterns, outdir / "support.png", min_support),
    ]
    if templatized is not None:
        written.append(plot_instances(templatized, outdir / "instances.png", seed))
    return written
