"""Template compression: replace repeated pattern instances by instance nodes.

Each chosen instance of a template collapses to one node of type
``template:<id>``. Edges leaving an instance are kept (same edge id) and
re-attached to its instance node with a ``src_port``/``dst_port`` property
naming the pattern node they belong to. The instance record keeps the member
nodes and the original edge records, so :func:`expand` restores the graph
exactly; node types of exact-mode templates are taken from the template
definition, so editing a template changes every instance on expansion.

Templatizing a :class:`TemplatizedGraph` again (typically with patterns
re-mined on its residual) composes instance nodes into larger templates.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Sequence

from dtgraph.errors import IntegrityError, TemplateError
from dtgraph.graph import DST_PORT, SRC_PORT, Edge, Node, PropertyGraph
from dtgraph.miner.dfscode import code_key
from dtgraph.miner.gspan import Pattern
from dtgraph.miner.matching import EXACT, DataIndex, Embedding, embeddings
from dtgraph.ontology import Taxonomy

TEMPLATE_TYPE_PREFIX = "template:"
DEFAULT_MAX_TEMPLATES = 16


@dataclass
class Template:
    id: str
    pattern: Pattern
    ports: list[int] = field(default_factory=list)
    instances: list[Embedding] = field(default_factory=list)


@dataclass
class InstanceRecord:
    node_id: str
    template_id: str
    members: list[Node]
    internal: list[Edge]  # one per pattern edge, in code order
    boundary: list[Edge]  # original records of every other edge touching a member

    def to_dict(self) -> dict:
        return {
            "node": self.node_id,
            "members": [n.to_dict() for n in self.members],
            "internal": [e.to_dict() for e in self.internal],
            "boundary": [e.to_dict() for e in self.boundary],
        }


@dataclass
class TemplatizedGraph:
    residual: PropertyGraph
    templates: list[Template] = field(default_factory=list)
    instance_nodes: dict[str, InstanceRecord] = field(default_factory=dict)

    def template(self, tid: str) -> Template:
        for t in self.templates:
            if t.id == tid:
                return t
        raise IntegrityError(f"unknown template {tid!r}")

    def records_of(self, tid: str) -> list[InstanceRecord]:
        return [r for r in self.instance_nodes.values() if r.template_id == tid]

    def to_dict(self) -> dict:
        return {
            "templates": [
                {
                    "id": t.id,
                    "mode": t.pattern.mode,
                    "code": [list(x) for x in t.pattern.code],
                    "support": t.pattern.support,
                    "ports": list(t.ports),
                    "instances": [list(e) for e in t.instances],
                    "records": [r.to_dict() for r in self.records_of(t.id)],
                }
                for t in self.templates
            ],
            "residual": self.residual.to_dict(),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> TemplatizedGraph:
        residual = PropertyGraph.from_dict(doc["residual"])
        out = cls(residual)
        for t in doc.get("templates", []):
            pattern = Pattern(t["code"], int(t.get("support", 0)), [], t.get("mode", EXACT))
            out.templates.append(Template(t["id"], pattern, list(t.get("ports", [])),
                                          [tuple(e) for e in t.get("instances", [])]))
            for r in t.get("records", []):
                out.instance_nodes[r["node"]] = InstanceRecord(
                    r["node"], t["id"],
                    [_node_from_dict(n) for n in r["members"]],
                    [_edge_from_dict(e) for e in r["internal"]],
                    [_edge_from_dict(e) for e in r["boundary"]],
                )
        return out


def _node_from_dict(d: dict) -> Node:
    g = PropertyGraph()
    g.add_node(d["name"], d["type"], d.get("tier", 1), d.get("props"), d.get("prov"), id=d["id"])
    return g.node(d["id"])


def _edge_from_dict(d: dict) -> Edge:
    from dtgraph.graph import _check_prov, _check_props, _check_tier

    return Edge(d["id"], d["src"], d["dst"], d["rel"], _check_tier(d.get("tier", 1)),
                _check_props(d.get("props")), _check_prov(d.get("prov")))


def select_instances(pattern: Pattern, embeddings: Sequence[Embedding] | None = None) -> list[Embedding]:
    """Greedy pairwise node-disjoint subset, scanning embeddings in sorted order."""
    if embeddings is None:
        embeddings = pattern.embeddings
    taken: set[str] = set()
    chosen = []
    for emb in sorted(embeddings):
        if taken.isdisjoint(emb):
            chosen.append(tuple(emb))
            taken.update(emb)
    return chosen


def score_pattern(pattern: Pattern, embeddings: Sequence[Embedding] | None = None) -> int:
    """Elements saved by templating: (nodes + edges) x (disjoint instances - 1)."""
    k = len(select_instances(pattern, embeddings))
    return (pattern.num_nodes + pattern.num_edges) * max(k - 1, 0)


def _validate_embeddings(pattern: Pattern, index: DataIndex, taxonomy: Taxonomy | None) -> None:
    tax = taxonomy or Taxonomy.empty()
    for emb in pattern.embeddings:
        if len(emb) != pattern.num_nodes or len(set(emb)) != len(emb):
            raise TemplateError(f"{pattern!r}: embedding {emb} is not an injective assignment")
        for k, nid in enumerate(emb):
            if nid not in index.types:
                raise TemplateError(f"{pattern!r}: embedding references unknown node {nid!r}")
            t, lab = index.types[nid], pattern.labels[k]
            if not (t == lab or (pattern.mode != EXACT and tax.is_subtype(t, lab, lenient=True))):
                raise TemplateError(f"{pattern!r}: node {nid!r} has type {t!r}, pattern expects {lab!r}")
        for i, j, le in pattern.edge_list:
            if le not in index.rels.get(emb[i], {}).get(emb[j], ()):
                raise TemplateError(f"{pattern!r}: no {le!r} edge between {emb[i]!r} and {emb[j]!r}")


def _fresh(graph: PropertyGraph, base: str) -> str:
    cand, k = base, 1
    while graph.has_node(cand):
        k += 1
        cand = f"{base}~{k}"
    return cand


def _apply(tg: TemplatizedGraph, pattern: Pattern, instances: list[Embedding]) -> Template:
    g = tg.residual
    tid = f"T{len(tg.templates) + 1}"
    taken = {t.id for t in tg.templates}
    while tid in taken:
        tid += "'"
    plan = []
    member_pos: dict[str, tuple[int, int]] = {}
    for k, emb in enumerate(instances):
        for pos, nid in enumerate(emb):
            member_pos[nid] = (k, pos)
    for k, emb in enumerate(instances):
        internal_ids = []
        for i, j, le in pattern.edge_list:
            a, b = emb[i], emb[j]
            hits = sorted(
                e.id for e in g.incident_edges(a)
                if e.relation == le and {e.src, e.dst} == {a, b} and e.id not in internal_ids
            )
            if not hits:
                raise TemplateError(f"instance {emb} lacks pattern edge {a!r} -[{le}]- {b!r}")
            internal_ids.append(hits[0])
        boundary_ids = sorted({
            e.id for nid in emb for e in g.incident_edges(nid) if e.id not in set(internal_ids)
        })
        plan.append((emb, internal_ids, boundary_ids))

    ports: set[int] = set()
    records = []
    boundary_all: dict[str, Edge] = {}
    for k, (emb, internal_ids, boundary_ids) in enumerate(plan):
        members = [g.node(nid) for nid in emb]
        internal = [g.edge(eid) for eid in internal_ids]
        boundary = [g.edge(eid) for eid in boundary_ids]
        for e in boundary:
            boundary_all[e.id] = e
            for end in (e.src, e.dst):
                if end in member_pos and member_pos[end][0] == k:
                    ports.add(member_pos[end][1])
        inst_id = _fresh(g, f"{tid}.{k + 1}")
        records.append(InstanceRecord(inst_id, tid, members, internal, boundary))

    for rec in records:
        for m in rec.members:
            g.remove_node(m.id)
    for k, rec in enumerate(records):
        m = rec.members
        g.add_node(
            f"{tid}#{k + 1}",
            TEMPLATE_TYPE_PREFIX + tid,
            min(n.tier for n in m),
            {"template": tid, "instance": k + 1},
            frozenset().union(*(n.provenance for n in m)),
            id=rec.node_id,
        )
        tg.instance_nodes[rec.node_id] = rec
    for e in boundary_all.values():
        props = dict(e.properties)
        src, dst = e.src, e.dst
        if src in member_pos:
            props[SRC_PORT] = member_pos[src][1]
            src = records[member_pos[src][0]].node_id
        if dst in member_pos:
            props[DST_PORT] = member_pos[dst][1]
            dst = records[member_pos[dst][0]].node_id
        g.add_edge(src, dst, e.relation, e.tier, props, e.provenance, id=e.id)

    template = Template(tid, pattern, sorted(ports), list(instances))
    tg.templates.append(template)
    return template


def templatize(
    abox: PropertyGraph | TemplatizedGraph,
    patterns: Sequence[Pattern],
    max_templates: int = DEFAULT_MAX_TEMPLATES,
    taxonomy: Taxonomy | None = None,
) -> TemplatizedGraph:
    """Greedily promote the best-scoring patterns to templates.

    Scores only shrink as the residual loses nodes, so a lazy priority queue
    over the initial scores picks the true current best at every step.
    """
    if isinstance(abox, TemplatizedGraph):
        tg = TemplatizedGraph(abox.residual.copy(), list(abox.templates), dict(abox.instance_nodes))
    else:
        tg = TemplatizedGraph(abox.copy())
    index = DataIndex(tg.residual)
    for p in patterns:
        _validate_embeddings(p, index, taxonomy)

    heap = []
    for idx, p in enumerate(patterns):
        s = score_pattern(p)
        if s > 0:
            heap.append((-s, code_key(p.code), idx))
    heapq.heapify(heap)
    added = 0
    while heap and added < max_templates:
        neg, ck, idx = heapq.heappop(heap)
        p = patterns[idx]
        embs = embeddings(p, index, p.mode, taxonomy)
        chosen = select_instances(p, embs)
        s = score_pattern(p, chosen)
        if s <= 0:
            continue
        if heap and (-s, ck, idx) > heap[0]:
            heapq.heappush(heap, (-s, ck, idx))
            continue
        _apply(tg, p, chosen)
        added += 1
        index = DataIndex(tg.residual)
    return tg


def _port(edge: Edge, key: str, template: Template, rec: InstanceRecord) -> int:
    port = edge.properties.get(key)
    if not isinstance(port, int) or isinstance(port, bool) or not 0 <= port < template.pattern.num_nodes:
        raise IntegrityError(
            f"edge {edge.id!r} at instance {rec.node_id!r}: invalid port {port!r}"
        )
    return port


def expand(templatized: TemplatizedGraph) -> PropertyGraph:
    """Replace every instance node by a copy of its template, newest template first."""
    g = templatized.residual.copy()
    known = {t.id for t in templatized.templates}
    for rec in templatized.instance_nodes.values():
        if rec.template_id not in known:
            raise IntegrityError(f"instance {rec.node_id!r} references unknown template {rec.template_id!r}")
    expected = set(templatized.instance_nodes)
    for n in g.nodes():
        if n.type_term.startswith(TEMPLATE_TYPE_PREFIX) and n.id not in expected:
            raise IntegrityError(f"instance node {n.id!r} has no instance record")

    for template in reversed(templatized.templates):
        records = templatized.records_of(template.id)
        pattern = template.pattern
        originals: dict[str, Edge] = {}
        for rec in records:
            if not g.has_node(rec.node_id):
                raise IntegrityError(f"instance node {rec.node_id!r} is missing")
            if len(rec.members) != pattern.num_nodes or len(rec.internal) != pattern.num_edges:
                raise IntegrityError(f"instance {rec.node_id!r} does not fit template {template.id!r}")
            stored = {e.id: e for e in rec.boundary}
            for e in g.incident_edges(rec.node_id):
                if e.id not in stored:
                    raise IntegrityError(f"edge {e.id!r} at {rec.node_id!r} has no boundary record")
                orig = stored[e.id]
                for key, end, orig_end in ((SRC_PORT, e.src, orig.src), (DST_PORT, e.dst, orig.dst)):
                    if end != rec.node_id:
                        continue
                    port = _port(e, key, template, rec)
                    if rec.members[port].id != orig_end:
                        raise IntegrityError(
                            f"edge {e.id!r}: port {port} of {rec.node_id!r} does not match its record"
                        )
            missing = set(stored) - {e.id for e in g.incident_edges(rec.node_id)}
            if missing:
                raise IntegrityError(f"boundary edges {sorted(missing)} of {rec.node_id!r} are missing")
            originals.update(stored)
        for rec in records:
            g.remove_node(rec.node_id)
        for rec in records:
            for pos, m in enumerate(rec.members):
                type_term = pattern.labels[pos] if pattern.mode == EXACT else m.type_term
                g.add_node(m.name, type_term, m.tier, m.properties, m.provenance, id=m.id)
            for (i, j, le), e in zip(pattern.edge_list, rec.internal):
                ends = {rec.members[i].id, rec.members[j].id}
                if {e.src, e.dst} != ends:
                    raise IntegrityError(f"internal edge {e.id!r} of {rec.node_id!r} does not fit the template")
                g.add_edge(e.src, e.dst, le, e.tier, e.properties, e.provenance, id=e.id)
        for e in originals.values():
            g.add_edge(e.src, e.dst, e.relation, e.tier, e.properties, e.provenance, id=e.id)
    g.check_integrity()
    return g


@dataclass(frozen=True)
class CompressionStats:
    nodes_before: int
    edges_before: int
    nodes_after: int
    edges_after: int
    templates: int
    instances: int
    template_elements: int
    ratio: float

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def compression_stats(before: PropertyGraph, after: PropertyGraph | TemplatizedGraph) -> CompressionStats:
    """Element counts and reduction ratio ``1 - after/before`` (elements = nodes + edges).

    For a templatized graph "after" is its residual; the template definitions
    are reported separately as ``template_elements``.
    """
    if isinstance(after, TemplatizedGraph):
        residual, templates = after.residual, after.templates
        instances = len(after.instance_nodes)
    else:
        residual, templates, instances = after, [], 0
    b = before.number_of_nodes() + before.number_of_edges()
    a = residual.number_of_nodes() + residual.number_of_edges()
    return CompressionStats(
        before.number_of_nodes(), before.number_of_edges(),
        residual.number_of_nodes(), residual.number_of_edges(),
        len(templates), instances,
        sum(t.pattern.num_nodes + t.pattern.num_edges for t in templates),
        0.0 if b == 0 else 1 - a / b,
    )
