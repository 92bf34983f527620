"""In-memory labeled property graph with tier annotations.

The graph is the assertional store (ABox) of a plant: nodes carry a display
name, a type term and a tier; edges carry a relation label. Identity of an
element is its opaque ``id``; names never act as keys here (merging by name
is the job of :mod:`dtgraph.merge`).
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Iterable, Iterator, Mapping

from dtgraph.errors import DuplicateError, IntegrityError, ValidationError

SOURCES = ("plc", "position", "io")

# Reserved edge properties marking which pattern node an instance-node edge
# attaches to (see dtgraph.template).
SRC_PORT = "src_port"
DST_PORT = "dst_port"

Scalar = str | int | float | bool


class Tier(IntEnum):
    DOMAIN_INTERNAL = 1
    INTER_DOMAIN = 2
    SYSTEM_OF_SYSTEMS = 3
    ENVIRONMENT = 4


def _check_props(props: Mapping[str, object] | None) -> dict[str, Scalar]:
    out: dict[str, Scalar] = {}
    for key, value in (props or {}).items():
        if not isinstance(key, str) or not key:
            raise ValidationError(f"property keys must be non-empty text, got {key!r}")
        if not isinstance(value, (str, int, float, bool)):
            raise ValidationError(
                f"property {key!r} must be text, number or boolean, got {type(value).__name__}"
            )
        out[key] = value
    return out


def _check_prov(prov: Iterable[str] | None) -> frozenset[str]:
    tags = frozenset(prov or ())
    bad = tags - set(SOURCES)
    if bad:
        raise ValidationError(f"unknown provenance tag(s) {sorted(bad)}; expected {SOURCES}")
    return tags


def _check_tier(tier: int) -> Tier:
    try:
        return Tier(int(tier))
    except (ValueError, TypeError):
        raise ValidationError(f"tier must be one of 1..4, got {tier!r}") from None


@dataclass(frozen=True)
class Node:
    id: str
    name: str
    type_term: str
    tier: Tier = Tier.DOMAIN_INTERNAL
    properties: dict[str, Scalar] = field(default_factory=dict, compare=False)
    provenance: frozenset[str] = frozenset()

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "name": self.name,
            "type": self.type_term,
            "tier": int(self.tier),
            "props": dict(sorted(self.properties.items())),
            "prov": sorted(self.provenance),
        }


@dataclass(frozen=True)
class Edge:
    id: str
    src: str
    dst: str
    relation: str
    tier: Tier = Tier.DOMAIN_INTERNAL
    properties: dict[str, Scalar] = field(default_factory=dict, compare=False)
    provenance: frozenset[str] = frozenset()

    def other(self, node_id: str) -> str:
        return self.dst if node_id == self.src else self.src

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "src": self.src,
            "dst": self.dst,
            "rel": self.relation,
            "tier": int(self.tier),
            "props": dict(sorted(self.properties.items())),
            "prov": sorted(self.provenance),
        }


class PropertyGraph:
    """Labeled property graph with stable insertion order.

    Edges are undirected unless ``directed`` is set. Two edges with the same
    endpoints and relation are duplicates and rejected; distinct relations
    between the same pair coexist. Edges carrying port annotations (attached
    to template instance nodes) are exempt: one instance node may reach the
    same neighbour through several ports with one relation.
    """

    def __init__(self, directed: bool = False):
        self.directed = bool(directed)
        self._nodes: dict[str, Node] = {}
        self._edges: dict[str, Edge] = {}
        self._incident: dict[str, dict[str, None]] = {}
        self._edge_keys: dict[tuple, str] = {}
        self._node_seq = 0
        self._edge_seq = 0

    # -- construction -----------------------------------------------------

    def add_node(
        self,
        name: str,
        type_term: str,
        tier: int = 1,
        properties: Mapping[str, object] | None = None,
        provenance: Iterable[str] | None = None,
        *,
        id: str | None = None,
    ) -> str:
        if not isinstance(name, str) or not name.strip():
            raise ValidationError("node name must be non-empty")
        if not isinstance(type_term, str) or not type_term.strip():
            raise ValidationError(f"node {name!r}: type term must be non-empty")
        if id is None:
            id = self._fresh_id("n", self._nodes)
        elif id in self._nodes:
            raise DuplicateError(f"duplicate node id {id!r}")
        node = Node(id, name, type_term, _check_tier(tier), _check_props(properties), _check_prov(provenance))
        self._nodes[id] = node
        self._incident[id] = {}
        return id

    def add_edge(
        self,
        src: str,
        dst: str,
        relation: str,
        tier: int = 1,
        properties: Mapping[str, object] | None = None,
        provenance: Iterable[str] | None = None,
        *,
        id: str | None = None,
    ) -> str:
        for end in (src, dst):
            if end not in self._nodes:
                raise IntegrityError(f"edge endpoint {end!r} does not exist")
        if not isinstance(relation, str) or not relation.strip():
            raise ValidationError("edge relation must be non-empty")
        props = _check_props(properties)
        key = self._edge_key(src, dst, relation, props)
        if key is not None and key in self._edge_keys:
            raise DuplicateError(
                f"duplicate edge {src!r} -[{relation}]- {dst!r} (existing {self._edge_keys[key]!r})"
            )
        if id is None:
            id = self._fresh_id("e", self._edges)
        elif id in self._edges:
            raise DuplicateError(f"duplicate edge id {id!r}")
        edge = Edge(id, src, dst, relation, _check_tier(tier), props, _check_prov(provenance))
        self._edges[id] = edge
        if key is not None:
            self._edge_keys[key] = id
        self._incident[src][id] = None
        self._incident[dst][id] = None
        return id

    def remove_edge(self, edge_id: str) -> Edge:
        edge = self._edges.pop(edge_id)
        key = self._edge_key(edge.src, edge.dst, edge.relation, edge.properties)
        if key is not None:
            del self._edge_keys[key]
        self._incident[edge.src].pop(edge_id, None)
        self._incident[edge.dst].pop(edge_id, None)
        return edge

    def remove_node(self, node_id: str) -> Node:
        """Remove a node together with its incident edges."""
        for eid in list(self._incident[node_id]):
            self.remove_edge(eid)
        del self._incident[node_id]
        return self._nodes.pop(node_id)

    def has_edge(self, src: str, dst: str, relation: str) -> bool:
        return self._edge_key(src, dst, relation, {}) in self._edge_keys

    def _fresh_id(self, prefix: str, taken: Mapping[str, object]) -> str:
        while True:
            if prefix == "n":
                self._node_seq += 1
                cand = f"n{self._node_seq}"
            else:
                self._edge_seq += 1
                cand = f"e{self._edge_seq}"
            if cand not in taken:
                return cand

    def _edge_key(self, src: str, dst: str, relation: str, props: Mapping[str, object]) -> tuple | None:
        if SRC_PORT in props or DST_PORT in props:
            return None
        if not self.directed and dst < src:
            src, dst = dst, src
        return (src, dst, relation)

    # -- queries ----------------------------------------------------------

    def node(self, node_id: str) -> Node:
        return self._nodes[node_id]

    def edge(self, edge_id: str) -> Edge:
        return self._edges[edge_id]

    def has_node(self, node_id: str) -> bool:
        return node_id in self._nodes

    def nodes(self) -> Iterator[Node]:
        return iter(self._nodes.values())

    def edges(self) -> Iterator[Edge]:
        return iter(self._edges.values())

    def node_ids(self) -> list[str]:
        return list(self._nodes)

    def incident_edges(self, node_id: str) -> list[Edge]:
        return [self._edges[e] for e in self._incident[node_id]]

    def neighbors(self, node_id: str) -> list[str]:
        seen = dict.fromkeys(e.other(node_id) for e in self.incident_edges(node_id))
        return list(seen)

    def number_of_nodes(self) -> int:
        return len(self._nodes)

    def number_of_edges(self) -> int:
        return len(self._edges)

    def __len__(self) -> int:
        return len(self._nodes)

    def __repr__(self) -> str:
        kind = "directed" if self.directed else "undirected"
        return f"<PropertyGraph {kind} nodes={len(self._nodes)} edges={len(self._edges)}>"

    def copy(self) -> PropertyGraph:
        g = PropertyGraph(self.directed)
        for n in self.nodes():
            g.add_node(n.name, n.type_term, n.tier, n.properties, n.provenance, id=n.id)
        for e in self.edges():
            g.add_edge(e.src, e.dst, e.relation, e.tier, e.properties, e.provenance, id=e.id)
        return g

    def check_integrity(self) -> None:
        for e in self._edges.values():
            if e.src not in self._nodes or e.dst not in self._nodes:
                raise IntegrityError(f"edge {e.id!r} has a dangling endpoint")
        if sum(len(v) for v in self._incident.values()) != sum(
            1 if e.src == e.dst else 2 for e in self._edges.values()
        ):
            raise IntegrityError("incidence index out of sync with edge set")

    # -- serialization ----------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "directed": self.directed,
            "nodes": [n.to_dict() for n in self.nodes()],
            "edges": [e.to_dict() for e in self.edges()],
        }

    @classmethod
    def from_dict(cls, doc: Mapping) -> PropertyGraph:
        if not isinstance(doc, Mapping) or "nodes" not in doc:
            raise ValidationError("graph document must be an object with 'nodes' and 'edges'")
        g = cls(bool(doc.get("directed", False)))
        for i, n in enumerate(doc.get("nodes", [])):
            try:
                g.add_node(n["name"], n["type"], n.get("tier", 1), n.get("props"), n.get("prov"), id=str(n["id"]))
            except KeyError as exc:
                raise ValidationError(f"node {i}: missing field {exc.args[0]!r}") from None
        for i, e in enumerate(doc.get("edges", [])):
            try:
                g.add_edge(
                    str(e["src"]), str(e["dst"]), e["rel"], e.get("tier", 1), e.get("props"), e.get("prov"),
                    id=str(e["id"]),
                )
            except KeyError as exc:
                raise ValidationError(f"edge {i}: missing field {exc.args[0]!r}") from None
        return g


def project_tiers(graph: PropertyGraph, tiers: Iterable[int]) -> PropertyGraph:
    """Induced subgraph on nodes whose tier is in ``tiers``.

    Edges survive when their own tier is selected and both endpoints survive.
    """
    keep = {_check_tier(t) for t in tiers}
    out = PropertyGraph(graph.directed)
    for n in graph.nodes():
        if n.tier in keep:
            out.add_node(n.name, n.type_term, n.tier, n.properties, n.provenance, id=n.id)
    for e in graph.edges():
        if e.tier in keep and out.has_node(e.src) and out.has_node(e.dst):
            out.add_edge(e.src, e.dst, e.relation, e.tier, e.properties, e.provenance, id=e.id)
    return out


def connected_components(graph: PropertyGraph) -> list[list[str]]:
    """Weakly connected components, each in insertion order, listed by first node."""
    seen: set[str] = set()
    blocks = []
    for start in graph.node_ids():
        if start in seen:
            continue
        seen.add(start)
        block = [start]
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for v in graph.neighbors(u):
                if v not in seen:
                    seen.add(v)
                    block.append(v)
                    queue.append(v)
        blocks.append(block)
    return blocks


def is_finite_number(x: object) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool) and math.isfinite(x)
