"""Multi-level merge of partial source graphs into one ABox graph.

Pass one joins nodes whose normalized names agree and whose types are equal
or related by subsumption. Pass two (optional) additionally joins same-name
nodes whose types are siblings under a common ancestor other than ``Thing``.
Names must agree in both passes; the taxonomy only relaxes the type check.
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import asdict, dataclass, field
from typing import Sequence

from dtgraph.errors import ValidationError
from dtgraph.graph import SOURCES, Edge, Node, PropertyGraph, connected_components
from dtgraph.ontology import ROOT, Taxonomy


@dataclass(frozen=True)
class MergePolicy:
    case_fold: bool = True
    trim: bool = True
    priority: tuple[str, ...] = ("plc", "io", "position")
    semantic_merge: bool = True

    def __post_init__(self):
        if sorted(self.priority) != sorted(SOURCES):
            raise ValidationError(f"priority must be a permutation of {SOURCES}, got {self.priority}")

    def rank(self, provenance) -> int:
        ranks = [self.priority.index(s) for s in provenance]
        return min(ranks, default=len(self.priority))


DEFAULT_POLICY = MergePolicy()


@dataclass
class MergeReport:
    nodes_before: int = 0
    nodes_after: int = 0
    edges_before: int = 0
    edges_after: int = 0
    merged_by_label: int = 0
    merged_by_semantics: int = 0
    property_conflicts: list[dict] = field(default_factory=list)
    ambiguous: list[dict] = field(default_factory=list)
    component_count: int = 0

    def to_dict(self) -> dict:
        return asdict(self)


def normalize_name(text: str, policy: MergePolicy = DEFAULT_POLICY) -> str:
    if policy.trim:
        text = text.strip()
    if policy.case_fold:
        text = text.casefold()
    return text


def _types_comparable(a: str, b: str, taxonomy: Taxonomy) -> bool:
    return a == b or taxonomy.is_subtype(a, b, lenient=True) or taxonomy.is_subtype(b, a, lenient=True)


def node_equivalent(a: Node, b: Node, taxonomy: Taxonomy, policy: MergePolicy = DEFAULT_POLICY) -> bool:
    if normalize_name(a.name, policy) != normalize_name(b.name, policy):
        return False
    ta = taxonomy.canonical_type(a.type_term)
    tb = taxonomy.canonical_type(b.type_term)
    return _types_comparable(ta, tb, taxonomy)


def _most_specific(types: list[str], taxonomy: Taxonomy) -> tuple[str, bool]:
    """Deepest type if ``types`` form a chain, else their common ancestor."""
    distinct = sorted(set(types))
    deepest = max(distinct, key=lambda t: (taxonomy.depth(t, lenient=True), t))
    if all(taxonomy.is_subtype(deepest, t, lenient=True) for t in distinct):
        return deepest, True
    return taxonomy.generalize_all(distinct, lenient=True), False


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[max(ra, rb)] = min(ra, rb)
        return True


def _value_key(value) -> tuple:
    return (type(value).__name__, repr(value))


def _member_key(element: Node | Edge, policy: MergePolicy) -> tuple:
    props = tuple(sorted((k, _value_key(v)) for k, v in element.properties.items()))
    label = (element.name, element.type_term) if isinstance(element, Node) else (element.relation,)
    return (policy.rank(element.provenance), label, int(element.tier), props, tuple(sorted(element.provenance)))


def _merge_properties(members, policy: MergePolicy, conflicts: list[dict], owner: dict) -> dict:
    """Resolve each key by source priority; log keys with disagreeing values."""
    out = {}
    keys = sorted({k for m in members for k in m.properties})
    for key in keys:
        holders = [m for m in members if key in m.properties]  # members already priority-sorted
        chosen = holders[0]
        value = chosen.properties[key]
        distinct = {_value_key(m.properties[key]) for m in holders}
        if len(distinct) > 1:
            best = sorted(chosen.provenance, key=policy.priority.index)
            conflicts.append({**owner, "key": key, "chosen_source": best[0] if best else None})
        out[key] = value
    return out


def merge_graphs(
    parts: Sequence[PropertyGraph],
    taxonomy: Taxonomy | None = None,
    policy: MergePolicy = DEFAULT_POLICY,
) -> tuple[PropertyGraph, MergeReport]:
    taxonomy = taxonomy or Taxonomy.empty()
    kinds = {p.directed for p in parts}
    if len(kinds) > 1:
        raise ValidationError("cannot merge directed and undirected parts")
    directed = kinds.pop() if kinds else False
    for p in parts:
        p.check_integrity()

    items: list[Node] = []
    where: dict[tuple[int, str], int] = {}
    for pi, part in enumerate(parts):
        for node in part.nodes():
            where[(pi, node.id)] = len(items)
            items.append(node)
    ctype = [taxonomy.canonical_type(n.type_term) for n in items]
    report = MergeReport(
        nodes_before=len(items),
        edges_before=sum(p.number_of_edges() for p in parts),
    )

    by_name: dict[str, list[int]] = defaultdict(list)
    for k, node in enumerate(items):
        by_name[normalize_name(node.name, policy)].append(k)

    uf = _UnionFind(len(items))
    for group in by_name.values():
        for a, b in itertools.combinations(group, 2):
            if _types_comparable(ctype[a], ctype[b], taxonomy) and uf.union(a, b):
                report.merged_by_label += 1

    label_classes: dict[int, list[int]] = defaultdict(list)
    for k in range(len(items)):
        label_classes[uf.find(k)].append(k)
    for members in label_classes.values():
        merged, chain = _most_specific([ctype[k] for k in members], taxonomy)
        if not chain:
            report.ambiguous.append({
                "name": normalize_name(items[members[0]].name, policy),
                "types": sorted({ctype[k] for k in members}),
                "merged_type": merged,
            })
    report.ambiguous.sort(key=lambda d: (d["name"], d["types"]))

    if policy.semantic_merge:
        for group in by_name.values():
            for a, b in itertools.combinations(group, 2):
                if uf.find(a) == uf.find(b):
                    continue
                if taxonomy.generalize(ctype[a], ctype[b], lenient=True) != ROOT and uf.union(a, b):
                    report.merged_by_semantics += 1

    classes: dict[int, list[int]] = defaultdict(list)
    for k in range(len(items)):
        classes[uf.find(k)].append(k)

    resolved = []
    for members in classes.values():
        nodes = sorted((items[k] for k in members), key=lambda n: _member_key(n, policy))
        merged_type, _ = _most_specific([ctype[k] for k in members], taxonomy)
        norm = normalize_name(nodes[0].name, policy)
        signature = tuple(_member_key(n, policy) for n in nodes)
        resolved.append(((norm, merged_type, signature), members, nodes, merged_type))
    resolved.sort(key=lambda r: r[0])

    out = PropertyGraph(directed)
    new_id: dict[int, str] = {}
    width = len(str(len(resolved)))
    for idx, (_, members, nodes, merged_type) in enumerate(resolved):
        nid = f"n{idx:0{width}d}"
        for k in members:
            new_id[k] = nid
        props = _merge_properties(nodes, policy, report.property_conflicts, {"node": nid})
        out.add_node(
            nodes[0].name,
            merged_type,
            min(n.tier for n in nodes),
            props,
            frozenset().union(*(n.provenance for n in nodes)),
            id=nid,
        )

    edge_groups: dict[tuple, list[Edge]] = defaultdict(list)
    for pi, part in enumerate(parts):
        for e in part.edges():
            s, d = new_id[where[(pi, e.src)]], new_id[where[(pi, e.dst)]]
            if not directed and d < s:
                s, d = d, s
            edge_groups[(s, d, e.relation)].append(e)
    width = len(str(len(edge_groups)))
    for idx, key in enumerate(sorted(edge_groups)):
        s, d, rel = key
        edges = sorted(edge_groups[key], key=lambda e: _member_key(e, policy))
        props = _merge_properties(edges, policy, report.property_conflicts, {"edge": f"e{idx:0{width}d}"})
        out.add_edge(
            s, d, rel,
            min(e.tier for e in edges),
            props,
            frozenset().union(*(e.provenance for e in edges)),
            id=f"e{idx:0{width}d}",
        )

    report.nodes_after = out.number_of_nodes()
    report.edges_after = out.number_of_edges()
    report.component_count = len(connected_components(out))
    return out, report
