"""gSpan-style frequent subgraph mining over one large ABox graph.

Support is the minimum node image (MNI): for every pattern node count the
distinct ABox nodes it is mapped to over all embeddings, take the minimum.
It is anti-monotone, so the usual gSpan pruning applies unchanged.

Mining works on an undirected, loop-free view of the tier projection;
parallel edges with the same relation collapse in that view.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

from dtgraph.errors import MiningError, PatternOverflowError
from dtgraph.graph import PropertyGraph, project_tiers
from dtgraph.miner.dfscode import (
    DFSCode,
    EdgeTuple,
    code_key,
    code_to_graph,
    is_min,
    rightmost_path,
    tuple_key,
    validate_code,
)
from dtgraph.miner.matching import EXACT, GENERALIZED, MODES, Embedding, embeddings, mni_support
from dtgraph.ontology import ROOT, Taxonomy

DEFAULT_MAX_PATTERNS = 10_000


@dataclass(frozen=True)
class MiningParams:
    min_support: int = 2
    max_edges: int = 8
    mode: str = EXACT
    closed_only: bool = False
    tier_set: frozenset[int] = frozenset({1, 2})
    max_patterns: int = DEFAULT_MAX_PATTERNS

    def __post_init__(self):
        if not isinstance(self.min_support, int) or self.min_support < 2:
            raise MiningError(f"min_support must be an integer >= 2, got {self.min_support!r}")
        if not isinstance(self.max_edges, int) or self.max_edges < 1:
            raise MiningError(f"max_edges must be an integer >= 1, got {self.max_edges!r}")
        if self.mode not in MODES:
            raise MiningError(f"mode must be one of {MODES}, got {self.mode!r}")
        if not set(self.tier_set) <= {1, 2, 3, 4}:
            raise MiningError(f"tier_set must be a subset of 1..4, got {sorted(self.tier_set)}")
        if self.max_patterns < 1:
            raise MiningError("max_patterns must be positive")
        object.__setattr__(self, "tier_set", frozenset(self.tier_set))

    def to_dict(self) -> dict:
        return {
            "min_support": self.min_support,
            "max_edges": self.max_edges,
            "mode": self.mode,
            "closed_only": self.closed_only,
            "tiers": sorted(self.tier_set),
            "max_patterns": self.max_patterns,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> MiningParams:
        return cls(
            min_support=doc.get("min_support", 2),
            max_edges=doc.get("max_edges", 8),
            mode=doc.get("mode", EXACT),
            closed_only=doc.get("closed_only", False),
            tier_set=frozenset(doc.get("tiers", (1, 2))),
            max_patterns=doc.get("max_patterns", DEFAULT_MAX_PATTERNS),
        )


@dataclass(eq=False)
class Pattern:
    code: DFSCode
    support: int
    embeddings: list[Embedding] = field(default_factory=list, repr=False)
    mode: str = EXACT

    def __post_init__(self):
        self.code = tuple(EdgeTuple(*t) for t in self.code)

    @cached_property
    def _parts(self):
        return validate_code(self.code)

    @property
    def labels(self) -> list[str]:
        return self._parts[0]

    @property
    def edge_list(self) -> list[tuple[int, int, str]]:
        return self._parts[1]

    @property
    def num_nodes(self) -> int:
        return len(self.labels)

    @property
    def num_edges(self) -> int:
        return len(self.code)

    def graph(self) -> PropertyGraph:
        return code_to_graph(self.code)

    def sort_key(self) -> tuple:
        return (self.num_edges, code_key(self.code))

    def to_dict(self) -> dict:
        return {
            "code": [list(t) for t in self.code],
            "support": self.support,
            "nodes": self.num_nodes,
            "edges": self.num_edges,
            "embeddings": [list(e) for e in self.embeddings],
        }

    @classmethod
    def from_dict(cls, doc: dict, mode: str = EXACT) -> Pattern:
        return cls(
            tuple(EdgeTuple(*t) for t in doc["code"]),
            int(doc["support"]),
            [tuple(e) for e in doc.get("embeddings", [])],
            mode,
        )

    def __repr__(self) -> str:
        body = ", ".join(f"({t.i},{t.j},{t.li},{t.le},{t.lj})" for t in self.code)
        return f"Pattern(support={self.support}, code=[{body}])"


def mining_view(abox: PropertyGraph, tier_set: Iterable[int]) -> tuple[list[str], list[str], list[list[tuple[int, str]]]]:
    """(ids, types, adjacency) of the projected, undirected, loop-free graph."""
    view = project_tiers(abox, tier_set)
    ids = view.node_ids()
    index = {nid: k for k, nid in enumerate(ids)}
    types = [view.node(nid).type_term for nid in ids]
    pairs: set[tuple[int, int, str]] = set()
    for e in view.edges():
        u, v = index[e.src], index[e.dst]
        if u != v:
            pairs.add((u, v, e.relation))
            pairs.add((v, u, e.relation))
    adj: list[list[tuple[int, str]]] = [[] for _ in ids]
    for u, v, rel in sorted(pairs):
        adj[u].append((v, rel))
    return ids, types, adj


def _label_sets(types: Sequence[str], mode: str, taxonomy: Taxonomy | None) -> list[tuple[str, ...]]:
    if mode == EXACT:
        return [(t,) for t in types]
    tax = taxonomy or Taxonomy.empty()
    cache: dict[str, tuple[str, ...]] = {}
    out = []
    for t in types:
        if t not in cache:
            cache[t] = tuple(a for a in tax.ancestors(t, lenient=True) if a != ROOT)
        out.append(cache[t])
    return out


class _Miner:
    def __init__(self, adj, labsets, params: MiningParams):
        self.adj = adj
        self.labsets = labsets
        self.params = params
        self.found: list[tuple[DFSCode, int, list[tuple[int, ...]]]] = []

    def run(self) -> None:
        seeds: dict[EdgeTuple, list[tuple[int, ...]]] = defaultdict(list)
        for u, nbrs in enumerate(self.adj):
            for v, rel in nbrs:
                for lu in self.labsets[u]:
                    for lv in self.labsets[v]:
                        if lu <= lv:
                            seeds[EdgeTuple(0, 1, lu, rel, lv)].append((u, v))
        for t in sorted(seeds, key=tuple_key):
            embs = seeds[t]
            if mni_support(embs) >= self.params.min_support:
                self._grow((t,), embs)

    def _grow(self, code: DFSCode, embs: list[tuple[int, ...]]) -> None:
        support = mni_support(embs)
        self.found.append((code, support, embs))
        if len(self.found) > self.params.max_patterns:
            raise PatternOverflowError(
                f"more than {self.params.max_patterns} frequent patterns; raise min_support "
                "or lower max_edges"
            )
        if len(code) >= self.params.max_edges:
            return
        path = rightmost_path(code)
        on_path = set(path)
        rm = path[-1]
        vlabels: dict[int, str] = {}
        present: set[tuple[int, int, str]] = set()
        for t in code:
            vlabels[t.i] = t.li
            vlabels[t.j] = t.lj
            present.add((min(t.i, t.j), max(t.i, t.j), t.le))
        n = len(vlabels)
        ext: dict[EdgeTuple, list[tuple[int, ...]]] = defaultdict(list)
        adj, labsets = self.adj, self.labsets
        for emb in embs:
            inv = {x: k for k, x in enumerate(emb)}
            for w, rel in adj[emb[rm]]:
                k = inv.get(w)
                if k is not None and k in on_path and k != rm and (min(k, rm), max(k, rm), rel) not in present:
                    ext[EdgeTuple(rm, k, vlabels[rm], rel, vlabels[k])].append(emb)
            for i in path:
                li = vlabels[i]
                for w, rel in adj[emb[i]]:
                    if w in inv:
                        continue
                    grown = emb + (w,)
                    for lw in labsets[w]:
                        ext[EdgeTuple(i, n, li, rel, lw)].append(grown)
        for t in sorted(ext, key=tuple_key):
            child_embs = ext[t]
            if mni_support(child_embs) < self.params.min_support:
                continue
            child = code + (t,)
            if is_min(child):
                self._grow(child, child_embs)


def _occurrence_key(embs: list[Embedding], edges) -> frozenset:
    occ = set()
    for emb in embs:
        occ.add(frozenset(
            (frozenset((emb[i], emb[j])), le) for i, j, le in edges
        ) | frozenset(emb))
    return frozenset(occ)


def _drop_generalized_redundant(patterns: list[Pattern], taxonomy: Taxonomy | None) -> list[Pattern]:
    """Remove patterns shadowed by a strictly more specific one with the same occurrences."""
    groups: dict[tuple, list[Pattern]] = defaultdict(list)
    for p in patterns:
        rels = tuple(sorted(le for _, _, le in p.edge_list))
        groups[(p.num_nodes, p.num_edges, rels, _occurrence_key(p.embeddings, p.edge_list))].append(p)
    redundant: set[int] = set()
    for members in groups.values():
        if len(members) < 2:
            continue
        for p in members:
            for q in members:
                if q is p:
                    continue
                # q specialises p iff p maps bijectively onto q with p's labels as ancestors
                if embeddings(p, q.graph(), GENERALIZED, taxonomy, limit=1):
                    redundant.add(id(p))
                    break
    return [p for p in patterns if id(p) not in redundant]


def mine_frequent(
    abox: PropertyGraph,
    params: MiningParams | None = None,
    taxonomy: Taxonomy | None = None,
) -> list[Pattern]:
    """Every connected pattern with MNI >= min_support and at most max_edges edges.

    Patterns come back sorted by (edge count, DFS code) with their complete
    embedding lists, each assignment given in ABox node ids.
    """
    from dtgraph.miner.closed import filter_closed

    params = params or MiningParams()
    ids, types, adj = mining_view(abox, params.tier_set)
    if params.min_support > len(ids):
        return []
    miner = _Miner(adj, _label_sets(types, params.mode, taxonomy), params)
    miner.run()
    patterns = []
    for code, support, embs in miner.found:
        named = sorted({tuple(ids[x] for x in emb) for emb in embs})
        patterns.append(Pattern(code, support, named, params.mode))
    if params.mode == GENERALIZED:
        patterns = _drop_generalized_redundant(patterns, taxonomy)
    patterns.sort(key=Pattern.sort_key)
    if params.closed_only:
        patterns = filter_closed(patterns)
    return patterns
