"""Brute-force frequent-pattern enumeration used as ground truth in tests.

Every connected edge subset up to ``max_edges`` is bucketed by canonical
signature; MNI per bucket comes from explicit vertex permutations between
the bucket representative and each occurrence. Nothing here touches the
gSpan search path.
"""

from __future__ import annotations

import itertools
from collections import defaultdict

from dtgraph.canonical import canonical_signature
from dtgraph.errors import MiningError, UnsupportedSizeError
from dtgraph.graph import PropertyGraph
from dtgraph.miner.dfscode import min_code_with_order
from dtgraph.miner.gspan import MiningParams, Pattern, mining_view
from dtgraph.miner.matching import EXACT

MAX_ORACLE_NODES = 25
MAX_ORACLE_EDGES = 4


def connected_edge_subsets(edges: list[tuple[int, int, str]], max_size: int) -> list[frozenset[int]]:
    incident = defaultdict(list)
    for k, (u, v, _) in enumerate(edges):
        incident[u].append(k)
        incident[v].append(k)
    layer = {frozenset([k]) for k in range(len(edges))}
    out = []
    for _ in range(max_size):
        out.extend(layer)
        nxt = set()
        for sub in layer:
            nodes = {x for k in sub for x in edges[k][:2]}
            for x in nodes:
                for k in incident[x]:
                    if k not in sub:
                        nxt.add(sub | {k})
        layer = nxt
    return out


def _isomorphisms(rep_nodes, rep_edges, occ_nodes, occ_edges, types):
    """All bijections rep -> occurrence preserving labels and the edge multiset."""
    target = sorted((min(u, v), max(u, v), r) for u, v, r in occ_edges)
    by_label_rep = defaultdict(list)
    by_label_occ = defaultdict(list)
    for x in rep_nodes:
        by_label_rep[types[x]].append(x)
    for x in occ_nodes:
        by_label_occ[types[x]].append(x)
    if {k: len(v) for k, v in by_label_rep.items()} != {k: len(v) for k, v in by_label_occ.items()}:
        return
    groups = sorted(by_label_rep)
    for combo in itertools.product(*(itertools.permutations(by_label_occ[lab]) for lab in groups)):
        f = {}
        for lab, perm in zip(groups, combo):
            f.update(zip(by_label_rep[lab], perm))
        mapped = sorted((min(f[u], f[v]), max(f[u], f[v]), r) for u, v, r in rep_edges)
        if mapped == target:
            yield f


def brute_force_frequent(abox: PropertyGraph, params: MiningParams | None = None) -> list[Pattern]:
    params = params or MiningParams()
    if params.mode != EXACT:
        raise MiningError("the brute-force oracle supports exact mode only")
    if params.max_edges > MAX_ORACLE_EDGES:
        raise UnsupportedSizeError(f"oracle max_edges is {MAX_ORACLE_EDGES}, got {params.max_edges}")
    ids, types, adj = mining_view(abox, params.tier_set)
    if len(ids) > MAX_ORACLE_NODES:
        raise UnsupportedSizeError(f"oracle supports at most {MAX_ORACLE_NODES} nodes, got {len(ids)}")
    edges = sorted({(u, v, rel) for u, nbrs in enumerate(adj) for v, rel in nbrs if u < v})

    buckets: dict[str, list[frozenset[int]]] = defaultdict(list)
    for sub in connected_edge_subsets(edges, params.max_edges):
        g = PropertyGraph()
        for x in sorted({x for k in sub for x in edges[k][:2]}):
            g.add_node(str(x), types[x], id=str(x))
        for k in sorted(sub):
            u, v, rel = edges[k]
            g.add_edge(str(u), str(v), rel)
        buckets[canonical_signature(g)].append(sub)

    patterns = []
    for occs in buckets.values():
        # MNI cannot exceed the number of distinct same-label nodes covered
        covered = defaultdict(set)
        for occ in occs:
            for k in occ:
                for x in edges[k][:2]:
                    covered[types[x]].add(x)
        if min(len(s) for s in covered.values()) < params.min_support:
            continue
        occs.sort(key=sorted)
        rep_edges = [edges[k] for k in sorted(occs[0])]
        rep_nodes = sorted({x for e in rep_edges for x in e[:2]})
        images = {x: set() for x in rep_nodes}
        maps = []
        for occ in occs:
            occ_edges = [edges[k] for k in occ]
            occ_nodes = sorted({x for e in occ_edges for x in e[:2]})
            for f in _isomorphisms(rep_nodes, rep_edges, occ_nodes, occ_edges, types):
                maps.append(f)
                for a, b in f.items():
                    images[a].add(b)
        support = min(len(s) for s in images.values())
        if support < params.min_support:
            continue
        local = {x: k for k, x in enumerate(rep_nodes)}
        code, vmap = min_code_with_order(
            [types[x] for x in rep_nodes],
            [(local[u], local[v], r) for u, v, r in rep_edges],
        )
        embs = sorted(tuple(ids[f[rep_nodes[c]]] for c in vmap) for f in maps)
        patterns.append(Pattern(code, support, embs, EXACT))
    patterns.sort(key=Pattern.sort_key)
    return patterns
