"""Exact canonical signature of a labeled property graph.

Only structural labels count: node ``type_term`` and edge ``relation``.
Names, ids and properties are ignored, so two graphs get the same signature
iff they are isomorphic as labeled (multi)graphs.

The search is the usual individualization/refinement scheme: colour
refinement to an equitable partition, branch on the first smallest
non-singleton cell, take the lexicographically smallest leaf certificate.
A leaf whose certificate equals an earlier one yields an automorphism; the
search then jumps back to the level where the two paths split (the rest of
that subtree is its image), and the recorded automorphisms prune candidates
lying in one orbit of the prefix stabilizer.
"""

from __future__ import annotations

import hashlib
from collections import defaultdict

from dtgraph.errors import UnsupportedSizeError
from dtgraph.graph import PropertyGraph

MAX_SIGNATURE_NODES = 64


class _Canon:
    def __init__(self, labels: list, adj: list[list[tuple]], edges: list[tuple], directed: bool):
        self.n = len(labels)
        self.labels = labels
        self.adj = adj  # adj[v] = [(relation, direction, w), ...]
        self.edges = edges  # (u, v, relation), loops excluded from adj but kept here
        self.directed = directed
        self.best_cert = None
        self.best_pos: list[int] | None = None
        self.seen: dict[tuple, tuple[list[int], list[int]]] = {}
        self.generators: list[list[int]] = []

    def refine(self, colors: list[int]) -> list[int]:
        ncol = len(set(colors))
        while True:
            keys = [
                (colors[v], tuple(sorted((rel, d, colors[w]) for rel, d, w in self.adj[v])))
                for v in range(self.n)
            ]
            rank = {k: i for i, k in enumerate(sorted(set(keys)))}
            new = [rank[k] for k in keys]
            if len(rank) == ncol:
                return new
            colors, ncol = new, len(rank)

    def certificate(self, pos: list[int]) -> tuple:
        order = [0] * self.n
        for v, p in enumerate(pos):
            order[p] = v
        node_part = tuple(self.labels[v] for v in order)
        edge_part = []
        for u, v, rel in self.edges:
            a, b = pos[u], pos[v]
            if not self.directed and b < a:
                a, b = b, a
            edge_part.append((a, b, rel))
        edge_part.sort()
        return node_part, tuple(edge_part)

    def _orbit_roots(self, prefix: list[int]) -> list[int]:
        parent = list(range(self.n))

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for gen in self.generators:
            if all(gen[p] == p for p in prefix):
                for v in range(self.n):
                    a, b = find(v), find(gen[v])
                    if a != b:
                        parent[a] = b
        return [find(v) for v in range(self.n)]

    def search(self, colors: list[int], prefix: list[int]) -> int | None:
        """Explore below ``prefix``; returns a level to jump back to, if any."""
        colors = self.refine(colors)
        cells: dict[int, list[int]] = defaultdict(list)
        for v, c in enumerate(colors):
            cells[c].append(v)
        if len(cells) == self.n:
            cert = self.certificate(colors)
            if self.best_cert is None or cert < self.best_cert:
                self.best_cert = cert
            if cert not in self.seen:
                self.seen[cert] = (colors, prefix)
                return None
            other, other_path = self.seen[cert]
            inv = [0] * self.n
            for v, p in enumerate(other):
                inv[p] = v
            self.generators.append([inv[colors[v]] for v in range(self.n)])
            common = 0
            while common < len(prefix) and prefix[common] == other_path[common]:
                common += 1
            return common
        target = min((len(vs), c) for c, vs in cells.items() if len(vs) > 1)[1]
        tried: list[int] = []
        level = len(prefix)
        roots, known = None, -1
        for v in cells[target]:
            if tried:
                if known != len(self.generators):
                    roots, known = self._orbit_roots(prefix), len(self.generators)
                if any(roots[v] == roots[t] for t in tried):
                    continue
            tried.append(v)
            keyed = [(c, 0 if w == v else 1) for w, c in enumerate(colors)]
            rank = {k: i for i, k in enumerate(sorted(set(keyed)))}
            jump = self.search([rank[k] for k in keyed], prefix + [v])
            if jump is not None and jump < level:
                return jump
        return None


def _structure(graph: PropertyGraph):
    ids = graph.node_ids()
    index = {nid: i for i, nid in enumerate(ids)}
    loops: dict[int, list[str]] = defaultdict(list)
    adj: list[list[tuple]] = [[] for _ in ids]
    edges = []
    for e in graph.edges():
        u, v = index[e.src], index[e.dst]
        edges.append((u, v, e.relation))
        if u == v:
            loops[u].append(e.relation)
            continue
        if graph.directed:
            adj[u].append((e.relation, 1, v))
            adj[v].append((e.relation, 2, u))
        else:
            adj[u].append((e.relation, 0, v))
            adj[v].append((e.relation, 0, u))
    labels = [(graph.node(nid).type_term, tuple(sorted(loops[i]))) for i, nid in enumerate(ids)]
    return labels, adj, edges


def canonical_certificate(graph: PropertyGraph, max_nodes: int = MAX_SIGNATURE_NODES) -> tuple:
    """Return the minimal leaf certificate as a plain tuple (comparable, hashable)."""
    n = graph.number_of_nodes()
    if n > max_nodes:
        raise UnsupportedSizeError(
            f"canonical signature supports at most {max_nodes} nodes, graph has {n}"
        )
    labels, adj, edges = _structure(graph)
    if n == 0:
        return (graph.directed, (), ())
    canon = _Canon(labels, adj, edges, graph.directed)
    rank = {lab: i for i, lab in enumerate(sorted(set(labels)))}
    canon.search([rank[lab] for lab in labels], [])
    return (graph.directed,) + canon.best_cert


def canonical_signature(graph: PropertyGraph, max_nodes: int = MAX_SIGNATURE_NODES) -> str:
    cert = canonical_certificate(graph, max_nodes)
    digest = hashlib.sha256(repr(cert).encode("utf-8")).hexdigest()
    return f"{graph.number_of_nodes()}:{graph.number_of_edges()}:{digest}"
