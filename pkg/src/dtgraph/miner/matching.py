"""Backtracking subgraph matching of patterns into the ABox, and MNI support."""

from __future__ import annotations

from collections import Counter, defaultdict
from typing import Sequence

from dtgraph.errors import MiningError
from dtgraph.graph import PropertyGraph
from dtgraph.ontology import Taxonomy

Embedding = tuple[str, ...]  # position k = ABox node id of pattern node k

EXACT = "exact"
GENERALIZED = "generalized"
MODES = (EXACT, GENERALIZED)


def mni_support(embeddings: Sequence[Sequence], pattern=None) -> int:
    """Minimum over pattern nodes of the number of distinct images."""
    if not embeddings:
        return 0
    width = len(embeddings[0])
    return min(len({emb[k] for emb in embeddings}) for k in range(width))


class DataIndex:
    """Undirected label/adjacency view of an ABox for repeated matching."""

    def __init__(self, abox: PropertyGraph):
        self.types = {n.id: n.type_term for n in abox.nodes()}
        self.rels: dict[str, dict[str, set[str]]] = defaultdict(lambda: defaultdict(set))
        for e in abox.edges():
            if e.src == e.dst:
                continue
            self.rels[e.src][e.dst].add(e.relation)
            self.rels[e.dst][e.src].add(e.relation)

    def compatible(self, label: str, mode: str, taxonomy: Taxonomy | None) -> list[str]:
        if mode == EXACT:
            return [n for n, t in self.types.items() if t == label]
        tax = taxonomy or Taxonomy.empty()
        return [n for n, t in self.types.items() if tax.is_subtype(t, label, lenient=True)]


def _pattern_parts(pattern) -> tuple[list[str], list[tuple[int, int, str]]]:
    from dtgraph.miner.dfscode import graph_labels, validate_code

    if isinstance(pattern, PropertyGraph):
        labels, edges, _ = graph_labels(pattern)
        return labels, edges
    if isinstance(pattern, tuple) and len(pattern) == 2 and isinstance(pattern[0], list):
        return pattern
    code = getattr(pattern, "code", pattern)
    return validate_code(code)


def embeddings(
    pattern,
    abox: PropertyGraph | DataIndex,
    mode: str = EXACT,
    taxonomy: Taxonomy | None = None,
    limit: int | None = None,
) -> list[Embedding]:
    """All injective, label-compatible, edge-preserving maps of ``pattern`` into ``abox``.

    ``pattern`` may be a Pattern, a DFS code, a PropertyGraph or a
    ``(labels, edges)`` pair. Pattern nodes are matched rarest label first;
    the result is sorted by assignment tuple (ABox ids).
    """
    if mode not in MODES:
        raise MiningError(f"mode must be one of {MODES}, got {mode!r}")
    labels, edges = _pattern_parts(pattern)
    index = abox if isinstance(abox, DataIndex) else DataIndex(abox)
    n = len(labels)
    if n == 0 or n > len(index.types):
        return []
    cand = {lab: index.compatible(lab, mode, taxonomy) for lab in set(labels)}
    if any(not c for c in cand.values()):
        return []
    cand_sets = {lab: set(c) for lab, c in cand.items()}

    p_adj: dict[int, list[tuple[int, str]]] = defaultdict(list)
    for i, j, le in edges:
        if i == j:
            raise MiningError("self-loops cannot appear in patterns")
        p_adj[i].append((j, le))
        p_adj[j].append((i, le))

    # matching order: rarest first, then most connected to what is placed
    order: list[int] = []
    placed: set[int] = set()
    rarity = Counter({k: len(cand[labels[k]]) for k in range(n)})
    while len(order) < n:
        best = min(
            (k for k in range(n) if k not in placed),
            key=lambda k: (-sum(1 for q, _ in p_adj[k] if q in placed), rarity[k], k),
        )
        order.append(best)
        placed.add(best)

    back: list[list[tuple[int, str]]] = []
    seen_pos: set[int] = set()
    for k in order:
        back.append([(q, le) for q, le in p_adj[k] if q in seen_pos])
        seen_pos.add(k)

    out: list[Embedding] = []
    assign: list[str | None] = [None] * n
    used: set[str] = set()
    rels = index.rels

    def rec(depth: int) -> bool:
        if depth == n:
            out.append(tuple(assign))
            return limit is not None and len(out) >= limit
        k = order[depth]
        allowed = cand_sets[labels[k]]
        links = back[depth]
        if links:
            q0, le0 = links[0]
            pool = [w for w, rs in rels[assign[q0]].items() if le0 in rs and w in allowed]
        else:
            pool = cand[labels[k]]
        for w in pool:
            if w in used:
                continue
            if all(le in rels[assign[q]].get(w, ()) for q, le in links[1:]):
                assign[k] = w
                used.add(w)
                if rec(depth + 1):
                    return True
                used.discard(w)
                assign[k] = None
        return False

    rec(0)
    out.sort()
    return out

