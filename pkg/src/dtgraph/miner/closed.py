"""Closed-pattern post filter."""

from __future__ import annotations

from collections import Counter, defaultdict

from dtgraph.miner.matching import EXACT, embeddings


def _label_counts_fit(small, big) -> bool:
    need = Counter(small.labels)
    have = Counter(big.labels)
    if any(have[k] < c for k, c in need.items()):
        return False
    need_e = Counter(le for _, _, le in small.edge_list)
    have_e = Counter(le for _, _, le in big.edge_list)
    return all(have_e[k] >= c for k, c in need_e.items())


def filter_closed(patterns: list) -> list:
    """Keep each pattern that has no proper super-pattern of equal support in ``patterns``."""
    by_support = defaultdict(list)
    for q in patterns:
        by_support[q.support].append(q)
    kept = []
    for p in patterns:
        closed = True
        for q in by_support[p.support]:
            if q.num_edges <= p.num_edges or not _label_counts_fit(p, q):
                continue
            if embeddings(p, q.graph(), EXACT, limit=1):
                closed = False
                break
        if closed:
            kept.append(p)
    return kept
