"""Shared generators and brute-force oracles for the test-suite."""

from __future__ import annotations

import itertools
import random
from collections import Counter

from dtgraph.graph import PropertyGraph

NODE_LABELS = ("A", "B", "C", "D")
EDGE_LABELS = ("r", "s")


def random_labeled_graph(rng: random.Random, max_nodes: int = 20, max_edges: int = 30,
                         max_label_values: int = 4) -> PropertyGraph:
    """Random simple labeled graph; node and relation label values together <= max_label_values."""
    n_node_labels = rng.randint(1, max_label_values - 1)
    n_rel_labels = rng.randint(1, min(len(EDGE_LABELS), max_label_values - n_node_labels))
    node_labels = NODE_LABELS[:n_node_labels]
    rel_labels = EDGE_LABELS[:n_rel_labels]
    n = rng.randint(2, max_nodes)
    g = PropertyGraph()
    ids = [g.add_node(f"x{k}", rng.choice(node_labels)) for k in range(n)]
    pairs = list(itertools.combinations(range(n), 2))
    rng.shuffle(pairs)
    for a, b in pairs[: rng.randint(1, min(max_edges, len(pairs)))]:
        g.add_edge(ids[a], ids[b], rng.choice(rel_labels))
    return g


def random_plant(rng: random.Random, modules: int | None = None) -> PropertyGraph:
    """Random plant made of a few repeated assembly shapes plus noise edges."""
    g = PropertyGraph()
    hub = g.add_node("Hub", "Cell")
    shapes = [
        [("Row", "StorageRow"), ("P1", "StoragePlace"), ("P2", "StoragePlace"), ("C", "Conveyor")],
        [("Conv", "Conveyor"), ("Drv", "Drive"), ("Sen", "Sensor")],
    ]
    links = [
        [(0, 1, "contains"), (0, 2, "contains"), (1, 2, "arranged_next_to"), (0, 3, "contains")],
        [(0, 1, "functional_group"), (0, 2, "functional_group")],
    ]
    members = []
    for m in range(modules if modules is not None else rng.randint(2, 6)):
        k = rng.randrange(len(shapes))
        ids = [g.add_node(f"M{m}.{name}", typ) for name, typ in shapes[k]]
        for a, b, rel in links[k]:
            g.add_edge(ids[a], ids[b], rel)
        g.add_edge(hub, ids[0], "contains")
        members.extend(ids)
    for _ in range(rng.randint(0, 4)):
        a, b = rng.sample(members, 2)
        if not g.has_edge(a, b, "wired_to"):
            g.add_edge(a, b, "wired_to")
    return g


def iso_key(labels, edges) -> tuple:
    """Permutation-minimal form of a small labeled graph; equal iff isomorphic."""
    n = len(labels)
    best = None
    for perm in itertools.permutations(range(n)):
        lab = tuple(labels[perm.index(k)] for k in range(n))
        es = tuple(sorted((min(perm[u], perm[v]), max(perm[u], perm[v]), r) for u, v, r in edges))
        key = (lab, es)
        if best is None or key < best:
            best = key
    return best


def graph_parts(g: PropertyGraph) -> tuple[list[str], list[tuple[int, int, str]]]:
    ids = g.node_ids()
    index = {nid: k for k, nid in enumerate(ids)}
    return ([g.node(nid).type_term for nid in ids],
            [(index[e.src], index[e.dst], e.relation) for e in g.edges()])


def is_subgraph(small, big) -> bool:
    """Brute force: does ``small`` (labels, edges) embed injectively into ``big``?"""
    (sl, se), (bl, be) = small, big
    if len(sl) > len(bl) or len(se) > len(be):
        return False
    bset = {(min(u, v), max(u, v), r) for u, v, r in be}
    for image in itertools.permutations(range(len(bl)), len(sl)):
        if any(sl[k] != bl[image[k]] for k in range(len(sl))):
            continue
        if all((min(image[u], image[v]), max(image[u], image[v]), r) in bset for u, v, r in se):
            return True
    return False


def label_multisets(g: PropertyGraph) -> tuple[Counter, Counter]:
    nodes = Counter(n.type_term for n in g.nodes())
    edges = Counter(
        (tuple(sorted((g.node(e.src).type_term, g.node(e.dst).type_term))), e.relation) for e in g.edges()
    )
    return nodes, edges


def graph_records(g: PropertyGraph) -> tuple[list, list]:
    """Order-free view of a graph's full content (ids included)."""
    doc = g.to_dict()
    key = lambda d: d["id"]  # noqa: E731
    return sorted(doc["nodes"], key=key), sorted(doc["edges"], key=key)
