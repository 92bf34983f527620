import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dtgraph.errors import MiningError
from dtgraph.miner.dfscode import (
    EdgeTuple,
    code_key,
    code_to_graph,
    is_min,
    min_dfs_code,
    rightmost_path,
    tuple_key,
    validate_code,
)
from support import graph_parts, iso_key

E = EdgeTuple


def test_single_edge_orients_by_label():
    assert min_dfs_code((["B", "A"], [(0, 1, "r")])) == (E(0, 1, "A", "r", "B"),)


def test_uniform_triangle():
    tri = (["X"] * 3, [(0, 1, "r"), (1, 2, "r"), (2, 0, "r")])
    assert min_dfs_code(tri) == (E(0, 1, "X", "r", "X"), E(1, 2, "X", "r", "X"), E(2, 0, "X", "r", "X"))


def test_triangle_minimum_over_all_starting_traversals():
    # brute-force: every DFS traversal of a labeled triangle, pick the least code
    labels = ["A", "B", "A"]
    edges = [(0, 1, "r"), (1, 2, "s"), (2, 0, "r")]
    codes = []
    for a, b, c in itertools.permutations(range(3)):
        lab = {a: 0, b: 1, c: 2}
        rel = {frozenset((u, v)): r for u, v, r in edges}
        code = (E(0, 1, labels[a], rel[frozenset((a, b))], labels[b]),
                E(1, 2, labels[b], rel[frozenset((b, c))], labels[c]),
                E(2, 0, labels[c], rel[frozenset((c, a))], labels[a]))
        assert lab
        codes.append(code)
    assert min_dfs_code((labels, edges)) == min(codes, key=code_key)


def test_path_is_renaming_invariant():
    a = (["A", "B", "C"], [(0, 1, "r"), (1, 2, "s")])
    b = (["C", "A", "B"], [(2, 0, "s"), (1, 2, "r")])
    assert min_dfs_code(a) == min_dfs_code(b)


def test_tuple_order_backward_before_forward():
    back = E(2, 0, "X", "r", "X")
    fwd = E(2, 3, "X", "r", "X")
    assert tuple_key(back) < tuple_key(fwd)
    # deeper forward source wins over shallower forward source
    assert tuple_key(E(2, 3, "X", "r", "X")) < tuple_key(E(1, 3, "X", "r", "X"))
    # labels break ties with plain text order
    assert tuple_key(E(0, 1, "A", "r", "B")) < tuple_key(E(0, 1, "A", "s", "A"))


def test_rightmost_path():
    code = (E(0, 1, "A", "r", "B"), E(1, 2, "B", "r", "C"), E(2, 0, "C", "r", "A"), E(1, 3, "B", "r", "D"))
    assert rightmost_path(code) == [0, 1, 3]


def test_is_min_and_non_minimal_traversal():
    tri = min_dfs_code((["X"] * 3, [(0, 1, "r"), (1, 2, "r"), (2, 0, "r")]))
    assert is_min(tri)
    # tri-with-tail visited from the tail end first is a legal but non-minimal code
    bad = (E(0, 1, "X", "r", "X"), E(1, 2, "X", "r", "X"), E(2, 3, "X", "r", "X"), E(3, 1, "X", "r", "X"))
    assert not is_min(bad)
    assert min_dfs_code(code_to_graph(bad)) != bad


@pytest.mark.parametrize("code", [
    (),
    (E(0, 2, "A", "r", "B"),),
    (E(0, 1, "A", "r", "B"), E(0, 1, "A", "r", "B")),
    (E(0, 1, "A", "r", "B"), E(1, 1, "B", "r", "B")),
    (E(0, 1, "A", "r", "B"), E(1, 2, "C", "r", "D")),
])
def test_malformed_codes_rejected(code):
    with pytest.raises(MiningError):
        validate_code(code)
    if code:
        with pytest.raises(MiningError):
            is_min(code)


def test_disconnected_and_empty_inputs():
    with pytest.raises(MiningError):
        min_dfs_code((["A", "B", "C", "D"], [(0, 1, "r"), (2, 3, "r")]))
    with pytest.raises(MiningError):
        min_dfs_code((["A"], []))


def test_parallel_relations_are_backward_edges():
    code = min_dfs_code((["A", "A"], [(0, 1, "r"), (0, 1, "s")]))
    assert code == (E(0, 1, "A", "r", "A"), E(1, 0, "A", "s", "A"))
    assert is_min(code)


def test_code_round_trips_through_graph():
    code = min_dfs_code((["A", "B", "B", "C"], [(0, 1, "r"), (0, 2, "r"), (2, 3, "s"), (1, 2, "s")]))
    g = code_to_graph(code)
    assert min_dfs_code(g) == code
    assert [n.id for n in g.nodes()] == ["0", "1", "2", "3"]


@st.composite
def small_graphs(draw):
    n = draw(st.integers(2, 6))
    labels = [draw(st.sampled_from("AB")) for _ in range(n)]
    edges = [(k, draw(st.integers(0, k - 1)), draw(st.sampled_from("rs"))) for k in range(1, n)]
    pairs = list(itertools.combinations(range(n), 2))
    extra = draw(st.lists(st.sampled_from(pairs), max_size=4, unique=True))
    have = {(min(u, v), max(u, v)) for u, v, _ in edges}
    edges += [(u, v, draw(st.sampled_from("rs"))) for u, v in extra if (u, v) not in have]
    return labels, edges


@settings(max_examples=150, deadline=None)
@given(small_graphs(), st.randoms(use_true_random=False))
def test_min_code_is_isomorphism_invariant(graph, rnd):
    labels, edges = graph
    perm = list(range(len(labels)))
    rnd.shuffle(perm)
    relabeled = [None] * len(labels)
    for old, new in enumerate(perm):
        relabeled[new] = labels[old]
    moved = [(perm[u], perm[v], r) if rnd.random() < 0.5 else (perm[v], perm[u], r) for u, v, r in edges]
    rnd.shuffle(moved)
    code = min_dfs_code((labels, edges))
    assert code == min_dfs_code((relabeled, moved))
    assert is_min(code)
    back = graph_parts(code_to_graph(code))
    assert iso_key(*back) == iso_key(labels, edges)


def test_random_traversals_are_never_smaller():
    rng = random.Random(4)
    labels = ["A", "B", "A", "B", "A"]
    edges = [(0, 1, "r"), (1, 2, "s"), (2, 3, "r"), (3, 4, "s"), (4, 0, "r"), (1, 3, "r")]
    best = min_dfs_code((labels, edges))
    for _ in range(50):
        perm = list(range(5))
        rng.shuffle(perm)
        code = min_dfs_code(([labels[perm.index(k)] for k in range(5)],
                             [(perm[u], perm[v], r) for u, v, r in edges]))
        assert code == best
