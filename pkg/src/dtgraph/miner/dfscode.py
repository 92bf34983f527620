"""DFS codes, their total order, and the minimum-code test.

A code is a tuple of :class:`EdgeTuple`. Vertex ``0`` is the DFS root and
each forward tuple discovers the next index. Growth is restricted to the
rightmost path: backward tuples leave the rightmost vertex towards a vertex
on the path (the parent included, which only happens through a parallel
edge with a different relation), forward tuples leave any path vertex.

Label order is plain ``str`` order, i.e. code point order, which coincides
with the byte order of the UTF-8 encoding.
"""

from __future__ import annotations

from typing import NamedTuple, Sequence

from dtgraph.errors import MiningError
from dtgraph.graph import PropertyGraph


class EdgeTuple(NamedTuple):
    i: int
    j: int
    li: str
    le: str
    lj: str

    @property
    def forward(self) -> bool:
        return self.j > self.i


DFSCode = tuple[EdgeTuple, ...]


def tuple_key(t: EdgeTuple) -> tuple:
    """Sort key valid among extensions of one common prefix.

    Backward before forward; backward by target index; forward from the
    deepest path vertex first; then labels.
    """
    if t.j < t.i:
        return (0, t.j, t.li, t.le, t.lj)
    return (1, -t.i, t.li, t.le, t.lj)


def code_key(code: Sequence[EdgeTuple]) -> tuple:
    """Lexicographic key of a whole code (the first difference decides)."""
    return tuple(tuple_key(t) for t in code)


def rightmost_path(code: Sequence[EdgeTuple]) -> list[int]:
    parent: dict[int, int] = {}
    rm = 0
    for t in code:
        if t.j > t.i:
            parent[t.j] = t.i
            rm = max(rm, t.j)
    path = [rm]
    while path[-1] in parent:
        path.append(parent[path[-1]])
    return path[::-1]


def validate_code(code: Sequence[EdgeTuple]) -> tuple[list[str], list[tuple[int, int, str]]]:
    """Check that ``code`` is a legal rightmost-path sequence; return its graph."""
    if not code:
        raise MiningError("empty DFS code (patterns have at least one edge)")
    labels: list[str] = []
    edges: list[tuple[int, int, str]] = []
    seen: set[tuple[int, int, str]] = set()
    parent: dict[int, int] = {}
    path: list[int] = []
    for k, raw in enumerate(code):
        t = EdgeTuple(*raw)
        if k == 0:
            if (t.i, t.j) != (0, 1):
                raise MiningError(f"code must start with (0, 1, ...), got {tuple(t)}")
            labels = [t.li, t.lj]
            path = [0, 1]
            parent[1] = 0
        elif t.j > t.i:
            if t.j != len(labels):
                raise MiningError(f"tuple {k}: forward edge must discover vertex {len(labels)}")
            if t.i not in path:
                raise MiningError(f"tuple {k}: forward edge leaves vertex {t.i} off the rightmost path")
            if labels[t.i] != t.li:
                raise MiningError(f"tuple {k}: label of vertex {t.i} is {labels[t.i]!r}, not {t.li!r}")
            labels.append(t.lj)
            path = path[: path.index(t.i) + 1] + [t.j]
        else:
            if t.i != path[-1]:
                raise MiningError(f"tuple {k}: backward edge must leave the rightmost vertex")
            if t.j not in path or t.j == t.i:
                raise MiningError(f"tuple {k}: backward edge must end on the rightmost path")
            if labels[t.i] != t.li or labels[t.j] != t.lj:
                raise MiningError(f"tuple {k}: vertex labels disagree with earlier tuples")
        key = (min(t.i, t.j), max(t.i, t.j), t.le)
        if key in seen:
            raise MiningError(f"tuple {k}: edge {key} repeated")
        seen.add(key)
        edges.append((t.i, t.j, t.le))
    return labels, edges


class _State(NamedTuple):
    vmap: tuple[int, ...]  # code index -> graph vertex
    used: frozenset[int]  # graph edge indices
    path: tuple[int, ...]  # rightmost path, code indices


def _adjacency(n: int, edges: Sequence[tuple[int, int, str]]) -> list[list[tuple[int, str, int]]]:
    adj: list[list[tuple[int, str, int]]] = [[] for _ in range(n)]
    for k, (u, v, le) in enumerate(edges):
        if u == v:
            raise MiningError("self-loops cannot appear in patterns")
        adj[u].append((v, le, k))
        adj[v].append((u, le, k))
    return adj


def _extend(state: _State, labels, adj):
    vmap, used, path = state
    inv = {g: c for c, g in enumerate(vmap)}
    rm = path[-1]
    u = vmap[rm]
    on_path = set(path)
    for w, le, k in adj[u]:
        if k in used:
            continue
        c = inv.get(w)
        if c is not None and c in on_path and c != rm:
            yield EdgeTuple(rm, c, labels[u], le, labels[w]), _State(vmap, used | {k}, path)
    n = len(vmap)
    for pos, c in enumerate(path):
        x = vmap[c]
        for w, le, k in adj[x]:
            if w not in inv:
                yield (
                    EdgeTuple(c, n, labels[x], le, labels[w]),
                    _State(vmap + (w,), used | {k}, path[: pos + 1] + (n,)),
                )


def _greedy(labels: Sequence[str], edges: Sequence[tuple[int, int, str]], target: Sequence[EdgeTuple] | None = None):
    """Build the minimum code step by step.

    With ``target`` given, stop early and return ``(False, ...)`` as soon as
    the minimum undercuts it. Returns ``(is_target_min, code, vmap)``.
    """
    adj = _adjacency(len(labels), edges)
    best: tuple | None = None
    states: list[_State] = []
    for u in range(len(labels)):
        for w, le, k in adj[u]:
            t = EdgeTuple(0, 1, labels[u], le, labels[w])
            key = tuple_key(t)
            if best is None or key < best[0]:
                best = (key, t)
                states = []
            if key == best[0]:
                states.append(_State((u, w), frozenset([k]), (0, 1)))
    if best is None:
        raise MiningError("pattern needs at least one edge")
    code = [best[1]]
    if target is not None and best[0] < tuple_key(target[0]):
        return False, code, None
    for step in range(1, len(edges)):
        best = None
        nxt: dict[tuple, _State] = {}
        for st in states:
            for t, new in _extend(st, labels, adj):
                key = tuple_key(t)
                if best is None or key < best[0]:
                    best = (key, t)
                    nxt = {}
                if key == best[0]:
                    nxt[(new.vmap, new.used)] = new
        if best is None:
            raise MiningError("pattern graph is disconnected")
        code.append(best[1])
        if target is not None and best[0] < tuple_key(target[step]):
            return False, code, None
        states = list(nxt.values())
    if len(states[0].vmap) != len(labels):
        raise MiningError("pattern graph is disconnected")
    return True, code, states[0].vmap


def graph_labels(graph: PropertyGraph) -> tuple[list[str], list[tuple[int, int, str]], list[str]]:
    ids = graph.node_ids()
    index = {nid: k for k, nid in enumerate(ids)}
    labels = [graph.node(nid).type_term for nid in ids]
    edges = [(index[e.src], index[e.dst], e.relation) for e in graph.edges()]
    return labels, edges, ids


def min_code_with_order(labels: Sequence[str], edges: Sequence[tuple[int, int, str]]) -> tuple[DFSCode, tuple[int, ...]]:
    """Minimum code plus ``vmap`` (code vertex index -> input vertex index)."""
    _, code, vmap = _greedy(labels, edges)
    return tuple(code), vmap


def min_dfs_code(graph: PropertyGraph | tuple) -> DFSCode:
    """Minimum DFS code of a connected pattern graph.

    ``graph`` is either a :class:`PropertyGraph` (labels are ``type_term`` and
    ``relation``; direction is ignored) or a ``(labels, edges)`` pair.
    """
    if isinstance(graph, PropertyGraph):
        labels, edges, _ = graph_labels(graph)
    else:
        labels, edges = graph
    return min_code_with_order(labels, edges)[0]


def is_min(code: Sequence[EdgeTuple]) -> bool:
    code = tuple(EdgeTuple(*t) for t in code)
    labels, edges = validate_code(code)
    ok, _, _ = _greedy(labels, edges, target=code)
    return ok


def code_to_graph(code: Sequence[EdgeTuple]) -> PropertyGraph:
    """Labels-only graph of a code; node ids are the DFS indices as text."""
    labels, edges = validate_code(tuple(EdgeTuple(*t) for t in code))
    g = PropertyGraph()
    for k, lab in enumerate(labels):
        g.add_node(f"v{k}", lab, id=str(k))
    for k, (i, j, le) in enumerate(edges):
        g.add_edge(str(i), str(j), le, id=str(k))
    return g
