import itertools
import json
import math
import random

import pytest

from dtgraph.errors import ConflictError, ParseError, ValidationError
from dtgraph.ingest import (
    ARRANGED,
    CORRELATES,
    PositionEntry,
    PositionSet,
    derive_arrangement,
    parse_io_relations,
    parse_plc_relations,
    parse_position_records,
    parse_source,
)
from dtgraph.synthetic import warehouse_sources


def plc(*records):
    return {"source": "plc", "records": list(records)}


def rec(s, st_, rel, o, ot):
    return {"subject": {"name": s, "type": st_}, "relation": rel, "object": {"name": o, "type": ot}}


def test_plc_empty():
    g = parse_plc_relations(plc())
    assert g.number_of_nodes() == g.number_of_edges() == 0


def test_plc_functional_group():
    g = parse_plc_relations(plc(
        rec("FM1", "FunctionalModule", "functional_group", "M1", "Motor"),
        rec("FM1", "FunctionalModule", "functional_group", "M2", "Motor"),
    ))
    assert g.number_of_nodes() == 3
    assert [e.relation for e in g.edges()] == ["functional_group"] * 2
    assert all(n.tier == 1 and n.provenance == {"plc"} for n in g.nodes())
    assert all(e.tier == 1 and e.provenance == {"plc"} for e in g.edges())


def test_plc_unknown_relation_reports_index():
    with pytest.raises(ParseError) as info:
        parse_plc_relations(plc(rec("a", "T", "contains", "b", "T"), rec("a", "T", "flies", "b", "T")))
    assert info.value.index == 1
    assert "record 1" in str(info.value)


@pytest.mark.parametrize("bad", [
    {"subject": {"name": "", "type": "T"}, "relation": "contains", "object": {"name": "b", "type": "T"}},
    {"subject": "a", "relation": "contains", "object": {"name": "b", "type": "T"}},
    {"relation": "contains"},
    "not-an-object",
])
def test_plc_schema_violations(bad):
    with pytest.raises(ParseError):
        parse_plc_relations(plc(bad))


def test_plc_contradictory_types():
    with pytest.raises(ConflictError):
        parse_plc_relations(plc(rec("M1", "Motor", "contains", "x", "T"), rec("M1", "Valve", "contains", "y", "T")))


def test_plc_node_ids_follow_first_appearance():
    g = parse_plc_relations(plc(rec("b", "T", "contains", "a", "T"), rec("c", "T", "contains", "a", "T")))
    assert [(n.id, n.name) for n in g.nodes()] == [("plc:0", "b"), ("plc:1", "a"), ("plc:2", "c")]


def pos(*entries):
    return {"source": "position", "records": [{"name": n, "type": t, "pos": p} for n, t, p in entries]}


def test_positions_parse():
    assert len(parse_position_records(pos())) == 0
    coords = [[0.1, 0.2, 0.3], [1, 2, 3], [-4.5, 0, 1e-9], [7, 8, 9]]
    ps = parse_position_records(pos(*[(f"p{k}", "T", c) for k, c in enumerate(coords)]))
    assert len(ps) == 4
    assert [list(e.pos) for e in ps.entries] == coords


@pytest.mark.parametrize("coords", [[1, 2], [1, 2, "x"], [1, float("nan"), 0], [float("inf"), 0, 0], [True, 0, 0]])
def test_positions_invalid(coords):
    with pytest.raises(ParseError):
        parse_position_records(pos(("p", "T", coords)))


def test_positions_duplicate_names():
    with pytest.raises(ParseError):
        parse_position_records(pos(("p", "T", [0, 0, 0]), ("p", "T", [1, 1, 1])))


def _points(*xs):
    return PositionSet(tuple(PositionEntry(f"p{k}", "T", (float(x), 0.0, 0.0)) for k, x in enumerate(xs)))


def test_arrangement_threshold_boundary():
    assert derive_arrangement(_points(0, 1), 0.5).number_of_edges() == 0
    g = derive_arrangement(_points(0, 1), 1.0)
    assert g.number_of_nodes() == 2 and g.number_of_edges() == 1
    assert next(g.edges()).relation == ARRANGED


def test_arrangement_collinear_chain_matches_all_pairs():
    ps = _points(0, 1, 2, 3)
    g = derive_arrangement(ps, 1.0)
    expected = {(a, b) for a, b in itertools.combinations(range(4), 2)
                if math.dist(ps.entries[a].pos, ps.entries[b].pos) <= 1.0}
    got = {tuple(sorted((int(e.src.split(":")[1]), int(e.dst.split(":")[1])))) for e in g.edges()}
    assert got == expected == {(0, 1), (1, 2), (2, 3)}


@pytest.mark.parametrize("threshold", [0, -1, float("nan")])
def test_arrangement_rejects_bad_threshold(threshold):
    with pytest.raises(ValidationError):
        derive_arrangement(_points(0, 1), threshold)


@pytest.mark.parametrize("seed", range(10))
def test_arrangement_symmetric_under_reordering(seed):
    rng = random.Random(seed)
    entries = [PositionEntry(f"p{k}", "T", tuple(rng.uniform(0, 3) for _ in range(3))) for k in range(12)]
    shuffled = entries[:]
    rng.shuffle(shuffled)

    def pairs(es):
        g = derive_arrangement(PositionSet(tuple(es)), 1.2)
        return {frozenset((g.node(e.src).name, g.node(e.dst).name)) for e in g.edges()}

    assert pairs(entries) == pairs(shuffled)


def io(*records):
    return {"source": "io", "records": [{"a": {"name": a, "type": "T"}, "b": {"name": b, "type": "T"}, "weight": w}
                                        for a, b, w in records]}


def test_io_cutoff():
    g = parse_io_relations(io(("x", "y", 0.95)))
    e = next(g.edges())
    assert (e.relation, e.properties["weight"], e.tier) == (CORRELATES, 0.95, 2)
    dropped = parse_io_relations(io(("x", "y", 0.5)))
    assert dropped.number_of_nodes() == 2 and dropped.number_of_edges() == 0
    assert parse_io_relations(io(("x", "y", 0.5)), cutoff=0.4).number_of_edges() == 1


@pytest.mark.parametrize("w", [1.7, -0.1, "high", None])
def test_io_weight_out_of_range(w):
    with pytest.raises(ValidationError):
        parse_io_relations(io(("x", "y", w)))


def test_parse_source_dispatch_and_paths(tmp_path):
    docs = warehouse_sources()
    graphs = []
    for doc in docs:
        f = tmp_path / f"{doc['source']}.json"
        f.write_text(json.dumps(doc))
        graphs.append(parse_source(f))
    plc_g, pos_g, io_g = graphs
    assert plc_g.number_of_nodes() == 25 and plc_g.number_of_edges() == 24
    assert pos_g.number_of_nodes() == 16 and pos_g.number_of_edges() == 11
    # four strong drive correlations kept, four weak conveyor ones dropped
    assert io_g.number_of_nodes() == 9 and io_g.number_of_edges() == 4

    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"source": "plc", "records": [rec("a", "T", "flies", "b", "T")]}))
    with pytest.raises(ParseError) as info:
        parse_source(bad)
    assert str(bad) in str(info.value) and info.value.index == 0

    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    with pytest.raises(ParseError):
        parse_source(broken)
    unknown = tmp_path / "cad.json"
    unknown.write_text(json.dumps({"source": "cad", "records": []}))
    with pytest.raises(ParseError):
        parse_source(unknown)


def test_parsing_is_deterministic():
    a, b = (parse_plc_relations(warehouse_sources()[0]).to_dict() for _ in range(2))
    assert a == b
