"""Parsers for the three upstream relation sources.

Each source arrives as a JSON document ``{"source": ..., "records": [...]}``
produced by the upstream analytics (control-code analysis, position
tracking, IO-signal correlation). The parsers only validate and convert;
they never look across sources.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from os import PathLike
from typing import Mapping

from dtgraph.errors import ConflictError, ParseError, ValidationError
from dtgraph.graph import PropertyGraph, Tier, is_finite_number

PLC_RELATIONS = ("functional_group", "contains", "reads", "writes")
ARRANGED = "arranged_next_to"
CORRELATES = "correlates_with"
DEFAULT_THRESHOLD = 1.0
DEFAULT_CUTOFF = 0.8


@dataclass(frozen=True)
class PositionEntry:
    name: str
    type_term: str
    pos: tuple[float, float, float]


@dataclass(frozen=True)
class PositionSet:
    entries: tuple[PositionEntry, ...] = ()

    def __len__(self) -> int:
        return len(self.entries)


def load_document(file: Mapping | str | PathLike, source: str) -> tuple[list, str | None]:
    path = None
    if isinstance(file, Mapping):
        doc = file
    else:
        path = str(file)
        try:
            with open(file, encoding="utf-8") as fh:
                doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON ({exc.msg}, line {exc.lineno})", path=path) from None
    if not isinstance(doc, Mapping):
        raise ParseError("document must be a JSON object", path=path)
    if doc.get("source", source) != source:
        raise ParseError(f"expected source {source!r}, found {doc.get('source')!r}", path=path)
    records = doc.get("records")
    if not isinstance(records, list):
        raise ParseError("document needs a 'records' list", path=path)
    return records, path


def _label(obj: object, key: str, *, path: str | None, index: int) -> str:
    if not isinstance(obj, Mapping):
        raise ParseError(f"{key!r} must be an object with 'name' and 'type'", path=path, index=index)
    out = []
    for field in ("name", "type"):
        value = obj.get(field)
        if not isinstance(value, str) or not value.strip():
            raise ParseError(f"{key}.{field} must be non-empty text", path=path, index=index)
        out.append(value)
    return out[0], out[1]


class _NodeTable:
    """name -> node id, refusing contradictory types for one name."""

    def __init__(self, graph: PropertyGraph, source: str, tier: Tier, path: str | None):
        self.graph, self.source, self.tier, self.path = graph, source, tier, path
        self.ids: dict[str, str] = {}
        self.types: dict[str, str] = {}

    def get(self, name: str, type_term: str, index: int) -> str:
        if name in self.ids:
            if self.types[name] != type_term:
                raise ConflictError(
                    f"name {name!r} declared as {self.types[name]!r} and {type_term!r}",
                    path=self.path, index=index,
                )
            return self.ids[name]
        nid = f"{self.source}:{len(self.ids)}"
        self.graph.add_node(name, type_term, self.tier, provenance={self.source}, id=nid)
        self.ids[name] = nid
        self.types[name] = type_term
        return nid


def parse_plc_relations(file: Mapping | str | PathLike, directed: bool = False) -> PropertyGraph:
    records, path = load_document(file, "plc")
    graph = PropertyGraph(directed)
    table = _NodeTable(graph, "plc", Tier.DOMAIN_INTERNAL, path)
    for i, rec in enumerate(records):
        if not isinstance(rec, Mapping):
            raise ParseError("record must be an object", path=path, index=i)
        rel = rec.get("relation")
        if rel not in PLC_RELATIONS:
            raise ParseError(f"relation {rel!r} not in {PLC_RELATIONS}", path=path, index=i)
        s_name, s_type = _label(rec.get("subject"), "subject", path=path, index=i)
        o_name, o_type = _label(rec.get("object"), "object", path=path, index=i)
        s = table.get(s_name, s_type, i)
        o = table.get(o_name, o_type, i)
        if graph.has_edge(s, o, rel):
            continue
        graph.add_edge(s, o, rel, Tier.DOMAIN_INTERNAL, provenance={"plc"}, id=f"plc:e{i}")
    return graph


def parse_position_records(file: Mapping | str | PathLike) -> PositionSet:
    records, path = load_document(file, "position")
    entries = []
    names = set()
    for i, rec in enumerate(records):
        if not isinstance(rec, Mapping):
            raise ParseError("record must be an object", path=path, index=i)
        name, type_term = _label(rec, "record", path=path, index=i)
        pos = rec.get("pos")
        if not isinstance(pos, list) or len(pos) != 3:
            raise ParseError("pos must be a 3-vector [x, y, z] in meters", path=path, index=i)
        if not all(is_finite_number(c) for c in pos):
            raise ParseError("pos coordinates must be finite numbers", path=path, index=i)
        if name in names:
            raise ParseError(f"duplicate position entry for {name!r}", path=path, index=i)
        names.add(name)
        entries.append(PositionEntry(name, type_term, tuple(pos)))
    return PositionSet(tuple(entries))


def derive_arrangement(positions: PositionSet, threshold: float = DEFAULT_THRESHOLD) -> PropertyGraph:
    """Connect every pair of entries at most ``threshold`` meters apart."""
    if not is_finite_number(threshold) or threshold <= 0:
        raise ValidationError(f"threshold must be a positive distance, got {threshold!r}")
    graph = PropertyGraph()
    ids = []
    for k, entry in enumerate(positions.entries):
        x, y, z = entry.pos
        ids.append(graph.add_node(
            entry.name, entry.type_term, Tier.DOMAIN_INTERNAL,
            {"x": x, "y": y, "z": z}, {"position"}, id=f"position:{k}",
        ))
    for (a, ea), (b, eb) in itertools.combinations(enumerate(positions.entries), 2):
        d = math.dist(ea.pos, eb.pos)
        if d <= threshold:
            graph.add_edge(
                ids[a], ids[b], ARRANGED, Tier.DOMAIN_INTERNAL,
                {"distance": d}, {"position"}, id=f"position:e{a}-{b}",
            )
    return graph


def parse_io_relations(file: Mapping | str | PathLike, cutoff: float = DEFAULT_CUTOFF) -> PropertyGraph:
    if not is_finite_number(cutoff) or not 0 <= cutoff <= 1:
        raise ValidationError(f"cutoff must lie in [0, 1], got {cutoff!r}")
    records, path = load_document(file, "io")
    graph = PropertyGraph()
    table = _NodeTable(graph, "io", Tier.INTER_DOMAIN, path)
    for i, rec in enumerate(records):
        if not isinstance(rec, Mapping):
            raise ParseError("record must be an object", path=path, index=i)
        a_name, a_type = _label(rec.get("a"), "a", path=path, index=i)
        b_name, b_type = _label(rec.get("b"), "b", path=path, index=i)
        w = rec.get("weight")
        if not is_finite_number(w) or not 0 <= w <= 1:
            raise ParseError(f"weight must lie in [0, 1], got {w!r}", path=path, index=i)
        a = table.get(a_name, a_type, i)
        b = table.get(b_name, b_type, i)
        if w < cutoff or graph.has_edge(a, b, CORRELATES):
            continue
        graph.add_edge(a, b, CORRELATES, Tier.INTER_DOMAIN, {"weight": w}, {"io"}, id=f"io:e{i}")
    return graph


def parse_source(file: str | PathLike, *, threshold: float = DEFAULT_THRESHOLD,
                 cutoff: float = DEFAULT_CUTOFF) -> PropertyGraph:
    """Dispatch on the document's ``source`` field."""
    try:
        with open(file, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON ({exc.msg}, line {exc.lineno})", path=str(file)) from None
    source = doc.get("source") if isinstance(doc, Mapping) else None
    try:
        if source == "plc":
            return parse_plc_relations(doc)
        if source == "position":
            return derive_arrangement(parse_position_records(doc), threshold)
        if source == "io":
            return parse_io_relations(doc, cutoff)
    except ParseError as exc:
        err = type(exc)(str(exc), path=str(file))
        err.index = exc.index
        raise err from None
    raise ParseError(f"unknown source {source!r}; expected plc, position or io", path=str(file))
