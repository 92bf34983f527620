"""Synthetic plants used by the test-suite, the benchmarks and the demo files.

``warehouse_*`` describe the lower warehouse level of a small cell: four
storage rows built identically (row, three storage places, a conveyor and
its drive). ``flexcell_parts`` produces three source graphs that merge into
an ABox of exactly 242 nodes and 402 relations.
"""

from __future__ import annotations

import random

from dtgraph.graph import PropertyGraph, Tier
from dtgraph.ontology import Taxonomy, load_taxonomy

WAREHOUSE_ROWS = 4
PLACES_PER_ROW = 3
ROW_NODES = 3 + PLACES_PER_ROW  # row, places, conveyor, drive
ROW_EDGES = PLACES_PER_ROW + (PLACES_PER_ROW - 1) + 2

TAXONOMY_DOC = {
    "types": [
        {"name": "Component", "parent": "Thing"},
        {"name": "StorageRow", "parent": "Component"},
        {"name": "StoragePlace", "parent": "Component", "aliases": ["LagerPlatz"]},
        {"name": "Conveyor", "parent": "Component"},
        {"name": "Drive", "parent": "Component"},
    ]
}


def fixture_taxonomy() -> Taxonomy:
    return load_taxonomy(TAXONOMY_DOC)


def storage_row_graph() -> PropertyGraph:
    """One storage row on its own; the shape every warehouse row repeats."""
    g = PropertyGraph()
    row = g.add_node("Row", "StorageRow")
    places = [g.add_node(f"P{k}", "StoragePlace") for k in range(1, PLACES_PER_ROW + 1)]
    conv = g.add_node("Conveyor", "Conveyor")
    drive = g.add_node("Drive", "Drive")
    for p in places:
        g.add_edge(row, p, "contains")
    for a, b in zip(places, places[1:]):
        g.add_edge(a, b, "arranged_next_to")
    g.add_edge(row, conv, "contains")
    g.add_edge(conv, drive, "functional_group")
    return g


def warehouse_sources() -> tuple[dict, dict, dict]:
    """plc, position and io documents for the warehouse level.

    Names and types vary in case and vocabulary between sources on purpose
    (``row1`` vs ``Row1``, ``LagerPlatz`` vs ``StoragePlace``).
    """
    plc, pos, io = [], [], []

    def rec(s, st, rel, o, ot):
        plc.append({"subject": {"name": s, "type": st}, "relation": rel, "object": {"name": o, "type": ot}})

    for r in range(1, WAREHOUSE_ROWS + 1):
        row = f"Row{r}"
        rec("Warehouse", "Warehouse", "contains", row, "StorageRow")
        for k in range(1, PLACES_PER_ROW + 1):
            rec(row, "StorageRow", "contains", f"P{r}.{k}", "StoragePlace")
        rec(row, "StorageRow", "contains", f"Conveyor{r}", "Conveyor")
        rec(f"Conveyor{r}", "Conveyor", "functional_group", f"Drive{r}", "Drive")
        # rows 0.9 m apart chain up; places 1.0 m apart chain within a row only
        pos.append({"name": f" row{r}", "type": "Component", "pos": [-5.0, 0.9 * r, 0.0]})
        for k in range(1, PLACES_PER_ROW + 1):
            pos.append({"name": f"p{r}.{k}", "type": "LagerPlatz", "pos": [1.0 * k, 2.5 * r, 0.0]})
        io.append({"a": {"name": "PLC1", "type": "Controller"},
                   "b": {"name": f"Drive{r}", "type": "Drive"}, "weight": 0.93})
        io.append({"a": {"name": f"Conveyor{r}", "type": "Conveyor"},
                   "b": {"name": "PLC1", "type": "Controller"}, "weight": 0.41})
    return (
        {"source": "plc", "records": plc},
        {"source": "position", "records": pos},
        {"source": "io", "records": io},
    )


def warehouse_graph(with_environment: bool = True) -> PropertyGraph:
    """The warehouse ABox built directly (equal, up to ids, to merging the sources).

    With ``with_environment`` an MES node in tier 3 is attached to the
    warehouse; mining ignores it by default.
    """
    g = PropertyGraph()
    wh = g.add_node("Warehouse", "Warehouse", provenance={"plc"})
    ctrl = g.add_node("PLC1", "Controller", Tier.INTER_DOMAIN, provenance={"io"})
    rows = []
    for r in range(1, WAREHOUSE_ROWS + 1):
        row = g.add_node(f"Row{r}", "StorageRow", provenance={"plc", "position"})
        rows.append(row)
        g.add_edge(wh, row, "contains", provenance={"plc"})
        places = [g.add_node(f"P{r}.{k}", "StoragePlace", provenance={"plc", "position"})
                  for k in range(1, PLACES_PER_ROW + 1)]
        conv = g.add_node(f"Conveyor{r}", "Conveyor", provenance={"plc", "io"})
        drive = g.add_node(f"Drive{r}", "Drive", provenance={"plc", "io"})
        for p in places:
            g.add_edge(row, p, "contains", provenance={"plc"})
        for a, b in zip(places, places[1:]):
            g.add_edge(a, b, "arranged_next_to", provenance={"position"})
        g.add_edge(row, conv, "contains", provenance={"plc"})
        g.add_edge(conv, drive, "functional_group", provenance={"plc"})
        g.add_edge(ctrl, drive, "correlates_with", Tier.INTER_DOMAIN, {"weight": 0.93}, {"io"})
    for a, b in zip(rows, rows[1:]):
        g.add_edge(a, b, "arranged_next_to", provenance={"position"})
    if with_environment:
        mes = g.add_node("MES", "ManufacturingExecutionSystem", Tier.SYSTEM_OF_SYSTEMS)
        g.add_edge(mes, wh, "reports_to", Tier.SYSTEM_OF_SYSTEMS)
    return g


def two_warehouse_graph() -> PropertyGraph:
    """Two identical warehouses of four rows each, under one cell hub."""
    g = PropertyGraph()
    cell = g.add_node("Cell", "Cell")
    for w in (1, 2):
        wh = g.add_node(f"Warehouse{w}", "Warehouse")
        g.add_edge(cell, wh, "contains")
        rows = []
        for r in range(1, WAREHOUSE_ROWS + 1):
            row = g.add_node(f"W{w}Row{r}", "StorageRow")
            rows.append(row)
            g.add_edge(wh, row, "contains")
            places = [g.add_node(f"W{w}P{r}.{k}", "StoragePlace") for k in range(1, PLACES_PER_ROW + 1)]
            conv = g.add_node(f"W{w}Conveyor{r}", "Conveyor")
            drive = g.add_node(f"W{w}Drive{r}", "Drive")
            for p in places:
                g.add_edge(row, p, "contains")
            for a, b in zip(places, places[1:]):
                g.add_edge(a, b, "arranged_next_to")
            g.add_edge(row, conv, "contains")
            g.add_edge(conv, drive, "functional_group")
        for a, b in zip(rows, rows[1:]):
            g.add_edge(a, b, "arranged_next_to")
    return g


FLEXCELL_NODES = 242
FLEXCELL_EDGES = 402


def flexcell_graph(seed: int = 7) -> PropertyGraph:
    """A plant-like ABox with exactly 242 nodes and 402 relations.

    Repeated assemblies (storage rows, robot stations, transport segments,
    safety doors) hang off unique hubs such as the controller and the cell.
    Terminals on a wiring cabinet and a seeded set of IO correlations top the
    counts up to the exact target.
    """
    rng = random.Random(seed)
    g = PropertyGraph()
    sensors, drives, actuators = [], [], []

    def node(name, typ, tier=Tier.DOMAIN_INTERNAL, src="plc"):
        return g.add_node(name, typ, tier, provenance={src})

    def edge(a, b, rel, tier=Tier.DOMAIN_INTERNAL, src="plc", props=None):
        g.add_edge(a, b, rel, tier, props, {src})

    def io(a, b, weight):
        edge(a, b, "correlates_with", Tier.INTER_DOMAIN, "io", {"weight": weight})

    cell = node("FlexCell", "Cell")
    ctrl = node("PLC1", "Controller", Tier.INTER_DOMAIN, "io")
    cabinet = node("Cabinet1", "Cabinet")
    mes = node("MES", "ManufacturingExecutionSystem", Tier.SYSTEM_OF_SYSTEMS)
    edge(cell, ctrl, "contains")
    edge(cell, cabinet, "contains")
    edge(mes, cell, "reports_to", Tier.SYSTEM_OF_SYSTEMS)

    wh = node("Warehouse", "Warehouse")
    edge(cell, wh, "contains")
    rows = []
    for r in range(1, WAREHOUSE_ROWS + 1):
        row = node(f"Row{r}", "StorageRow")
        rows.append(row)
        edge(wh, row, "contains")
        places = [node(f"P{r}.{k}", "StoragePlace") for k in range(1, PLACES_PER_ROW + 1)]
        conv = node(f"RowConveyor{r}", "Conveyor")
        drive = node(f"RowDrive{r}", "Drive")
        barrier = node(f"LightBarrier{r}", "Sensor")
        for p in places:
            edge(row, p, "contains")
        for a, b in zip(places, places[1:]):
            edge(a, b, "arranged_next_to", src="position")
        edge(row, conv, "contains")
        edge(conv, drive, "functional_group")
        edge(conv, barrier, "functional_group")
        edge(ctrl, drive, "writes")
        edge(ctrl, barrier, "reads")
        sensors.append(barrier)
        drives.append(drive)
    for a, b in zip(rows, rows[1:]):
        edge(a, b, "arranged_next_to", src="position")

    for s in range(1, 9):
        st = node(f"Station{s}", "RobotStation")
        robot = node(f"Robot{s}", "Robot")
        grip = node(f"Gripper{s}", "Gripper")
        valve = node(f"Valve{s}", "Valve")
        prox = node(f"ProxSensor{s}", "Sensor")
        table = node(f"Table{s}", "Fixture")
        edge(cell, st, "contains")
        edge(st, robot, "contains")
        edge(st, table, "contains")
        edge(robot, grip, "functional_group")
        edge(grip, valve, "functional_group")
        edge(grip, prox, "functional_group")
        edge(robot, table, "arranged_next_to", src="position")
        edge(ctrl, valve, "writes")
        edge(ctrl, prox, "reads")
        io(valve, prox, 0.97)
        sensors.append(prox)
        actuators.append(valve)

    line = node("TransportLine", "Line")
    edge(cell, line, "contains")
    prev = None
    for c in range(1, 13):
        seg = node(f"Segment{c}", "Conveyor")
        drv = node(f"SegDrive{c}", "Drive")
        stop = node(f"Stopper{c}", "Actuator")
        pres = node(f"Presence{c}", "Sensor")
        edge(line, seg, "contains")
        edge(seg, drv, "functional_group")
        edge(seg, stop, "functional_group")
        edge(seg, pres, "functional_group")
        edge(ctrl, drv, "writes")
        edge(ctrl, stop, "writes")
        edge(ctrl, pres, "reads")
        if prev is not None:
            edge(prev, seg, "arranged_next_to", src="position")
        prev = seg
        drives.append(drv)
        sensors.append(pres)
        actuators.append(stop)

    for d in range(1, 7):
        door = node(f"Door{d}", "SafetyDoor")
        switch = node(f"DoorSwitch{d}", "Switch")
        lock = node(f"DoorLock{d}", "Actuator")
        edge(cell, door, "contains")
        edge(door, switch, "functional_group")
        edge(door, lock, "functional_group")
        edge(ctrl, switch, "reads")
        edge(ctrl, lock, "writes")
        io(switch, lock, 0.99)
        actuators.append(lock)

    # cabinet terminals up to the node target; the first ones are wired to
    # devices until the relation target is met
    devices = drives + sensors + actuators
    terminals = []
    k = 0
    while g.number_of_nodes() < FLEXCELL_NODES:
        k += 1
        t = node(f"Terminal{k}", "Terminal")
        edge(cabinet, t, "contains")
        terminals.append(t)
    missing = FLEXCELL_EDGES - g.number_of_edges()
    if not 0 <= missing <= min(len(terminals), len(devices)):
        raise AssertionError(f"flexcell layout off by {missing} relations")
    for t, dev in zip(terminals[:missing], devices):
        edge(t, dev, "wired_to", props={"gauge": rng.choice((0.75, 1.5, 2.5))})
    return g


def split_sources(graph: PropertyGraph) -> list[PropertyGraph]:
    """Cut a graph into plc / position / io parts by provenance of each edge.

    Every node appears in the part of each source that touches it (with its
    own provenance reset to that source), so merging the parts by name
    reassembles the graph.
    """
    parts = {s: PropertyGraph(graph.directed) for s in ("plc", "position", "io")}
    for e in graph.edges():
        src = min(e.provenance) if e.provenance else "plc"
        part = parts[src]
        for nid in (e.src, e.dst):
            if not part.has_node(nid):
                n = graph.node(nid)
                part.add_node(n.name, n.type_term, n.tier, n.properties, {src}, id=nid)
        part.add_edge(e.src, e.dst, e.relation, e.tier, e.properties, {src}, id=e.id)
    for n in graph.nodes():
        if not any(p.has_node(n.id) for p in parts.values()):
            src = min(n.provenance) if n.provenance else "plc"
            parts[src].add_node(n.name, n.type_term, n.tier, n.properties, {src}, id=n.id)
    return [parts["plc"], parts["position"], parts["io"]]
