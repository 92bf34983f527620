"""Command-line pipeline: ingest -> merge -> mine -> templatize -> expand/export.

Every stage reads and writes JSON so stages can be run, inspected and
resumed separately; ``pipeline`` runs them all from one config file.

Exit codes: 0 success, 1 internal error, 2 usage or validation error.
"""

from __future__ import annotations

import argparse
import configparser
import json
import sys
import time
from pathlib import Path
from typing import Sequence

from dtgraph import __version__
from dtgraph.errors import DtGraphError, ValidationError
from dtgraph.export import FORMATS, dump_json, load_json, templatized_to_dot, to_dot, to_graphml
from dtgraph.graph import SOURCES, PropertyGraph
from dtgraph.ingest import DEFAULT_CUTOFF, DEFAULT_THRESHOLD, parse_source
from dtgraph.merge import MergePolicy, merge_graphs
from dtgraph.miner.gspan import DEFAULT_MAX_PATTERNS, MiningParams, Pattern, mine_frequent
from dtgraph.miner.matching import MODES
from dtgraph.ontology import Taxonomy, load_taxonomy
from dtgraph.template import (
    DEFAULT_MAX_TEMPLATES,
    TemplatizedGraph,
    compression_stats,
    expand,
    templatize,
)

EXIT_OK, EXIT_INTERNAL, EXIT_USAGE = 0, 1, 2


class UsageError(ValidationError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: {message}")


# ---------------------------------------------------------------- helpers

def _tiers(text: str) -> frozenset[int]:
    try:
        tiers = frozenset(int(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"tiers must be comma-separated integers, got {text!r}") from None
    if not tiers <= {1, 2, 3, 4}:
        raise argparse.ArgumentTypeError(f"tiers must lie in 1..4, got {text!r}")
    return tiers


def _priority(text: str) -> tuple[str, ...]:
    return tuple(s.strip() for s in text.split(",") if s.strip())


def _taxonomy(path: str | None) -> Taxonomy | None:
    if path is None:
        return None
    if not Path(path).is_file():
        raise ValidationError(f"taxonomy file not found: {path}")
    return load_taxonomy(path)


def _read_graph(path: str | Path) -> PropertyGraph:
    doc = load_json(path)
    if isinstance(doc, dict) and "templates" in doc:
        raise ValidationError(f"{path}: is a template library, expected a graph")
    return PropertyGraph.from_dict(doc)


def _read_graph_or_library(path: str | Path) -> PropertyGraph | TemplatizedGraph:
    doc = load_json(path)
    if isinstance(doc, dict) and "templates" in doc:
        return TemplatizedGraph.from_dict(doc)
    return PropertyGraph.from_dict(doc)


def _read_patterns(path: str | Path) -> tuple[list[Pattern], dict]:
    doc = load_json(path)
    if not isinstance(doc, dict) or "patterns" not in doc:
        raise ValidationError(f"{path}: not a pattern report")
    params = doc.get("params", {})
    mode = params.get("mode", "exact")
    return [Pattern.from_dict(p, mode) for p in doc["patterns"]], params


def pattern_report(params: MiningParams, patterns: Sequence[Pattern]) -> dict:
    return {"params": params.to_dict(), "patterns": [p.to_dict() for p in patterns]}


def _write_text(path: str | Path, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8")


def _info(msg: str) -> None:
    print(msg, file=sys.stderr)


# ---------------------------------------------------------------- commands

def cmd_ingest(args) -> int:
    outdir = Path(args.out_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    for f in args.files:
        graph = parse_source(f, threshold=args.threshold, cutoff=args.cutoff)
        target = outdir / (Path(f).stem + ".graph.json")
        dump_json(graph.to_dict(), target)
        print(f"{target}\t{graph.number_of_nodes()} nodes\t{graph.number_of_edges()} edges")
    return EXIT_OK


def _policy(args) -> MergePolicy:
    return MergePolicy(
        case_fold=not args.no_case_fold,
        trim=not args.no_trim,
        priority=args.priority,
        semantic_merge=not args.no_semantic,
    )


def cmd_merge(args) -> int:
    taxonomy = _taxonomy(args.taxonomy)
    parts = [_read_graph(p) for p in args.parts]
    merged, report = merge_graphs(parts, taxonomy, _policy(args))
    dump_json(merged.to_dict(), args.out)
    if args.report:
        dump_json(report.to_dict(), args.report)
    print(f"{args.out}\t{report.nodes_after} nodes\t{report.edges_after} edges\t"
          f"{report.component_count} components")
    return EXIT_OK


def _params(args) -> MiningParams:
    return MiningParams(
        min_support=args.min_support,
        max_edges=args.max_edges,
        mode=args.mode,
        closed_only=args.closed,
        tier_set=args.tiers,
        max_patterns=args.max_patterns,
    )


def cmd_mine(args) -> int:
    params = _params(args)
    taxonomy = _taxonomy(args.taxonomy)
    graph = _read_graph(args.graph)
    patterns = mine_frequent(graph, params, taxonomy)
    dump_json(pattern_report(params, patterns), args.out)
    print(f"{args.out}\t{len(patterns)} patterns")
    return EXIT_OK


def cmd_templatize(args) -> int:
    taxonomy = _taxonomy(args.taxonomy)
    source = _read_graph_or_library(args.graph)
    patterns, _ = _read_patterns(args.patterns)
    tg = templatize(source, patterns, args.max_templates, taxonomy)
    dump_json(tg.to_dict(), args.out)
    base = expand(source) if isinstance(source, TemplatizedGraph) else source
    stats = compression_stats(base, tg)
    if args.stats:
        dump_json(stats.to_dict(), args.stats)
    print(f"{args.out}\t{stats.templates} templates\t{stats.instances} instances\tratio {stats.ratio:.3f}")
    return EXIT_OK


def cmd_expand(args) -> int:
    tg = TemplatizedGraph.from_dict(load_json(args.library))
    graph = expand(tg)
    dump_json(graph.to_dict(), args.out)
    print(f"{args.out}\t{graph.number_of_nodes()} nodes\t{graph.number_of_edges()} edges")
    return EXIT_OK


def export_text(obj: PropertyGraph | TemplatizedGraph, fmt: str) -> str:
    if fmt not in FORMATS:
        raise UsageError(f"unknown export format {fmt!r}; expected one of {', '.join(FORMATS)}")
    if fmt == "json":
        return json.dumps(obj.to_dict(), indent=2, sort_keys=True, ensure_ascii=False) + "\n"
    if isinstance(obj, TemplatizedGraph):
        return templatized_to_dot(obj) if fmt == "dot" else to_graphml(expand(obj))
    return to_dot(obj) if fmt == "dot" else to_graphml(obj)


def cmd_export(args) -> int:
    text = export_text(_read_graph_or_library(args.input), args.format)
    if args.out:
        _write_text(args.out, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_report(args) -> int:
    from dtgraph.plotting import render_report

    patterns, params = _read_patterns(args.patterns)
    tg = TemplatizedGraph.from_dict(load_json(args.library)) if args.library else None
    for path in render_report(patterns, tg, args.out_dir, params.get("min_support"), args.seed):
        print(path)
    return EXIT_OK


def cmd_fixtures(args) -> int:
    from dtgraph.synthetic import TAXONOMY_DOC, warehouse_sources

    outdir = Path(args.out_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    for doc in warehouse_sources():
        dump_json(doc, outdir / f"warehouse_{doc['source']}.json")
    dump_json(TAXONOMY_DOC, outdir / "taxonomy.json")
    _write_text(outdir / "pipeline.cfg", "\n".join([
        "# dtgraph pipeline for the warehouse fixture",
        "plc = warehouse_plc.json",
        "position = warehouse_position.json",
        "io = warehouse_io.json",
        "taxonomy = taxonomy.json",
        "min_support = 4",
        "max_edges = 8",
        "out_dir = out",
        "formats = json,graphml,dot",
        "report = true",
        "",
    ]))
    print(outdir)
    return EXIT_OK


# ---------------------------------------------------------------- pipeline

CONFIG_KEYS = {
    "plc", "position", "io", "taxonomy",
    "case_fold", "trim", "priority", "semantic_merge",
    "threshold", "cutoff",
    "min_support", "max_edges", "mode", "closed", "tiers", "max_patterns",
    "max_templates", "out_dir", "formats", "report", "seed",
}


def load_config(path: str | Path) -> dict:
    """Flat ``key = value`` file; paths are resolved against the file's folder."""
    path = Path(path)
    if not path.is_file():
        raise ValidationError(f"config file not found: {path}")
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#",))
    try:
        cp.read_string("[pipeline]\n" + path.read_text(encoding="utf-8"), source=str(path))
    except configparser.Error as exc:
        raise ValidationError(f"{path}: {exc}") from None
    raw = dict(cp["pipeline"])
    unknown = sorted(set(raw) - CONFIG_KEYS)
    if unknown:
        raise ValidationError(f"{path}: unknown config keys {unknown}")
    sec = cp["pipeline"]
    base = path.parent

    def files(key):
        return [str(base / p.strip()) for p in raw.get(key, "").split(",") if p.strip()]

    try:
        cfg = {
            "inputs": {s: files(s) for s in SOURCES},
            "taxonomy": str(base / raw["taxonomy"]) if raw.get("taxonomy") else None,
            "policy": MergePolicy(
                case_fold=sec.getboolean("case_fold", True),
                trim=sec.getboolean("trim", True),
                priority=_priority(raw.get("priority", "plc,io,position")),
                semantic_merge=sec.getboolean("semantic_merge", True),
            ),
            "threshold": sec.getfloat("threshold", DEFAULT_THRESHOLD),
            "cutoff": sec.getfloat("cutoff", DEFAULT_CUTOFF),
            "params": MiningParams(
                min_support=sec.getint("min_support", 2),
                max_edges=sec.getint("max_edges", 8),
                mode=raw.get("mode", "exact"),
                closed_only=sec.getboolean("closed", False),
                tier_set=_tiers(raw.get("tiers", "1,2")),
                max_patterns=sec.getint("max_patterns", DEFAULT_MAX_PATTERNS),
            ),
            "max_templates": sec.getint("max_templates", DEFAULT_MAX_TEMPLATES),
            "out_dir": str(base / raw.get("out_dir", "out")),
            "formats": [f.strip() for f in raw.get("formats", "json").split(",") if f.strip()],
            "report": sec.getboolean("report", False),
            "seed": sec.getint("seed", 0),
        }
    except (ValueError, argparse.ArgumentTypeError) as exc:
        raise ValidationError(f"{path}: {exc}") from None
    if not any(cfg["inputs"].values()):
        raise ValidationError(f"{path}: no input files (keys plc, position, io)")
    for f in [f for fs in cfg["inputs"].values() for f in fs] + [cfg["taxonomy"] or ""]:
        if f and not Path(f).is_file():
            raise ValidationError(f"{path}: input file not found: {f}")
    bad = [f for f in cfg["formats"] if f not in FORMATS]
    if bad:
        raise ValidationError(f"{path}: unknown export formats {bad}")
    if cfg["max_templates"] < 0:
        raise ValidationError(f"{path}: max_templates must be >= 0")
    return cfg


def run_pipeline(cfg: dict) -> dict:
    """Run every stage; returns a summary of counts and stage timings."""
    out = Path(cfg["out_dir"])
    out.mkdir(parents=True, exist_ok=True)
    timings: dict[str, float] = {}
    t0 = time.perf_counter()

    taxonomy = _taxonomy(cfg["taxonomy"])
    parts = [parse_source(f, threshold=cfg["threshold"], cutoff=cfg["cutoff"])
             for s in SOURCES for f in cfg["inputs"][s]]
    timings["ingest"] = time.perf_counter() - t0

    t = time.perf_counter()
    merged, report = merge_graphs(parts, taxonomy, cfg["policy"])
    dump_json(merged.to_dict(), out / "merged.json")
    dump_json(report.to_dict(), out / "merge_report.json")
    timings["merge"] = time.perf_counter() - t

    t = time.perf_counter()
    params = cfg["params"]
    patterns = mine_frequent(merged, params, taxonomy)
    dump_json(pattern_report(params, patterns), out / "patterns.json")
    timings["mine"] = time.perf_counter() - t

    t = time.perf_counter()
    tg = templatize(merged, patterns, cfg["max_templates"], taxonomy)
    dump_json(tg.to_dict(), out / "templates.json")
    stats = compression_stats(merged, tg)
    dump_json(stats.to_dict(), out / "compression.json")
    timings["templatize"] = time.perf_counter() - t

    for fmt in cfg["formats"]:
        if fmt == "json":
            continue  # merged.json / templates.json already written
        _write_text(out / f"abox.{fmt}", export_text(tg if fmt == "dot" else merged, fmt))
    if cfg["report"]:
        from dtgraph.plotting import render_report

        render_report(patterns, tg, out, params.min_support, cfg["seed"])
    return {
        "nodes": merged.number_of_nodes(),
        "edges": merged.number_of_edges(),
        "components": report.component_count,
        "patterns": len(patterns),
        "templates": stats.templates,
        "instances": stats.instances,
        "ratio": stats.ratio,
        "seconds": timings,
    }


def cmd_pipeline(args) -> int:
    cfg = load_config(args.config)
    if args.out_dir:
        cfg["out_dir"] = args.out_dir
    summary = run_pipeline(cfg)
    print(f"{cfg['out_dir']}\t{summary['nodes']} nodes\t{summary['edges']} edges\t"
          f"{summary['patterns']} patterns\t{summary['templates']} templates\t"
          f"{summary['instances']} instances")
    timing = ", ".join(f"{k} {v:.2f}s" for k, v in summary["seconds"].items())
    _info(f"timings: {timing}")
    return EXIT_OK


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dtgraph", description="Pattern mining and templates for Digital Twin graphs.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("ingest", help="parse source files into graph JSON")
    p.add_argument("files", nargs="+")
    p.add_argument("--out-dir", default=".")
    p.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD,
                   help="max distance for arranged_next_to (default %(default)s)")
    p.add_argument("--cutoff", type=float, default=DEFAULT_CUTOFF,
                   help="min IO correlation weight kept (default %(default)s)")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("merge", help="merge graph parts into one ABox")
    p.add_argument("parts", nargs="+")
    p.add_argument("--taxonomy")
    p.add_argument("--out", required=True)
    p.add_argument("--report", help="write the merge report JSON here")
    p.add_argument("--priority", type=_priority, default=("plc", "io", "position"),
                   help="source priority for property conflicts (default plc,io,position)")
    p.add_argument("--no-case-fold", action="store_true")
    p.add_argument("--no-trim", action="store_true")
    p.add_argument("--no-semantic", action="store_true", help="skip the ontology-based merge pass")
    p.set_defaults(func=cmd_merge)

    p = sub.add_parser("mine", help="mine frequent patterns")
    p.add_argument("graph")
    p.add_argument("--min-support", type=int, default=2)
    p.add_argument("--max-edges", type=int, default=8)
    p.add_argument("--mode", choices=MODES, default="exact")
    p.add_argument("--closed", action="store_true", help="keep closed patterns only")
    p.add_argument("--tiers", type=_tiers, default=frozenset({1, 2}), help="default 1,2")
    p.add_argument("--taxonomy")
    p.add_argument("--max-patterns", type=int, default=DEFAULT_MAX_PATTERNS)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_mine)

    p = sub.add_parser("templatize", help="promote patterns to templates")
    p.add_argument("graph", help="graph JSON or a template library for another round")
    p.add_argument("--patterns", required=True)
    p.add_argument("--max-templates", type=int, default=DEFAULT_MAX_TEMPLATES)
    p.add_argument("--taxonomy")
    p.add_argument("--out", required=True)
    p.add_argument("--stats", help="write compression statistics JSON here")
    p.set_defaults(func=cmd_templatize)

    p = sub.add_parser("expand", help="expand a template library back to the full graph")
    p.add_argument("library")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_expand)

    p = sub.add_parser("export", help="export a graph or template library")
    p.add_argument("input")
    p.add_argument("--format", required=True, help="one of: " + ", ".join(FORMATS))
    p.add_argument("--out", help="default: stdout")
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("report", help="pattern CSV and figures")
    p.add_argument("patterns")
    p.add_argument("--library", help="template library; adds the instance figure")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--seed", type=int, default=0, help="layout seed")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("pipeline", help="run all stages from a config file")
    p.add_argument("config")
    p.add_argument("--out-dir", help="overrides out_dir from the config")
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("fixtures", help="write the warehouse demo inputs and a pipeline config")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_fixtures)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "max_templates", 0) < 0:
            raise UsageError("--max-templates must be >= 0")
        return args.func(args)
    except (DtGraphError, FileNotFoundError, IsADirectoryError) as exc:
        print(f"dtgraph: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001 - last-resort contract: exit 1
        print(f"dtgraph: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
