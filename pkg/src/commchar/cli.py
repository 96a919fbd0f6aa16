"""Batch command-line front end.

Subcommands walk the pipeline stages: ``communities`` (partition CSV + Q),
``measures`` (per-node per-slice dump), ``builddb`` (sequence database),
``mine`` (pattern JSONL from a database dump), ``characterize`` (full
pipeline into a JSON report) and ``report`` (summarize a report file).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from .community import aggregate, louvain, modularity
from .errors import CommCharError
from .measures import compute_measure_table
from .mining import mine_closed
from .network import load_network, load_schema
from .pipeline import (
    PipelineConfig,
    pattern_json,
    run_pipeline,
    write_measures_csv,
    write_partition_csv,
    write_patterns_jsonl,
)
from .seqdb import build_database, dump_database, load_database

logger = logging.getLogger(__name__)


def _threads(args) -> int:
    if args.threads is not None:
        return args.threads
    env = os.environ.get("COMMCHAR_THREADS")
    return int(env) if env else 1


def _add_common_inputs(p, attrs_required=False):
    p.add_argument("--edges", required=True, help="edge CSV (slice,src,dst)")
    p.add_argument("--config", required=True, help="descriptor TOML config")
    p.add_argument("--attrs", required=attrs_required, help="attribute CSV (node,slice,descriptor,value)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="commchar",
        description="Characterize communities of a dynamic attributed network "
        "through closed sequential patterns over discretized node descriptors.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    parser.add_argument("--threads", type=int, default=None, help="worker pool size (or COMMCHAR_THREADS)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("communities", help="partition the aggregated graph and print modularity")
    _add_common_inputs(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="partition CSV output (node,community)")

    p = sub.add_parser("measures", help="dump per-node per-slice measures")
    _add_common_inputs(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="measure CSV output")

    p = sub.add_parser("builddb", help="build and dump the sequence database")
    _add_common_inputs(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="database dump output (TSV)")

    p = sub.add_parser("mine", help="mine closed patterns from a database dump")
    p.add_argument("--db", required=True, help="database dump produced by builddb")
    p.add_argument("--min-sup", default="0.3", help="minimum support in (0,1]")
    p.add_argument("--community", type=int, default=None, help="mine one community only")
    p.add_argument("--min-community-size", type=int, default=10)
    p.add_argument("--maximal", action="store_true", help="keep only maximal patterns")
    p.add_argument("--max-length", type=int, default=None)
    p.add_argument("--max-patterns", type=int, default=100_000)
    p.add_argument("--out", help="pattern JSONL output (default: stdout)")

    p = sub.add_parser("characterize", help="run the full pipeline into a JSON report")
    _add_common_inputs(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--min-sup", default="0.3")
    p.add_argument("--min-community-size", type=int, default=10)
    p.add_argument("--max-uncovered", type=int, default=5)
    p.add_argument("--distance-anchor", choices=["union", "first"], default="union")
    p.add_argument("--maximal", action="store_true")
    p.add_argument("--max-length", type=int, default=None)
    p.add_argument("--max-patterns", type=int, default=100_000)
    p.add_argument("--out", required=True, help="report JSON output")
    p.add_argument("--partition-out", help="also write the partition CSV")
    p.add_argument("--measures-out", help="also write the measure CSV")
    p.add_argument("--patterns-out", help="also write all mined patterns as JSONL")
    p.add_argument("--dry-run", action="store_true", help="validate inputs, write nothing")

    p = sub.add_parser("report", help="summarize an existing report JSON")
    p.add_argument("--report", required=True)
    return parser


def cmd_communities(args) -> int:
    schema = load_schema(args.config)
    net = load_network(args.edges, args.attrs, schema)
    graph = aggregate(net)
    cs = louvain(graph, args.seed)
    q = modularity(graph, cs)
    if args.out:
        write_partition_csv(net, cs, args.out)
    sizes = sorted(cs.sizes().values(), reverse=True)
    print(f"communities: {cs.num_communities}  modularity: {q:.4f}  largest: {sizes[0] if sizes else 0}")
    return 0


def cmd_measures(args) -> int:
    schema = load_schema(args.config)
    net = load_network(args.edges, args.attrs, schema)
    cs = louvain(aggregate(net), args.seed)
    table = compute_measure_table(net, cs)
    write_measures_csv(net, table, args.out)
    print(f"wrote {net.num_nodes * net.num_slices * 6} measure rows to {args.out}")
    return 0


def cmd_builddb(args) -> int:
    schema = load_schema(args.config)
    net = load_network(args.edges, args.attrs, schema)
    cs = louvain(aggregate(net), args.seed)
    table = compute_measure_table(net, cs)
    db = build_database(net, table, cs)
    dump_database(db, args.out)
    print(f"wrote {len(db)} node sequences to {args.out}")
    return 0


def cmd_mine(args) -> int:
    db = load_database(args.db)
    sizes = {cid: len(nodes) for cid, nodes in db.communities().items()}
    if args.community is not None:
        targets = [args.community]
    else:
        targets = sorted(cid for cid, n in sizes.items() if n >= args.min_community_size)
    rows = []
    for cid in targets:
        patterns = mine_closed(
            db,
            cid,
            args.min_sup,
            maximal=args.maximal,
            min_community_size=args.min_community_size if args.community is not None else 1,
            max_length=args.max_length,
            max_patterns=args.max_patterns,
        )
        logger.info("community %d: %d patterns", cid, len(patterns))
        rows.extend(dict(pattern_json(p, db), community=cid) for p in patterns)
    if args.out:
        write_patterns_jsonl(rows, args.out)
        print(f"wrote {len(rows)} patterns to {args.out}")
    else:
        for row in rows:
            print(json.dumps(row, sort_keys=True, ensure_ascii=False))
    return 0


def cmd_characterize(args) -> int:
    cfg = PipelineConfig(
        edges=args.edges,
        config=args.config,
        attrs=args.attrs,
        seed=args.seed,
        min_sup=args.min_sup,
        min_community_size=args.min_community_size,
        max_uncovered=args.max_uncovered,
        distance_anchor=args.distance_anchor,
        maximal=args.maximal,
        max_patterns=args.max_patterns,
        max_length=args.max_length,
        threads=_threads(args),
        report_out=None if args.dry_run else args.out,
        partition_out=args.partition_out,
        measures_out=args.measures_out,
        patterns_out=args.patterns_out,
        dry_run=args.dry_run,
    )
    report = run_pipeline(cfg)
    if args.dry_run:
        print("dry run ok")
    else:
        n = len(report["characterizations"])
        print(f"characterized {n} communities -> {args.out}")
    return 0


def cmd_report(args) -> int:
    with open(args.report, encoding="utf-8") as fh:
        report = json.load(fh)
    if report.get("dry_run"):
        print("(dry-run report, nothing to summarize)")
        return 0
    comm = report["communities"]
    print(
        f"nodes: {report['network']['nodes']}  slices: {report['network']['slices']}  "
        f"communities: {comm['count']} (singletons {comm['singletons']})  "
        f"modularity: {comm['modularity']:.4f}"
    )
    for c in report["characterizations"]:
        top = c["top_support"]
        top_desc = "-" if top is None else f"len {top['length']} sup {top['support']:.2f}"
        growth = "-"
        if c["selected"]:
            g = c["selected"][0]["growth_rate"]
            growth = g if g == "inf" else f"{g:.2f}"
        print(
            f"community {c['community']:>4}  size {c['size']:>5}  top-support {top_desc}  "
            f"top-growth Gr {growth}  selected {len(c['selected'])}  deviants {len(c['deviants'])}"
        )
        for label in c["deviants"]:
            print(f"    deviant: {label}")
    return 0


COMMANDS = {
    "communities": cmd_communities,
    "measures": cmd_measures,
    "builddb": cmd_builddb,
    "mine": cmd_mine,
    "characterize": cmd_characterize,
    "report": cmd_report,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return COMMANDS[args.command](args)
    except CommCharError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
