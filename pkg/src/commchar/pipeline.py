"""Batch orchestration: load, partition, measure, build, mine, select, report.

The JSON report is the primary artifact; the partition/measure/pattern
files are debug side outputs. All stages are seeded and tie-broken
deterministically, so identical configs produce byte-identical reports.
"""

from __future__ import annotations

import csv
import json
import logging
import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from pathlib import Path

from .community import aggregate, louvain, modularity
from .errors import ConfigError
from .mining import DEFAULT_MAX_PATTERNS, Pattern, as_min_sup, mine_closed
from .network import DynamicAttributedNetwork, load_network, load_schema
from .measures import MEASURE_INDEX, compute_measure_table
from .selection import (
    DEFAULT_MAX_UNCOVERED,
    CommunityCharacterization,
    select_representatives,
)
from .seqdb import SequenceDatabase, build_database

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PipelineConfig:
    """Everything one run needs; round-trips losslessly through a dict."""

    edges: str
    config: str
    attrs: str | None = None
    seed: int = 0
    min_sup: str = "0.3"
    min_community_size: int = 10
    max_uncovered: int = DEFAULT_MAX_UNCOVERED
    distance_anchor: str = "union"
    maximal: bool = False
    max_patterns: int = DEFAULT_MAX_PATTERNS
    max_length: int | None = None
    threads: int = 1
    report_out: str | None = None
    partition_out: str | None = None
    measures_out: str | None = None
    patterns_out: str | None = None
    dry_run: bool = False

    def validate(self) -> None:
        as_min_sup(self.min_sup)  # raises InvalidSupportError out of range
        if self.min_community_size < 1:
            raise ConfigError("min_community_size must be >= 1")
        if self.max_uncovered < 0:
            raise ConfigError("max_uncovered must be >= 0")
        if self.distance_anchor not in ("union", "first"):
            raise ConfigError(f"distance_anchor must be 'union' or 'first', got {self.distance_anchor!r}")
        if self.max_patterns < 1:
            raise ConfigError("max_patterns must be >= 1")
        if self.max_length is not None and self.max_length < 1:
            raise ConfigError("max_length must be >= 1 when set")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "PipelineConfig":
        return cls(**data)

    def min_sup_fraction(self) -> Fraction:
        return as_min_sup(self.min_sup)


def growth_json(value):
    """JSON encoding of a growth rate: a float, or the string 'inf'."""
    return "inf" if value == math.inf else float(value)


def pattern_json(p: Pattern, db: SequenceDatabase) -> dict:
    return {
        "sequence": [[db.item_name(it) for it in element] for element in p.sequence],
        "pretty": p.pretty(db),
        "length": p.length,
        "support": float(p.support),
        "support_exact": str(p.support),
        "growth_rate": growth_json(p.growth_rate),
        "supporters": sorted(db.labels[n] for n in p.supporting_nodes),
    }


def characterization_json(c: CommunityCharacterization, db: SequenceDatabase, size: int) -> dict:
    return {
        "community": c.community,
        "size": size,
        "top_support": None if c.top_support is None else pattern_json(c.top_support, db),
        "selected": [pattern_json(p, db) for p in c.selected],
        "coverage_trace": [
            {
                "pattern": step.pattern.pretty(db),
                "jaccard_distance": step.distance,
                "newly_covered": step.newly_covered,
            }
            for step in c.trace
        ],
        "covered": len(c.covered),
        "deviants": sorted(db.labels[n] for n in c.deviants),
    }


def write_partition_csv(net: DynamicAttributedNetwork, cs, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["node", "community"])
        for node in range(net.num_nodes):
            writer.writerow([net.labels[node], cs.assignment[node]])


def write_measures_csv(net: DynamicAttributedNetwork, table, path: str | Path) -> None:
    schema_by_name = {d.name: d for d in net.schema.topological}
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["node", "slice", "measure", "value", "bin"])
        for node in range(net.num_nodes):
            for j in range(net.num_slices):
                for name in MEASURE_INDEX:
                    value = table.value(node, j, name)
                    d = schema_by_name.get(name)
                    label = d.bin_label(d.bin_of(value)) if d is not None else "-"
                    writer.writerow([net.labels[node], j, name, f"{value:.6g}", label])


def write_patterns_jsonl(rows: list[dict], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, sort_keys=True, ensure_ascii=False) + "\n")


def run_pipeline(cfg: PipelineConfig) -> dict:
    """Execute the four stages end to end and return the report dict.

    With ``dry_run`` all inputs are loaded and validated but nothing is
    computed or written.
    """
    cfg.validate()
    schema = load_schema(cfg.config)
    net = load_network(cfg.edges, cfg.attrs, schema)
    if cfg.dry_run:
        logger.info("dry run: inputs valid (%d nodes, %d slices)", net.num_nodes, net.num_slices)
        return {"dry_run": True, "nodes": net.num_nodes, "slices": net.num_slices}

    graph = aggregate(net)
    cs = louvain(graph, cfg.seed)
    q = modularity(graph, cs)
    table = compute_measure_table(net, cs)
    db = build_database(net, table, cs)

    sizes = cs.sizes()
    eligible = sorted(cid for cid, n in sizes.items() if n >= cfg.min_community_size)
    min_sup = cfg.min_sup_fraction()

    def run_one(cid: int):
        patterns = mine_closed(
            db,
            cid,
            min_sup,
            maximal=cfg.maximal,
            max_length=cfg.max_length,
            max_patterns=cfg.max_patterns,
        )
        logger.info("community %d: %d closed patterns", cid, len(patterns))
        members = cs.communities[cid]
        if not patterns:
            char = CommunityCharacterization(cid, None, (), frozenset(), members, ())
        else:
            char = select_representatives(
                patterns, members, cfg.max_uncovered, cfg.distance_anchor
            )
        return patterns, char

    if cfg.threads > 1 and len(eligible) > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            outcomes = dict(zip(eligible, pool.map(run_one, eligible)))
    else:
        outcomes = {cid: run_one(cid) for cid in eligible}

    report = {
        "config": cfg.to_dict(),
        "network": {
            "nodes": net.num_nodes,
            "slices": net.num_slices,
            "descriptors": len(schema),
            "aggregated_edges": len(graph.weights),
        },
        "communities": {
            "count": cs.num_communities,
            "modularity": q,
            "singletons": sum(1 for n in sizes.values() if n == 1),
            "largest": max(sizes.values(), default=0),
            "characterized": eligible,
        },
        "pattern_counts": {str(cid): len(outcomes[cid][0]) for cid in eligible},
        "characterizations": [
            characterization_json(outcomes[cid][1], db, sizes[cid]) for cid in eligible
        ],
    }

    if cfg.partition_out:
        write_partition_csv(net, cs, cfg.partition_out)
    if cfg.measures_out:
        write_measures_csv(net, table, cfg.measures_out)
    if cfg.patterns_out:
        rows = [
            dict(pattern_json(p, db), community=cid)
            for cid in eligible
            for p in outcomes[cid][0]
        ]
        write_patterns_jsonl(rows, cfg.patterns_out)
    if cfg.report_out:
        with open(cfg.report_out, "w", encoding="utf-8") as fh:
            json.dump(report, fh, sort_keys=True, indent=2, ensure_ascii=False)
            fh.write("\n")
    return report
