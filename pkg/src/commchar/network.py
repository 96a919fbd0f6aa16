"""Dynamic attributed network model and file ingestion.

A dynamic attributed network is a fixed node set observed over ``theta``
time slices; each slice carries its own undirected edge set and each node
carries per-slice numeric attribute values (absent values default to 0).
Node descriptors -- raw attributes and computed topological measures --
share one discretization scheme defined here.
"""

from __future__ import annotations

import csv
import logging
import sys
from bisect import bisect_left
from dataclasses import dataclass, field
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import ConfigError, ConsistencyError, ParseError, SchemaError

logger = logging.getLogger(__name__)

ATTRIBUTE = "attribute"
TOPOLOGICAL = "topological"

# The six per-node measures computed on every slice, in canonical order.
TOPOLOGICAL_MEASURES = (
    "degree",
    "internal_degree",
    "transitivity",
    "z_score",
    "participation",
    "embeddedness",
)

# Default discretization thresholds; every threshold t splits the line into
# (..., t] and (t, ...), i.e. boundary values fall into the lower bin.
DEFAULT_THRESHOLDS = {
    "degree": (3.0, 10.0, 30.0),
    "internal_degree": (3.0, 10.0, 30.0),
    "transitivity": (0.35, 0.5, 0.7),
    "z_score": (2.5,),
    "participation": (0.05, 0.6, 0.8),
    "embeddedness": (0.3, 0.7),
}

# Attribute descriptors declared without explicit bins count occurrences:
# 1, 2, 3, 4, 5+.
DEFAULT_ATTRIBUTE_THRESHOLDS = (1.0, 2.0, 3.0, 4.0)


@dataclass(frozen=True)
class Descriptor:
    """One per-node, per-slice quantity with a discretized domain.

    ``thresholds`` is the ascending list of bin edges; k edges define k+1
    half-open bins (-inf, t1], (t1, t2], ..., (tk, +inf).
    """

    id: int
    name: str
    kind: str
    thresholds: tuple[float, ...]

    def __post_init__(self):
        if self.kind not in (ATTRIBUTE, TOPOLOGICAL):
            raise ConfigError(f"descriptor {self.name!r}: unknown kind {self.kind!r}")
        if any(b >= a for b, a in zip(self.thresholds, self.thresholds[1:])):
            raise ConfigError(f"descriptor {self.name!r}: thresholds must be strictly increasing")
        if any(ch in self.name for ch in "=,()\t"):
            raise ConfigError(f"descriptor {self.name!r}: name may not contain '=', ',', parentheses or tabs")

    @property
    def bin_count(self) -> int:
        return len(self.thresholds) + 1

    def bin_of(self, value: float) -> int:
        """Index of the unique bin containing ``value``."""
        return bisect_left(self.thresholds, value)

    def bin_label(self, index: int) -> str:
        if not 0 <= index < self.bin_count:
            raise IndexError(f"descriptor {self.name!r} has no bin {index}")
        if not self.thresholds:
            return "any"
        if index == 0:
            return f"<={self.thresholds[0]:g}"
        if index == len(self.thresholds):
            return f">{self.thresholds[-1]:g}"
        return f"{self.thresholds[index - 1]:g}-{self.thresholds[index]:g}"

    def bins(self) -> list[tuple[float, float]]:
        """The half-open intervals (lo, hi] realizing each bin."""
        edges = (float("-inf"),) + self.thresholds + (float("inf"),)
        return list(zip(edges[:-1], edges[1:]))


@dataclass(frozen=True)
class DescriptorSchema:
    """Ordered descriptor table: the six topological measures first, then
    the declared attributes in configuration order."""

    descriptors: tuple[Descriptor, ...]
    theta: int

    def __post_init__(self):
        if self.theta < 1:
            raise ConfigError(f"theta must be >= 1, got {self.theta}")
        names = [d.name for d in self.descriptors]
        if len(set(names)) != len(names):
            raise ConfigError("duplicate descriptor names in schema")
        if [d.id for d in self.descriptors] != list(range(len(self.descriptors))):
            raise ConfigError("descriptor ids must be dense and ordered")

    def __len__(self) -> int:
        return len(self.descriptors)

    def by_name(self, name: str) -> Descriptor:
        for d in self.descriptors:
            if d.name == name:
                return d
        raise SchemaError(f"undeclared descriptor {name!r}")

    @property
    def attributes(self) -> tuple[Descriptor, ...]:
        return tuple(d for d in self.descriptors if d.kind == ATTRIBUTE)

    @property
    def topological(self) -> tuple[Descriptor, ...]:
        return tuple(d for d in self.descriptors if d.kind == TOPOLOGICAL)


def build_schema(
    theta: int,
    attribute_thresholds: dict[str, tuple[float, ...]] | None = None,
    topological_overrides: dict[str, tuple[float, ...]] | None = None,
    disabled_measures: set[str] | None = None,
) -> DescriptorSchema:
    """Assemble a schema from attribute declarations and measure overrides."""
    topological_overrides = topological_overrides or {}
    disabled_measures = disabled_measures or set()
    unknown = set(topological_overrides) | disabled_measures
    unknown -= set(TOPOLOGICAL_MEASURES)
    if unknown:
        raise ConfigError(f"unknown topological measures: {sorted(unknown)}")
    descriptors: list[Descriptor] = []
    for name in TOPOLOGICAL_MEASURES:
        if name in disabled_measures:
            continue
        thresholds = tuple(topological_overrides.get(name, DEFAULT_THRESHOLDS[name]))
        descriptors.append(Descriptor(len(descriptors), name, TOPOLOGICAL, thresholds))
    for name, thresholds in (attribute_thresholds or {}).items():
        descriptors.append(Descriptor(len(descriptors), name, ATTRIBUTE, tuple(thresholds)))
    return DescriptorSchema(tuple(descriptors), theta)


def load_schema(path: str | Path) -> DescriptorSchema:
    """Parse a TOML descriptor configuration.

    Expected shape::

        theta = 10
        [descriptor.icml]
        kind = "attribute"
        bins = [1, 2, 3, 4]
        [descriptor.degree]
        kind = "topological"
        bins = [3, 10, 30]

    Topological measures are always present with default bins unless
    overridden or disabled with ``enabled = false``.
    """
    with open(path, "rb") as fh:
        try:
            raw = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise ParseError(f"{path}: {exc}") from exc
    if "theta" not in raw:
        raise ConfigError(f"{path}: missing required key 'theta'")
    theta = raw["theta"]
    if not isinstance(theta, int):
        raise ConfigError(f"{path}: theta must be an integer")
    attributes: dict[str, tuple[float, ...]] = {}
    overrides: dict[str, tuple[float, ...]] = {}
    disabled: set[str] = set()
    for name, entry in raw.get("descriptor", {}).items():
        if not isinstance(entry, dict):
            raise ConfigError(f"{path}: descriptor.{name} must be a table")
        kind = entry.get("kind", ATTRIBUTE)
        bins = entry.get("bins")
        if bins is not None:
            bins = tuple(float(b) for b in bins)
        if kind == TOPOLOGICAL:
            if name not in TOPOLOGICAL_MEASURES:
                raise ConfigError(f"{path}: unknown topological measure {name!r}")
            if not entry.get("enabled", True):
                disabled.add(name)
            elif bins is not None:
                overrides[name] = bins
        elif kind == ATTRIBUTE:
            attributes[name] = bins if bins is not None else DEFAULT_ATTRIBUTE_THRESHOLDS
        else:
            raise ConfigError(f"{path}: descriptor.{name}: unknown kind {kind!r}")
    return build_schema(theta, attributes, overrides, disabled)


@dataclass(frozen=True)
class StaticGraph:
    """Undirected simple graph over the full node set of one time slice."""

    num_nodes: int
    adjacency: tuple[frozenset[int], ...]

    @property
    def node_count(self) -> int:
        return self.num_nodes

    @property
    def edge_count(self) -> int:
        return sum(len(nbrs) for nbrs in self.adjacency) // 2

    def neighbors(self, v: int) -> frozenset[int]:
        if not 0 <= v < self.num_nodes:
            raise IndexError(f"node {v} out of range")
        return self.adjacency[v]

    def edges(self):
        for u in range(self.num_nodes):
            for v in self.adjacency[u]:
                if u < v:
                    yield (u, v)


def graph_from_edges(num_nodes: int, edges) -> StaticGraph:
    adj: list[set[int]] = [set() for _ in range(num_nodes)]
    for u, v in edges:
        adj[u].add(v)
        adj[v].add(u)
    return StaticGraph(num_nodes, tuple(frozenset(s) for s in adj))


@dataclass(frozen=True)
class DynamicAttributedNetwork:
    """Fixed node set, ``theta`` edge-set slices, per-slice attribute values.

    Node ids are dense integers assigned to the sorted external labels;
    ``labels`` maps ids back for reporting. Attribute values are stored
    sparsely; a missing key means 0.
    """

    labels: tuple[str, ...]
    num_slices: int
    slices: tuple[frozenset[tuple[int, int]], ...]
    schema: DescriptorSchema
    attribute_values: dict[tuple[int, int, int], float] = field(default_factory=dict)

    def __post_init__(self):
        if self.num_slices != len(self.slices):
            raise ConsistencyError("slice count does not match theta")
        n = len(self.labels)
        for j, edges in enumerate(self.slices):
            for u, v in edges:
                if u == v:
                    raise ConsistencyError(f"slice {j}: self-loop on node {u}")
                if not (0 <= u < v < n):
                    raise ConsistencyError(f"slice {j}: edge ({u},{v}) not canonical over {n} nodes")
        for (node, j, desc) in self.attribute_values:
            if not 0 <= node < n:
                raise ConsistencyError(f"attribute value for unknown node id {node}")
            if not 0 <= j < self.num_slices:
                raise ConsistencyError(f"attribute value for slice {j} >= theta={self.num_slices}")
            if not 0 <= desc < len(self.schema):
                raise ConsistencyError(f"attribute value for unknown descriptor id {desc}")

    @property
    def num_nodes(self) -> int:
        return len(self.labels)

    def label_to_id(self) -> dict[str, int]:
        return {lbl: i for i, lbl in enumerate(self.labels)}

    def attribute_value(self, node: int, slice_index: int, descriptor_id: int) -> float:
        return self.attribute_values.get((node, slice_index, descriptor_id), 0.0)


def slice_graph(net: DynamicAttributedNetwork, j: int) -> StaticGraph:
    """The undirected simple graph of slice ``j`` over the full node set."""
    if not 0 <= j < net.num_slices:
        raise IndexError(f"slice {j} out of range [0, {net.num_slices})")
    return graph_from_edges(net.num_nodes, net.slices[j])


def load_network(
    edge_path: str | Path,
    attr_path: str | Path | None,
    schema: DescriptorSchema,
) -> DynamicAttributedNetwork:
    """Load a network from an edge CSV and an optional attribute CSV.

    Edge CSV header: ``slice,src,dst`` (one undirected edge per row);
    attribute CSV header: ``node,slice,descriptor,value``. The node set is
    the set of labels appearing in the edge file. Duplicate edges within a
    slice collapse silently; attributes absent for a (node, slice) are 0.
    """
    theta = schema.theta
    raw_edges: list[tuple[int, str, str]] = []
    labels: set[str] = set()
    with open(edge_path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["slice", "src", "dst"]:
            raise ParseError(f"{edge_path}: expected header 'slice,src,dst'")
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != 3:
                raise ParseError(f"{edge_path}:{lineno}: expected 3 fields, got {len(row)}")
            try:
                j = int(row[0])
            except ValueError as exc:
                raise ParseError(f"{edge_path}:{lineno}: bad slice index {row[0]!r}") from exc
            src, dst = row[1].strip(), row[2].strip()
            if not src or not dst:
                raise ParseError(f"{edge_path}:{lineno}: empty node label")
            if src == dst:
                raise ParseError(f"{edge_path}:{lineno}: self-loop on {src!r}")
            if not 0 <= j < theta:
                raise ConsistencyError(f"{edge_path}:{lineno}: slice {j} >= theta={theta}")
            raw_edges.append((j, src, dst))
            labels.add(src)
            labels.add(dst)

    ordered = tuple(sorted(labels))
    ids = {lbl: i for i, lbl in enumerate(ordered)}
    slice_edges: list[set[tuple[int, int]]] = [set() for _ in range(theta)]
    for j, src, dst in raw_edges:
        u, v = ids[src], ids[dst]
        edge = (u, v) if u < v else (v, u)
        if edge in slice_edges[j]:
            logger.debug("collapsing duplicate edge %s-%s in slice %d", src, dst, j)
        slice_edges[j].add(edge)

    values: dict[tuple[int, int, int], float] = {}
    if attr_path is not None:
        with open(attr_path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or [h.strip() for h in header] != ["node", "slice", "descriptor", "value"]:
                raise ParseError(f"{attr_path}: expected header 'node,slice,descriptor,value'")
            for lineno, row in enumerate(reader, start=2):
                if not row or (len(row) == 1 and not row[0].strip()):
                    continue
                if len(row) != 4:
                    raise ParseError(f"{attr_path}:{lineno}: expected 4 fields, got {len(row)}")
                node_label = row[0].strip()
                if node_label not in ids:
                    raise ConsistencyError(f"{attr_path}:{lineno}: unknown node label {node_label!r}")
                try:
                    j = int(row[1])
                except ValueError as exc:
                    raise ParseError(f"{attr_path}:{lineno}: bad slice index {row[1]!r}") from exc
                if not 0 <= j < theta:
                    raise ConsistencyError(f"{attr_path}:{lineno}: slice {j} >= theta={theta}")
                descriptor = schema.by_name(row[2].strip())
                if descriptor.kind != ATTRIBUTE:
                    raise SchemaError(f"{attr_path}:{lineno}: {descriptor.name!r} is not an attribute")
                try:
                    value = float(row[3])
                except ValueError as exc:
                    raise ParseError(f"{attr_path}:{lineno}: bad value {row[3]!r}") from exc
                if value < 0:
                    raise ParseError(f"{attr_path}:{lineno}: negative attribute value {value}")
                key = (ids[node_label], j, descriptor.id)
                if key in values:
                    logger.debug("overriding duplicate attribute row at %s:%d", attr_path, lineno)
                if value != 0.0:
                    values[key] = value

    return DynamicAttributedNetwork(ordered, theta, tuple(frozenset(s) for s in slice_edges), schema, values)


def write_network(net: DynamicAttributedNetwork, edge_path: str | Path, attr_path: str | Path) -> None:
    """Emit the edge and attribute CSVs back out (round-trip counterpart)."""
    with open(edge_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["slice", "src", "dst"])
        for j, edges in enumerate(net.slices):
            for u, v in sorted(edges):
                writer.writerow([j, net.labels[u], net.labels[v]])
    with open(attr_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["node", "slice", "descriptor", "value"])
        for (node, j, desc), value in sorted(net.attribute_values.items()):
            writer.writerow([net.labels[node], j, net.schema.descriptors[desc].name, f"{value:g}"])
