"""Sequence database: one time-ordered itemset sequence per node.

Each slice contributes one itemset per node, combining the discretized
topological measures (suppressed when the node is isolated in that slice)
with the discretized nonzero attribute values. Empty itemsets are dropped
but keep their slice provenance alongside the surviving elements.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

from .community import CommunityStructure
from .errors import ParseError
from .measures import MeasureTable, discretize
from .network import DynamicAttributedNetwork

__all__ = [
    "Item",
    "NodeSequence",
    "DatabaseEntry",
    "SequenceDatabase",
    "build_database",
    "is_subsequence",
    "dump_database",
    "load_database",
]


class Item(NamedTuple):
    """A (descriptor, bin) pair; canonical item order is exactly this tuple order."""

    descriptor: int
    bin: int


Itemset = tuple[Item, ...]  # sorted, duplicate-free, one item per descriptor


def make_itemset(items) -> Itemset:
    itemset = tuple(sorted(set(items)))
    if len({it.descriptor for it in itemset}) != len(itemset):
        raise ValueError("itemset holds two items of the same descriptor")
    return itemset


@dataclass(frozen=True)
class NodeSequence:
    """Time-ordered nonempty itemsets plus the slice index each came from."""

    elements: tuple[Itemset, ...]
    slices: tuple[int, ...]

    def __post_init__(self):
        if len(self.elements) != len(self.slices):
            raise ValueError("element/slice provenance length mismatch")
        if any(b <= a for a, b in zip(self.slices, self.slices[1:])):
            raise ValueError("slice provenance must be strictly increasing")
        if any(not e for e in self.elements):
            raise ValueError("empty elements must be dropped, not stored")

    def __len__(self) -> int:
        return len(self.elements)


class DatabaseEntry(NamedTuple):
    node: int
    sequence: NodeSequence
    community: int


@dataclass(frozen=True)
class SequenceDatabase:
    """One entry per node: its sequence and its community label."""

    entries: tuple[DatabaseEntry, ...]
    labels: tuple[str, ...]
    item_names: dict[Item, str] = field(default_factory=dict)

    def __post_init__(self):
        nodes = [e.node for e in self.entries]
        if len(set(nodes)) != len(nodes):
            raise ValueError("duplicate node entries in database")

    def __len__(self) -> int:
        return len(self.entries)

    def sequence_of(self, node: int) -> NodeSequence:
        for entry in self.entries:
            if entry.node == node:
                return entry.sequence
        raise KeyError(f"node {node} not in database")

    def communities(self) -> dict[int, frozenset[int]]:
        members: dict[int, set[int]] = {}
        for entry in self.entries:
            members.setdefault(entry.community, set()).add(entry.node)
        return {cid: frozenset(m) for cid, m in sorted(members.items())}

    def nodes(self) -> frozenset[int]:
        return frozenset(e.node for e in self.entries)

    def item_name(self, item: Item) -> str:
        return self.item_names.get(item, f"d{item.descriptor}={item.bin}")

    def render_itemset(self, itemset: Itemset) -> str:
        return "(" + ",".join(self.item_name(it) for it in itemset) + ")"

    def render_sequence(self, elements) -> str:
        return "".join(self.render_itemset(e) for e in elements)


def build_database(
    net: DynamicAttributedNetwork,
    table: MeasureTable,
    cs: CommunityStructure,
) -> SequenceDatabase:
    """Assemble the per-node sequences from measures and attributes.

    A slice where a node is isolated emits no topological items; attribute
    value 0 emits no item. Fully empty slices are dropped from the node's
    sequence, so a node inactive everywhere gets an empty sequence.
    """
    schema = net.schema
    item_names = {
        Item(d.id, b): f"{d.name}={d.bin_label(b)}"
        for d in schema.descriptors
        for b in range(d.bin_count)
    }
    deg_idx = "degree"
    entries = []
    for node in range(net.num_nodes):
        elements: list[Itemset] = []
        slices: list[int] = []
        for j in range(net.num_slices):
            items: list[Item] = []
            if table.value(node, j, deg_idx) > 0:
                for d in schema.topological:
                    item = discretize(table.value(node, j, d.name), d)
                    if item is not None:
                        items.append(item)
            for d in schema.attributes:
                item = discretize(net.attribute_value(node, j, d.id), d)
                if item is not None:
                    items.append(item)
            if items:
                elements.append(make_itemset(items))
                slices.append(j)
        sequence = NodeSequence(tuple(elements), tuple(slices))
        entries.append(DatabaseEntry(node, sequence, cs.assignment[node]))
    return SequenceDatabase(tuple(entries), net.labels, item_names)


def is_subsequence(alpha, beta) -> bool:
    """True iff ``alpha`` embeds into ``beta`` order-preservingly.

    Each alpha itemset must be a subset of a distinct beta itemset, at
    strictly increasing positions. ``beta`` may be a NodeSequence or any
    sequence of itemsets. Greedy leftmost matching decides existence.
    """
    beta_elements = beta.elements if isinstance(beta, NodeSequence) else tuple(beta)
    pos = 0
    for element in alpha:
        needed = frozenset(element)
        while pos < len(beta_elements):
            if needed <= frozenset(beta_elements[pos]):
                break
            pos += 1
        else:
            return False
        pos += 1
    return True


_ELEMENT_RE = re.compile(r"\(([^()]*)\)")


def dump_database(db: SequenceDatabase, path: str | Path) -> None:
    """Write the tab-separated dump: node, community, rendered sequence."""
    with open(path, "w", encoding="utf-8") as fh:
        for entry in db.entries:
            rendered = db.render_sequence(entry.sequence.elements)
            fh.write(f"{db.labels[entry.node]}\t{entry.community}\t{rendered}\n")


def load_database(path: str | Path) -> SequenceDatabase:
    """Re-load a dumped database for mining.

    Items are reconstructed from their ``descriptor=binLabel`` strings:
    descriptors and bins get dense ids in lexicographic label order, which
    preserves itemset identity (the mining semantics) though not the
    original id numbering. Slice provenance is not stored in the dump, so
    elements are renumbered consecutively.
    """
    rows: list[tuple[str, int, list[list[str]]]] = []
    names: set[tuple[str, str]] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise ParseError(f"{path}:{lineno}: expected 3 tab-separated fields")
            label, community_s, rendered = parts
            try:
                community = int(community_s)
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: bad community {community_s!r}") from exc
            stripped = _ELEMENT_RE.sub("", rendered)
            if stripped.strip():
                raise ParseError(f"{path}:{lineno}: malformed sequence {rendered!r}")
            elements: list[list[str]] = []
            for match in _ELEMENT_RE.finditer(rendered):
                tokens = [t for t in match.group(1).split(",") if t]
                element = []
                for token in tokens:
                    if "=" not in token:
                        raise ParseError(f"{path}:{lineno}: bad item {token!r}")
                    name, _, bin_label = token.partition("=")
                    names.add((name, bin_label))
                    element.append((name, bin_label))
                if not element:
                    raise ParseError(f"{path}:{lineno}: empty element in {rendered!r}")
                elements.append(element)
            rows.append((label, community, elements))

    descriptor_ids = {name: i for i, name in enumerate(sorted({n for n, _ in names}))}
    bin_ids: dict[tuple[str, str], int] = {}
    for name in descriptor_ids:
        bins = sorted(b for n, b in names if n == name)
        for i, b in enumerate(bins):
            bin_ids[(name, b)] = i
    item_names = {
        Item(descriptor_ids[n], bin_ids[(n, b)]): f"{n}={b}" for n, b in names
    }
    labels = tuple(sorted({label for label, _, _ in rows}))
    if len(labels) != len(rows):
        raise ParseError(f"{path}: duplicate node labels")
    ids = {lbl: i for i, lbl in enumerate(labels)}
    entries = []
    for label, community, elements in rows:
        itemsets = tuple(
            make_itemset(Item(descriptor_ids[n], bin_ids[(n, b)]) for n, b in element)
            for element in elements
        )
        sequence = NodeSequence(itemsets, tuple(range(len(itemsets))))
        entries.append(DatabaseEntry(ids[label], sequence, community))
    entries.sort(key=lambda e: e.node)
    return SequenceDatabase(tuple(entries), labels, item_names)
