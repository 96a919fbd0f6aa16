"""Shared builders: tiny graphs, random sequence databases, planted networks."""

from __future__ import annotations

import random
from pathlib import Path

import pytest

from commchar.community import WeightedGraph
from commchar.network import DynamicAttributedNetwork, build_schema
from commchar.seqdb import DatabaseEntry, Item, NodeSequence, SequenceDatabase, make_itemset


def seq(*elements) -> NodeSequence:
    """Build a NodeSequence from iterables of (descriptor, bin) pairs."""
    itemsets = tuple(make_itemset(Item(*pair) for pair in element) for element in elements)
    return NodeSequence(itemsets, tuple(range(len(itemsets))))


def make_db(by_community: dict[int, list[NodeSequence]]) -> SequenceDatabase:
    """Assemble a database assigning dense node ids community by community."""
    entries = []
    node = 0
    for cid in sorted(by_community):
        for sequence in by_community[cid]:
            entries.append(DatabaseEntry(node, sequence, cid))
            node += 1
    labels = tuple(f"v{i:02d}" for i in range(node))
    return SequenceDatabase(tuple(entries), labels)


def random_two_community_db(rng: random.Random) -> SequenceDatabase:
    """A small random database over two communities, sized for the oracle.

    Shapes stay inside the brute-force guard: at most 4 slices and an
    alphabet of at most 8 distinct (descriptor, bin) items.
    """
    def random_sequences(count: int) -> list[NodeSequence]:
        if rng.random() < 0.7:
            ndesc, nbins = rng.choice([2, 3, 4]), 2
        else:
            ndesc, nbins = rng.choice([5, 6]), 1
        present = 0.5 if ndesc <= 4 else 0.4
        theta = rng.randint(1, 4)
        out = []
        for _ in range(count):
            elements = []
            for _ in range(theta):
                element = [
                    (d, rng.randrange(nbins)) for d in range(ndesc) if rng.random() < present
                ]
                if element:
                    elements.append(element)
            out.append(seq(*elements))
        return out

    n0 = rng.randint(4, 8)
    n1 = rng.randint(2, 4)
    return make_db({0: random_sequences(n0), 1: random_sequences(n1)})


def two_cliques_bridge() -> WeightedGraph:
    """Two 5-cliques joined by one edge; all weights 1."""
    weights = {}
    for base in (0, 5):
        for u in range(base, base + 5):
            for v in range(u + 1, base + 5):
                weights[(u, v)] = 1
    weights[(4, 5)] = 1
    return WeightedGraph(10, weights)


PLANTED_GROUPS = 3
PLANTED_SIZE = 40
PLANTED_THETA = 5


def planted_network(seed: int = 7):
    """Three planted communities; group 0 carries the attribute `venue_x`.

    Group-0 nodes hold venue_x in 3 of 5 slices (60%); elsewhere it shows
    up in ~2% of node-slices. Per-node sociability tiers spread the degree
    bins, and sparse bridge nodes add cross-community structure.
    Returns (network, group assignment list).
    """
    rng = random.Random(seed)
    n = PLANTED_GROUPS * PLANTED_SIZE
    group_of = [v // PLANTED_SIZE for v in range(n)]
    sociability = [(0.10, 0.28, 0.52)[v % 3] for v in range(n)]
    bridge = [v % 5 == 0 for v in range(n)]
    slices = []
    for _ in range(PLANTED_THETA):
        edges = set()
        for u in range(n):
            for v in range(u + 1, n):
                if group_of[u] == group_of[v]:
                    p = sociability[u] * sociability[v] * 2.2
                elif bridge[u] and bridge[v]:
                    p = 0.08
                else:
                    p = 0.0005
                if rng.random() < p:
                    edges.add((u, v))
        slices.append(frozenset(edges))
    schema = build_schema(
        PLANTED_THETA,
        {"venue_x": (1.0, 2.0, 3.0, 4.0)},
        disabled_measures={"internal_degree", "transitivity", "participation"},
    )
    xid = schema.by_name("venue_x").id
    values = {}
    for v in range(n):
        if group_of[v] == 0:
            for j in rng.sample(range(PLANTED_THETA), 3):
                values[(v, j, xid)] = 1.0
        else:
            for j in range(PLANTED_THETA):
                if rng.random() < 0.02:
                    values[(v, j, xid)] = 1.0
    labels = tuple(f"n{v:03d}" for v in range(n))
    net = DynamicAttributedNetwork(labels, PLANTED_THETA, tuple(slices), schema, values)
    return net, group_of


PLANTED_CONFIG_TOML = f"""\
theta = {PLANTED_THETA}

[descriptor.venue_x]
kind = "attribute"
bins = [1, 2, 3, 4]

[descriptor.internal_degree]
kind = "topological"
enabled = false

[descriptor.transitivity]
kind = "topological"
enabled = false

[descriptor.participation]
kind = "topological"
enabled = false
"""


def write_planted_files(directory: Path, seed: int = 7) -> dict:
    """Materialize the planted network as edge/attribute/config files."""
    net, group_of = planted_network(seed)
    edges = directory / "edges.csv"
    attrs = directory / "attrs.csv"
    config = directory / "network.toml"
    with open(edges, "w") as fh:
        fh.write("slice,src,dst\n")
        for j, slice_edges in enumerate(net.slices):
            for u, v in sorted(slice_edges):
                fh.write(f"{j},{net.labels[u]},{net.labels[v]}\n")
    xname = "venue_x"
    with open(attrs, "w") as fh:
        fh.write("node,slice,descriptor,value\n")
        for (node, j, _), value in sorted(net.attribute_values.items()):
            fh.write(f"{net.labels[node]},{j},{xname},{value:g}\n")
    config.write_text(PLANTED_CONFIG_TOML)
    return {"edges": edges, "attrs": attrs, "config": config, "net": net, "groups": group_of}


@pytest.fixture(scope="session")
def planted():
    net, group_of = planted_network()
    return net, group_of


@pytest.fixture(scope="session")
def planted_files(tmp_path_factory):
    directory = tmp_path_factory.mktemp("planted")
    return write_planted_files(directory)
