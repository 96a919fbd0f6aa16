"""Per-node, per-slice topological measures and descriptor discretization.

Every measure is evaluated on a single slice graph against the static
reference partition. Degenerate inputs follow fixed conventions: an
isolated node gets transitivity/participation/embeddedness 0, and a
zero-variance community gets z-score 0 for all members.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .community import CommunityStructure
from .errors import UnassignedNodeError, UnknownNodeError
from .network import (
    Descriptor,
    DynamicAttributedNetwork,
    StaticGraph,
    TOPOLOGICAL_MEASURES,
    slice_graph,
)

MEASURE_INDEX = {name: i for i, name in enumerate(TOPOLOGICAL_MEASURES)}


def _check_node(g: StaticGraph, v: int) -> None:
    if not 0 <= v < g.num_nodes:
        raise UnknownNodeError(f"node {v} not in graph of {g.num_nodes} nodes")


def _community_of(cs: CommunityStructure, v: int) -> int:
    try:
        return cs.assignment[v]
    except KeyError:
        raise UnassignedNodeError(f"node {v} has no community assignment") from None


def degree(g: StaticGraph, v: int) -> int:
    """Number of distinct neighbors of ``v``."""
    _check_node(g, v)
    return len(g.adjacency[v])


def internal_degree(g: StaticGraph, v: int, cs: CommunityStructure) -> int:
    """Number of neighbors of ``v`` inside its own community."""
    _check_node(g, v)
    cv = _community_of(cs, v)
    return sum(1 for u in g.adjacency[v] if cs.assignment[u] == cv)


def local_transitivity(g: StaticGraph, v: int) -> float:
    """Density of edges among the neighbors of ``v``, in [0, 1]; 0 if d < 2."""
    _check_node(g, v)
    nbrs = g.adjacency[v]
    d = len(nbrs)
    if d < 2:
        return 0.0
    links = 0
    for u in nbrs:
        links += len(g.adjacency[u] & nbrs)
    links //= 2  # each neighbor pair counted from both ends
    return 2.0 * links / (d * (d - 1))


def z_score(g: StaticGraph, v: int, cs: CommunityStructure) -> float:
    """Internal degree of ``v`` standardized within its community.

    Uses the population standard deviation over the community members'
    internal degrees in this slice; 0 when the deviation is 0.
    """
    _check_node(g, v)
    cv = _community_of(cs, v)
    members = cs.communities[cv]
    values = [internal_degree(g, u, cs) for u in sorted(members)]
    mean = sum(values) / len(values)
    var = sum((x - mean) ** 2 for x in values) / len(values)
    if var == 0.0:
        return 0.0
    return (internal_degree(g, v, cs) - mean) / math.sqrt(var)


def participation(g: StaticGraph, v: int, cs: CommunityStructure) -> float:
    """Spread of ``v``'s neighbors across communities: 1 - sum((d_c/d)^2).

    0 when all neighbors share one community (or d = 0); approaches 1 for
    a uniform spread over many communities.
    """
    _check_node(g, v)
    _community_of(cs, v)
    nbrs = g.adjacency[v]
    d = len(nbrs)
    if d == 0:
        return 0.0
    counts: dict[int, int] = {}
    for u in nbrs:
        cu = cs.assignment[u]
        counts[cu] = counts.get(cu, 0) + 1
    return 1.0 - sum((c / d) ** 2 for c in counts.values())


def embeddedness(g: StaticGraph, v: int, cs: CommunityStructure) -> float:
    """Fraction of ``v``'s neighbors inside its own community; 0 if d = 0."""
    _check_node(g, v)
    _community_of(cs, v)
    d = len(g.adjacency[v])
    if d == 0:
        return 0.0
    return internal_degree(g, v, cs) / d


@dataclass(frozen=True)
class MeasureTable:
    """Dense (node, slice, measure) array of the six topological measures."""

    values: np.ndarray  # shape (num_nodes, num_slices, 6)

    def value(self, node: int, slice_index: int, measure: str) -> float:
        return float(self.values[node, slice_index, MEASURE_INDEX[measure]])

    @property
    def num_nodes(self) -> int:
        return self.values.shape[0]

    @property
    def num_slices(self) -> int:
        return self.values.shape[1]


def compute_measure_table(net: DynamicAttributedNetwork, cs: CommunityStructure) -> MeasureTable:
    """All six measures for every (node, slice), against the static partition."""
    n, theta = net.num_nodes, net.num_slices
    if set(cs.assignment) != set(range(n)):
        raise UnassignedNodeError("community structure does not cover the network's nodes")
    table = np.zeros((n, theta, len(TOPOLOGICAL_MEASURES)), dtype=float)
    assign = np.array([cs.assignment[v] for v in range(n)], dtype=int)
    for j in range(theta):
        g = slice_graph(net, j)
        deg = np.zeros(n, dtype=int)
        d_int = np.zeros(n, dtype=int)
        for v in range(n):
            nbrs = g.adjacency[v]
            deg[v] = len(nbrs)
            d_int[v] = sum(1 for u in nbrs if assign[u] == assign[v])
        # z-score: standardize internal degree within each community
        z = np.zeros(n, dtype=float)
        for members in cs.communities.values():
            idx = np.fromiter(members, dtype=int)
            vals = d_int[idx].astype(float)
            sigma = vals.std()  # population std
            if sigma > 0:
                z[idx] = (vals - vals.mean()) / sigma
        for v in range(n):
            d = deg[v]
            table[v, j, MEASURE_INDEX["degree"]] = d
            table[v, j, MEASURE_INDEX["internal_degree"]] = d_int[v]
            table[v, j, MEASURE_INDEX["z_score"]] = z[v]
            if d == 0:
                continue  # transitivity/participation/embeddedness stay 0
            table[v, j, MEASURE_INDEX["transitivity"]] = local_transitivity(g, v)
            counts: dict[int, int] = {}
            for u in g.adjacency[v]:
                cu = assign[u]
                counts[cu] = counts.get(cu, 0) + 1
            table[v, j, MEASURE_INDEX["participation"]] = 1.0 - sum((c / d) ** 2 for c in counts.values())
            table[v, j, MEASURE_INDEX["embeddedness"]] = d_int[v] / d
    return MeasureTable(table)


def discretize(value: float, descriptor: Descriptor):
    """Map a value to its (descriptor, bin) item, or None when suppressed.

    Attribute values of 0 emit no item (inactivity is not a pattern
    element), and NaN marks an undefined measure, which likewise emits
    nothing. Every other value lands in exactly one bin.
    """
    from .seqdb import Item  # local import: seqdb depends on this module

    if math.isnan(value):
        return None
    if descriptor.kind == "attribute" and value == 0.0:
        return None
    return Item(descriptor.id, descriptor.bin_of(value))
