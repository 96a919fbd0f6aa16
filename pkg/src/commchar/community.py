"""Reference community structure: time-aggregated graph + Louvain.

The dynamic network is flattened into one weighted static graph (edge
weight = number of slices containing the edge) and partitioned once; the
resulting static communities anchor every downstream per-slice measure.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .errors import EmptyGraphError, PartitionMismatchError
from .network import DynamicAttributedNetwork

__all__ = [
    "WeightedGraph",
    "CommunityStructure",
    "aggregate",
    "modularity",
    "louvain",
    "louvain_modularity_trace",
]


@dataclass(frozen=True)
class WeightedGraph:
    """Undirected graph with positive integer edge weights (occurrence counts)."""

    num_nodes: int
    weights: dict[tuple[int, int], int]

    def __post_init__(self):
        for (u, v), w in self.weights.items():
            if not 0 <= u < v < self.num_nodes:
                raise ValueError(f"edge ({u},{v}) not canonical over {self.num_nodes} nodes")
            if w <= 0:
                raise ValueError(f"edge ({u},{v}) has non-positive weight {w}")

    def weight(self, u: int, v: int) -> int:
        if u == v:
            return 0
        key = (u, v) if u < v else (v, u)
        return self.weights.get(key, 0)

    @property
    def total_weight(self) -> int:
        return sum(self.weights.values())

    def adjacency(self) -> list[dict[int, int]]:
        adj: list[dict[int, int]] = [{} for _ in range(self.num_nodes)]
        for (u, v), w in self.weights.items():
            adj[u][v] = w
            adj[v][u] = w
        return adj


@dataclass(frozen=True)
class CommunityStructure:
    """A total partition of the node set into labeled communities."""

    assignment: dict[int, int]
    communities: dict[int, frozenset[int]]

    def __post_init__(self):
        rebuilt: dict[int, set[int]] = {}
        for node, cid in self.assignment.items():
            rebuilt.setdefault(cid, set()).add(node)
        if {cid: frozenset(m) for cid, m in rebuilt.items()} != self.communities:
            raise PartitionMismatchError("assignment and communities disagree")

    @property
    def num_communities(self) -> int:
        return len(self.communities)

    def community_of(self, node: int) -> int:
        return self.assignment[node]

    def sizes(self) -> dict[int, int]:
        return {cid: len(members) for cid, members in self.communities.items()}


def structure_from_assignment(assignment: dict[int, int]) -> CommunityStructure:
    communities: dict[int, set[int]] = {}
    for node, cid in assignment.items():
        communities.setdefault(cid, set()).add(node)
    return CommunityStructure(dict(assignment), {cid: frozenset(m) for cid, m in communities.items()})


def aggregate(net: DynamicAttributedNetwork) -> WeightedGraph:
    """Flatten all slices into one graph; weight = occurrence count across slices."""
    weights: dict[tuple[int, int], int] = {}
    for edges in net.slices:
        for edge in edges:
            weights[edge] = weights.get(edge, 0) + 1
    return WeightedGraph(net.num_nodes, weights)


def modularity(g: WeightedGraph, cs: CommunityStructure) -> float:
    """Weighted Newman modularity of a partition.

    Q = sum over communities of [w_in/W - (w_tot/2W)^2] where W is the
    total edge weight, w_in the weight inside the community and w_tot the
    summed weighted degree of its members. Returns 0.0 for weightless
    graphs (no edges to score).
    """
    if set(cs.assignment) != set(range(g.num_nodes)):
        raise PartitionMismatchError("community structure does not cover the graph's nodes")
    total = g.total_weight
    if total == 0:
        return 0.0
    w_in: dict[int, int] = {cid: 0 for cid in cs.communities}
    w_tot: dict[int, int] = {cid: 0 for cid in cs.communities}
    for (u, v), w in g.weights.items():
        cu, cv = cs.assignment[u], cs.assignment[v]
        if cu == cv:
            w_in[cu] += w
        w_tot[cu] += w
        w_tot[cv] += w
    q = 0.0
    for cid in cs.communities:
        q += w_in[cid] / total - (w_tot[cid] / (2 * total)) ** 2
    return q


def _local_moves(adj, node_order, node_com, com_tot, k, m2):
    """One level of greedy node moves; mutates node_com/com_tot in place.

    Gains are compared in exact integer arithmetic (m2 * k_in - tot * k),
    so tie handling is deterministic: a node moves only on a strict
    improvement; among equally best targets the lowest community id wins.
    """
    moved_any = False
    while True:
        moved = False
        for u in node_order:
            current = node_com[u]
            # weight from u to each adjacent community (self-loops excluded)
            k_in: dict[int, int] = {current: 0}
            for v, w in adj[u].items():
                if v == u:
                    continue
                k_in[node_com[v]] = k_in.get(node_com[v], 0) + w
            com_tot[current] -= k[u]
            best_gain = None
            best_com = current
            for cid in sorted(k_in):
                gain = m2 * k_in[cid] - com_tot[cid] * k[u]
                if best_gain is None or gain > best_gain or (gain == best_gain and cid < best_com):
                    best_gain = gain
                    best_com = cid
            stay_gain = m2 * k_in[current] - com_tot[current] * k[u]
            if best_com != current and best_gain > stay_gain:
                node_com[u] = best_com
                com_tot[best_com] += k[u]
                moved = True
                moved_any = True
            else:
                com_tot[current] += k[u]
        if not moved:
            break
    return moved_any


def _louvain_levels(g: WeightedGraph, seed: int):
    """Run the two-phase procedure; returns (assignment, per-level Q trace)."""
    if g.num_nodes == 0:
        raise EmptyGraphError("cannot partition an empty graph")
    rng = random.Random(seed)
    # current level graph: adjacency dicts + self-loop weights
    adj = g.adjacency()
    loops = [0] * g.num_nodes
    membership = list(range(g.num_nodes))  # original node -> current level node
    trace: list[float] = []
    while True:
        n = len(adj)
        k = [sum(w for v, w in adj[u].items() if v != u) + 2 * loops[u] for u in range(n)]
        m2 = sum(k)
        node_com = list(range(n))
        com_tot = k.copy()
        node_order = list(range(n))
        rng.shuffle(node_order)
        moved = False
        if m2 > 0:
            moved = _local_moves(adj, node_order, node_com, com_tot, k, m2)
        assignment = {node: node_com[membership[node]] for node in range(g.num_nodes)}
        trace.append(modularity(g, structure_from_assignment(assignment)))
        if not moved:
            return assignment, trace
        # contract communities into super-nodes (lowest community id first)
        ids = sorted(set(node_com))
        remap = {cid: i for i, cid in enumerate(ids)}
        new_n = len(ids)
        new_adj: list[dict[int, int]] = [{} for _ in range(new_n)]
        new_loops = [0] * new_n
        for u in range(n):
            cu = remap[node_com[u]]
            new_loops[cu] += loops[u]
            for v, w in adj[u].items():
                if v == u:
                    continue
                cv = remap[node_com[v]]
                if cu == cv:
                    if u < v:
                        new_loops[cu] += w
                else:
                    new_adj[cu][cv] = new_adj[cu].get(cv, 0) + w
        adj = new_adj
        loops = new_loops
        membership = [remap[node_com[m]] for m in membership]


def _densify(assignment: dict[int, int]) -> dict[int, int]:
    """Relabel community ids 0..p-1 ordered by smallest member node."""
    first_member: dict[int, int] = {}
    for node in sorted(assignment):
        first_member.setdefault(assignment[node], node)
    order = sorted(first_member, key=first_member.get)
    remap = {cid: i for i, cid in enumerate(order)}
    return {node: remap[cid] for node, cid in assignment.items()}


def louvain(g: WeightedGraph, seed: int = 0) -> CommunityStructure:
    """Louvain partition of a weighted graph, deterministic for a given seed.

    The seed only shuffles node visit order; move selection itself is
    exact-arithmetic greedy with lowest-community-id tie-breaking.
    Singleton communities are retained.
    """
    assignment, _ = _louvain_levels(g, seed)
    return structure_from_assignment(_densify(assignment))


def louvain_modularity_trace(g: WeightedGraph, seed: int = 0) -> list[float]:
    """Modularity after each level pass (non-decreasing by construction)."""
    _, trace = _louvain_levels(g, seed)
    return trace
