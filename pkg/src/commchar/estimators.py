"""Scikit-learn style wrappers around the pipeline stages.

These estimators follow the fit/attributes convention (get_params,
set_params, trailing-underscore results) so the algorithms compose with
sklearn pipelines and model-selection tooling.
"""

from __future__ import annotations

import math

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin, TransformerMixin
from sklearn.exceptions import NotFittedError

from .community import (
    CommunityStructure,
    WeightedGraph,
    aggregate,
    louvain,
    modularity,
)
from .measures import compute_measure_table
from .mining import DEFAULT_MAX_PATTERNS, as_min_sup, mine_closed_generic
from .network import DynamicAttributedNetwork
from .pipeline import characterization_json
from .selection import characterize_all
from .seqdb import build_database, is_subsequence

__all__ = ["LouvainCommunities", "ClosedSequenceMiner", "CommunityCharacterizer"]


def _as_weighted_graph(X) -> WeightedGraph:
    if isinstance(X, WeightedGraph):
        return X
    if isinstance(X, DynamicAttributedNetwork):
        return aggregate(X)
    arr = np.asarray(X)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError("expected a WeightedGraph, a network, or a square weight matrix")
    if not np.allclose(arr, arr.T):
        raise ValueError("weight matrix must be symmetric")
    weights = {}
    n = arr.shape[0]
    for u in range(n):
        for v in range(u + 1, n):
            w = arr[u, v]
            if w:
                weights[(u, v)] = int(w)
    return WeightedGraph(n, weights)


class LouvainCommunities(ClusterMixin, BaseEstimator):
    """Community detection over a weighted graph.

    Accepts a WeightedGraph, a DynamicAttributedNetwork (aggregated on the
    fly) or a square symmetric weight matrix. After ``fit``: ``labels_``
    holds one community id per node, ``modularity_`` the partition score.
    """

    def __init__(self, seed: int = 0):
        self.seed = seed

    def fit(self, X, y=None):
        g = _as_weighted_graph(X)
        self.communities_: CommunityStructure = louvain(g, self.seed)
        self.labels_ = np.array(
            [self.communities_.assignment[v] for v in range(g.num_nodes)], dtype=int
        )
        self.modularity_ = modularity(g, self.communities_)
        return self


class ClosedSequenceMiner(TransformerMixin, BaseEstimator):
    """Closed frequent sequential pattern miner over itemset sequences.

    ``fit`` takes a list of sequences, each a list of itemsets (iterables
    of mutually orderable hashables), and stores the closed frequent
    patterns with exact supports. ``transform`` maps sequences to a binary
    pattern-containment matrix, one column per mined pattern.
    """

    def __init__(
        self,
        min_sup=0.3,
        max_length: int | None = None,
        max_patterns: int = DEFAULT_MAX_PATTERNS,
    ):
        self.min_sup = min_sup
        self.max_length = max_length
        self.max_patterns = max_patterns

    def fit(self, X, y=None):
        sequences = [tuple(tuple(sorted(e)) for e in seq) for seq in X]
        threshold = as_min_sup(self.min_sup)
        min_count = max(1, math.ceil(threshold * len(sequences))) if sequences else 1
        mined = mine_closed_generic(
            sequences, min_count, self.max_length, self.max_patterns
        )
        self.patterns_ = [p for p, _ in mined]
        self.supporters_ = [s for _, s in mined]
        self.supports_ = [
            len(s) / len(sequences) if sequences else 0.0 for _, s in mined
        ]
        return self

    def transform(self, X):
        if not hasattr(self, "patterns_"):
            raise NotFittedError("ClosedSequenceMiner is not fitted")
        sequences = [tuple(frozenset(e) for e in seq) for seq in X]
        out = np.zeros((len(sequences), len(self.patterns_)), dtype=bool)
        for i, seq in enumerate(sequences):
            for j, pattern in enumerate(self.patterns_):
                out[i, j] = is_subsequence(pattern, seq)
        return out


class CommunityCharacterizer(BaseEstimator):
    """End-to-end characterization of a dynamic attributed network.

    ``fit`` runs aggregation, Louvain, per-slice measures, sequence
    database construction, closed pattern mining and representative
    selection. Results land in ``labels_`` (community per node),
    ``characterizations_``, ``deviants_`` and ``report_``; ``predict``
    flags deviant nodes with -1 (outlier convention), all others 1.
    """

    def __init__(
        self,
        min_sup=0.3,
        seed: int = 0,
        min_community_size: int = 10,
        max_uncovered: int = 5,
        distance_anchor: str = "union",
        maximal: bool = False,
        max_length: int | None = None,
        max_patterns: int = DEFAULT_MAX_PATTERNS,
    ):
        self.min_sup = min_sup
        self.seed = seed
        self.min_community_size = min_community_size
        self.max_uncovered = max_uncovered
        self.distance_anchor = distance_anchor
        self.maximal = maximal
        self.max_length = max_length
        self.max_patterns = max_patterns

    def fit(self, X: DynamicAttributedNetwork, y=None):
        if not isinstance(X, DynamicAttributedNetwork):
            raise TypeError("CommunityCharacterizer expects a DynamicAttributedNetwork")
        graph = aggregate(X)
        self.communities_ = louvain(graph, self.seed)
        self.modularity_ = modularity(graph, self.communities_)
        self.labels_ = np.array(
            [self.communities_.assignment[v] for v in range(X.num_nodes)], dtype=int
        )
        self.measure_table_ = compute_measure_table(X, self.communities_)
        self.database_ = build_database(X, self.measure_table_, self.communities_)

        sizes = self.communities_.sizes()
        characterizations = characterize_all(
            self.database_,
            self.min_sup,
            min_community_size=self.min_community_size,
            max_uncovered=self.max_uncovered,
            distance_anchor=self.distance_anchor,
            maximal=self.maximal,
            max_length=self.max_length,
            max_patterns=self.max_patterns,
        )
        self.characterizations_ = characterizations
        self.deviants_ = frozenset().union(*(c.deviants for c in characterizations)) if characterizations else frozenset()
        self.deviant_labels_ = sorted(X.labels[n] for n in self.deviants_)
        self.report_ = [
            characterization_json(c, self.database_, sizes[c.community])
            for c in characterizations
        ]
        return self

    def predict(self, X=None):
        if not hasattr(self, "characterizations_"):
            raise NotFittedError("CommunityCharacterizer is not fitted")
        out = np.ones(len(self.labels_), dtype=int)
        for node in self.deviants_:
            out[node] = -1
        return out

    def fit_predict(self, X, y=None):
        return self.fit(X).predict()
