"""Characterize communities of dynamic attributed networks.

The pipeline: aggregate the slices into one weighted graph, detect a
static reference partition, compute per-slice topological measures,
discretize measures and attributes into itemset sequences, mine closed
frequent sequential patterns per community, then select representative
patterns and flag the nodes supporting none of them.
"""

from .community import (
    CommunityStructure,
    WeightedGraph,
    aggregate,
    louvain,
    louvain_modularity_trace,
    modularity,
)
from .errors import CommCharError
from .estimators import ClosedSequenceMiner, CommunityCharacterizer, LouvainCommunities
from .measures import (
    MeasureTable,
    compute_measure_table,
    degree,
    discretize,
    embeddedness,
    internal_degree,
    local_transitivity,
    participation,
    z_score,
)
from .mining import Pattern, brute_force_mine, growth_rate, mine_closed, support
from .network import (
    Descriptor,
    DescriptorSchema,
    DynamicAttributedNetwork,
    StaticGraph,
    build_schema,
    load_network,
    load_schema,
    slice_graph,
)
from .pipeline import PipelineConfig, run_pipeline
from .selection import (
    CommunityCharacterization,
    characterize_all,
    jaccard_distance,
    select_representatives,
)
from .seqdb import (
    Item,
    NodeSequence,
    SequenceDatabase,
    build_database,
    dump_database,
    is_subsequence,
    load_database,
)

__version__ = "0.1.0"

__all__ = [
    "CommCharError",
    "ClosedSequenceMiner",
    "CommunityCharacterization",
    "CommunityCharacterizer",
    "CommunityStructure",
    "Descriptor",
    "DescriptorSchema",
    "DynamicAttributedNetwork",
    "Item",
    "LouvainCommunities",
    "MeasureTable",
    "NodeSequence",
    "Pattern",
    "PipelineConfig",
    "SequenceDatabase",
    "StaticGraph",
    "WeightedGraph",
    "aggregate",
    "brute_force_mine",
    "build_database",
    "build_schema",
    "characterize_all",
    "compute_measure_table",
    "degree",
    "discretize",
    "dump_database",
    "embeddedness",
    "growth_rate",
    "internal_degree",
    "is_subsequence",
    "jaccard_distance",
    "load_database",
    "load_network",
    "load_schema",
    "local_transitivity",
    "louvain",
    "louvain_modularity_trace",
    "mine_closed",
    "modularity",
    "participation",
    "run_pipeline",
    "select_representatives",
    "slice_graph",
    "support",
    "z_score",
]
