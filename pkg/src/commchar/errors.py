"""Exception taxonomy shared by all commchar modules."""


class CommCharError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(CommCharError):
    """A row in an input file is malformed."""


class SchemaError(CommCharError):
    """An input references a descriptor that was never declared."""


class ConsistencyError(CommCharError):
    """An input references a node or slice outside the declared network."""


class ConfigError(CommCharError):
    """A configuration value is out of its documented range."""


class EmptyGraphError(CommCharError):
    """The operation needs a graph with at least one node."""


class PartitionMismatchError(CommCharError):
    """A community structure does not partition the graph's node set."""


class UnknownNodeError(CommCharError):
    """A node id is not part of the graph."""


class UnassignedNodeError(CommCharError):
    """A node has no community assignment."""


class EmptyCommunityError(CommCharError):
    """Support is undefined over an empty community."""


class EmptyComplementError(CommCharError):
    """Growth rate is undefined when the community complement is empty."""


class CommunityTooSmallError(CommCharError):
    """The community is below the configured minimum size for mining."""


class InvalidSupportError(CommCharError):
    """min_sup must lie in (0, 1]."""


class PatternExplosionError(CommCharError):
    """The miner hit its configured pattern cap; raised instead of truncating."""


class OracleTooLargeError(CommCharError):
    """The brute-force oracle guard rejected an oversized input."""


class NoPatternsError(CommCharError):
    """Representative selection needs at least one mined pattern."""


class BothEmptyError(CommCharError):
    """Jaccard distance is undefined when both sets are empty."""
