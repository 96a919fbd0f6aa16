"""Closed frequent sequential pattern mining per community.

The miner grows patterns depth-first over prefix projections, with an
early-termination check on projection equivalence, and distills the
candidate set to closed patterns afterwards. A generate-and-test
enumeration (`brute_force_mine`) provides an independent oracle for small
inputs. Supports are exact rationals; growth rates compare a pattern's
in-community support against its support over the rest of the network.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .errors import (
    CommunityTooSmallError,
    EmptyCommunityError,
    EmptyComplementError,
    InvalidSupportError,
    OracleTooLargeError,
    PatternExplosionError,
)
from .seqdb import Item, SequenceDatabase, is_subsequence

__all__ = [
    "Pattern",
    "support",
    "growth_rate",
    "mine_closed",
    "brute_force_mine",
    "mine_closed_generic",
]

DEFAULT_MAX_PATTERNS = 100_000

# Guards for the exhaustive oracle.
ORACLE_MAX_SEQUENCE_LENGTH = 6
ORACLE_MAX_ALPHABET = 8


@dataclass(frozen=True)
class Pattern:
    """A mined sequence with its exact support and emergence statistics."""

    sequence: tuple[tuple[Item, ...], ...]
    support: Fraction
    growth_rate: Fraction | float  # math.inf when absent outside the community
    supporting_nodes: frozenset[int]
    community: int

    @property
    def length(self) -> int:
        return len(self.sequence)

    def pretty(self, db: SequenceDatabase | None = None) -> str:
        if db is not None:
            return "<" + db.render_sequence(self.sequence) + ">"
        return "<" + "".join(
            "(" + ",".join(f"{it.descriptor}:{it.bin}" for it in e) + ")" for e in self.sequence
        ) + ">"


def as_min_sup(value) -> Fraction:
    """Normalize a support threshold to an exact fraction in (0, 1].

    Floats go through their decimal string so 0.3 means 3/10, not the
    nearest binary float.
    """
    if isinstance(value, float):
        value = Fraction(str(value))
    else:
        value = Fraction(value)
    if not 0 < value <= 1:
        raise InvalidSupportError(f"min_sup must be in (0, 1], got {value}")
    return value


def support(sequence, community, db: SequenceDatabase) -> Fraction:
    """Fraction of the community's nodes whose sequences embed ``sequence``."""
    members = sorted(community)
    if not members:
        raise EmptyCommunityError("support is undefined over an empty community")
    by_node = {e.node: e.sequence for e in db.entries}
    count = sum(1 for node in members if is_subsequence(sequence, by_node[node]))
    return Fraction(count, len(members))


def growth_rate(sequence, community, db: SequenceDatabase) -> Fraction | float:
    """In-community support over rest-of-network support; inf when the
    pattern never occurs outside, 0 when it occurs nowhere."""
    community = frozenset(community)
    complement = db.nodes() - community
    if not complement:
        raise EmptyComplementError("growth rate needs a nonempty complement")
    sup_in = support(sequence, community, db)
    sup_out = support(sequence, complement, db)
    if sup_out == 0:
        return math.inf if sup_in > 0 else Fraction(0)
    return sup_in / sup_out


def mine_closed_generic(
    sequences,
    min_count: int,
    max_length: int | None = None,
    max_patterns: int = DEFAULT_MAX_PATTERNS,
):
    """Closed frequent patterns over generic itemset sequences.

    ``sequences`` is a list of tuples of itemsets whose items are mutually
    orderable hashables. Returns (pattern, supporter index set) pairs in
    canonical (lexicographic) order, where a pattern is a tuple of sorted
    item tuples. ``min_count`` is the absolute support threshold.

    Raises PatternExplosionError past ``max_patterns`` candidates instead
    of silently truncating.
    """
    seqs = [tuple(frozenset(e) for e in s) for s in sequences]
    candidates: list[tuple[tuple, frozenset]] = []
    # projection-equivalence memo: (last element, projection state) -> patterns
    seen: dict[tuple, list[tuple]] = {}

    def grow(pattern: tuple, proj: list[tuple[int, int, int]]):
        # proj holds (sid, prefix_end, full_end): greedy match boundaries of
        # the pattern minus its last element and of the whole pattern.
        if len(candidates) >= max_patterns:
            raise PatternExplosionError(
                f"more than {max_patterns} candidate patterns; raise the cap or min_sup"
            )
        candidates.append((pattern, frozenset(sid for sid, _, _ in proj)))
        last = pattern[-1]
        last_set = frozenset(last)
        max_item = last[-1]

        # itemset extensions: add one item to the final element
        first_i: dict[object, list[tuple[int, int, int]]] = {}
        for sid, q, _ in proj:
            elements = seqs[sid]
            found: dict[object, int] = {}
            for idx in range(q + 1, len(elements)):
                element = elements[idx]
                if last_set <= element:
                    for item in element:
                        if item > max_item and item not in found:
                            found[item] = idx
            for item, idx in found.items():
                first_i.setdefault(item, []).append((sid, q, idx))
        for item in sorted(first_i):
            child_proj = first_i[item]
            if len(child_proj) < min_count:
                continue
            child = pattern[:-1] + (last + (item,),)
            _visit(child, child_proj)

        # sequence extensions: append a new single-item element
        if max_length is not None and len(pattern) >= max_length:
            return
        first_s: dict[object, list[tuple[int, int, int]]] = {}
        for sid, _, end in proj:
            elements = seqs[sid]
            found: dict[object, int] = {}
            for idx in range(end + 1, len(elements)):
                for item in elements[idx]:
                    if item not in found:
                        found[item] = idx
            for item, idx in found.items():
                first_s.setdefault(item, []).append((sid, end, idx))
        for item in sorted(first_s):
            child_proj = first_s[item]
            if len(child_proj) < min_count:
                continue
            child = pattern + ((item,),)
            _visit(child, child_proj)

    def _visit(pattern: tuple, proj: list[tuple[int, int, int]]):
        # Equivalent projections with the same final element span identical
        # subtrees; a sub-pattern of an already-explored equivalent is
        # absorbed wholesale and need not be grown.
        key = (pattern[-1], tuple(sorted(proj)))
        stored = seen.setdefault(key, [])
        for other in stored:
            if is_subsequence(pattern, other):
                return
        stored.append(pattern)
        grow(pattern, proj)

    roots: dict[object, list[tuple[int, int, int]]] = {}
    for sid, elements in enumerate(seqs):
        found: dict[object, int] = {}
        for idx, element in enumerate(elements):
            for item in element:
                if item not in found:
                    found[item] = idx
        for item, idx in found.items():
            roots.setdefault(item, []).append((sid, -1, idx))
    for item in sorted(roots):
        proj = roots[item]
        if len(proj) >= min_count:
            _visit(((item,),), proj)

    return _closed_only(candidates)


def _closed_only(candidates):
    """Drop every candidate with an equal-support proper super-sequence.

    Equal support within one community forces equal supporter sets, so
    absorption checks only compare patterns sharing a supporter set.
    """
    groups: dict[frozenset, list[tuple]] = {}
    for pattern, supporters in candidates:
        groups.setdefault(supporters, []).append(pattern)
    closed = []
    for supporters, patterns in groups.items():
        for p in patterns:
            if any(p != q and len(q) >= len(p) and is_subsequence(p, q) for q in patterns):
                continue
            closed.append((p, supporters))
    closed.sort(key=lambda c: c[0])
    return closed


def _maximal_only(closed):
    """Keep closed patterns with no frequent proper super-sequence."""
    kept = []
    for i, (p, sup_p) in enumerate(closed):
        absorbed = any(
            i != j and len(q) >= len(p) and p != q and is_subsequence(p, q)
            for j, (q, _) in enumerate(closed)
        )
        if not absorbed:
            kept.append((p, sup_p))
    return kept


def _community_sequences(db: SequenceDatabase, community: int):
    members = sorted(e.node for e in db.entries if e.community == community)
    if not members:
        raise EmptyCommunityError(f"community {community} has no members")
    by_node = {e.node: e.sequence for e in db.entries}
    return members, [by_node[m].elements for m in members]


def _min_count(min_sup: Fraction, size: int) -> int:
    return max(1, math.ceil(min_sup * size))


def _finalize(db: SequenceDatabase, community: int, members, raw_patterns):
    """Attach supports, supporter sets and growth rates to raw patterns.

    Supporting nodes come from a full subsequence scan over the community
    (the plain route, independent of the miner's internal bookkeeping);
    complement supports come from a second scan over the rest of the
    network. An empty complement makes every pattern maximally emergent.
    """
    member_set = frozenset(members)
    size = len(member_set)
    complement = sorted(db.nodes() - member_set)
    by_node = {e.node: e.sequence for e in db.entries}
    patterns = []
    for sequence, _ in raw_patterns:
        supporters = frozenset(
            node for node in members if is_subsequence(sequence, by_node[node])
        )
        sup_in = Fraction(len(supporters), size)
        if complement:
            out_count = sum(
                1 for node in complement if is_subsequence(sequence, by_node[node])
            )
            sup_out = Fraction(out_count, len(complement))
            growth = sup_in / sup_out if sup_out > 0 else math.inf
        else:
            growth = math.inf
        patterns.append(Pattern(sequence, sup_in, growth, supporters, community))
    return patterns


def mine_closed(
    db: SequenceDatabase,
    community: int,
    min_sup,
    maximal: bool = False,
    min_community_size: int = 1,
    max_length: int | None = None,
    max_patterns: int = DEFAULT_MAX_PATTERNS,
) -> list[Pattern]:
    """All closed frequent sequential patterns of one community.

    Every returned pattern has support >= min_sup within the community and
    no frequent super-sequence of equal support; with ``maximal`` only
    patterns without any frequent proper super-sequence survive. Patterns
    come back in canonical sequence order with exact supports, full-scan
    supporter sets and growth rates against the rest of the network.
    """
    min_sup = as_min_sup(min_sup)
    members, sequences = _community_sequences(db, community)
    if len(members) < min_community_size:
        raise CommunityTooSmallError(
            f"community {community} has {len(members)} members < minimum {min_community_size}"
        )
    raw = mine_closed_generic(
        sequences, _min_count(min_sup, len(members)), max_length, max_patterns
    )
    if maximal:
        raw = _maximal_only(raw)
    return _finalize(db, community, members, raw)


def brute_force_mine(
    db: SequenceDatabase,
    community: int,
    min_sup,
    maximal: bool = False,
) -> list[Pattern]:
    """Exhaustive oracle: enumerate, test support, filter closedness.

    Candidate elements are the nonempty subsets of observed elements;
    candidate sequences are built breadth-first, pruned only by the
    anti-monotone frequency of their prefixes, with supports measured by
    direct subsequence scans. Guarded to tiny inputs.
    """
    min_sup = as_min_sup(min_sup)
    members, sequences = _community_sequences(db, community)
    longest = max((len(s) for s in sequences), default=0)
    alphabet = {item for s in sequences for e in s for item in e}
    if longest > ORACLE_MAX_SEQUENCE_LENGTH:
        raise OracleTooLargeError(f"sequence length {longest} exceeds oracle guard")
    if len(alphabet) > ORACLE_MAX_ALPHABET:
        raise OracleTooLargeError(f"alphabet size {len(alphabet)} exceeds oracle guard")

    min_count = _min_count(min_sup, len(members))
    seqs = [tuple(frozenset(e) for e in s) for s in sequences]

    base_elements = set()
    for s in sequences:
        for element in s:
            ordered = tuple(sorted(element))
            for r in range(1, len(ordered) + 1):
                base_elements.update(combinations(ordered, r))

    def supporters_of(candidate, within) -> frozenset[int]:
        return frozenset(s for s in within if is_subsequence(candidate, seqs[s]))

    everyone = range(len(seqs))
    f1: dict[tuple, frozenset[int]] = {}
    for element in sorted(base_elements):
        sup = supporters_of((element,), everyone)
        if len(sup) >= min_count:
            f1[(element,)] = sup
    elements = [p[0] for p in f1]

    frequent: dict[tuple, frozenset[int]] = dict(f1)
    level = f1
    length = 1
    while level and length < longest:
        next_level: dict[tuple, frozenset[int]] = {}
        for prefix, prefix_sup in level.items():
            for element in elements:
                candidate = prefix + (element,)
                # both the length-L prefix and the length-L suffix must be
                # frequent for the candidate to stand a chance
                if length > 1 and candidate[1:] not in level:
                    continue
                sup = supporters_of(candidate, prefix_sup)
                if len(sup) >= min_count:
                    next_level[candidate] = sup
        frequent.update(next_level)
        level = next_level
        length += 1

    # equal support within one community forces equal supporter sets, so
    # the pairwise closedness checks only pair patterns sharing supporters
    by_supporters: dict[frozenset, list[tuple]] = {}
    for p, sup in frequent.items():
        by_supporters.setdefault(sup, []).append(p)
    closed = [
        (p, None)
        for group in by_supporters.values()
        for p in group
        if not any(p != q and is_subsequence(p, q) for q in group)
    ]
    if maximal:
        all_frequent = list(frequent)
        closed = [
            (p, None)
            for p, _ in closed
            if not any(p != q and is_subsequence(p, q) for q in all_frequent)
        ]
    closed.sort(key=lambda c: c[0])
    return _finalize(db, community, members, closed)
