"""Representative pattern selection and deviant node extraction.

Per community: report the single best-supported pattern, then seed a
greedy cover with the highest-growth pattern and keep adding the pattern
whose supporter set is farthest (Jaccard) from what is already covered,
until at most ``max_uncovered`` nodes remain uncovered. Nodes supporting
none of the selected patterns are the community's deviants.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import BothEmptyError, NoPatternsError
from .mining import DEFAULT_MAX_PATTERNS, Pattern, mine_closed
from .seqdb import SequenceDatabase

__all__ = [
    "SelectionStep",
    "CommunityCharacterization",
    "jaccard_distance",
    "select_representatives",
    "characterize_all",
]

DEFAULT_MAX_UNCOVERED = 5


def _jaccard(a: frozenset, b: frozenset) -> Fraction:
    if not a and not b:
        raise BothEmptyError("Jaccard distance is undefined for two empty sets")
    return 1 - Fraction(len(a & b), len(a | b))


def jaccard_distance(a, b) -> float:
    """One minus intersection-over-union; 0 for identical sets, 1 for disjoint."""
    return float(_jaccard(frozenset(a), frozenset(b)))


@dataclass(frozen=True)
class SelectionStep:
    """One accepted greedy iteration (the seed pattern has no distance)."""

    pattern: Pattern
    distance: float | None
    newly_covered: int


@dataclass(frozen=True)
class CommunityCharacterization:
    community: int
    top_support: Pattern | None
    selected: tuple[Pattern, ...]
    covered: frozenset[int]
    deviants: frozenset[int]
    trace: tuple[SelectionStep, ...]


def _growth_key(p: Pattern):
    # higher growth first, then higher support, then lexicographic sequence
    return (-p.growth_rate, -p.support, p.sequence)


def _support_key(p: Pattern):
    # higher support first, then higher growth, then shorter, then lexicographic
    return (-p.support, -p.growth_rate, p.length, p.sequence)


def select_representatives(
    patterns,
    community,
    max_uncovered: int = DEFAULT_MAX_UNCOVERED,
    distance_anchor: str = "union",
) -> CommunityCharacterization:
    """Greedy representative selection over one community's mined patterns.

    ``distance_anchor`` picks what the Jaccard distance is measured
    against: the running union of covered nodes (default) or only the
    first selected pattern's supporters.
    """
    if distance_anchor not in ("union", "first"):
        raise ValueError(f"unknown distance anchor {distance_anchor!r}")
    patterns = list(patterns)
    if not patterns:
        raise NoPatternsError("cannot select representatives from zero patterns")
    members = frozenset(community)
    cid = patterns[0].community

    top_support = min(patterns, key=_support_key)
    seed = min(patterns, key=_growth_key)
    covered = set(seed.supporting_nodes)
    selected = [seed]
    trace = [SelectionStep(seed, None, len(covered))]
    pool = [p for p in patterns if p is not seed]
    anchor = frozenset(seed.supporting_nodes)

    while len(members - covered) > max_uncovered and pool:
        target = frozenset(covered) if distance_anchor == "union" else anchor
        candidates = [p for p in pool if p.supporting_nodes - covered]
        if not candidates:
            break
        best = min(
            candidates,
            key=lambda p: (-_jaccard(p.supporting_nodes, target), -p.growth_rate, p.sequence),
        )
        gained = len(best.supporting_nodes - covered)
        covered |= best.supporting_nodes
        selected.append(best)
        trace.append(SelectionStep(best, float(_jaccard(best.supporting_nodes, target)), gained))
        pool.remove(best)

    return CommunityCharacterization(
        community=cid,
        top_support=top_support,
        selected=tuple(selected),
        covered=frozenset(covered),
        deviants=members - covered,
        trace=tuple(trace),
    )


def characterize_all(
    db: SequenceDatabase,
    min_sup,
    min_community_size: int = 10,
    max_uncovered: int = DEFAULT_MAX_UNCOVERED,
    distance_anchor: str = "union",
    maximal: bool = False,
    max_length: int | None = None,
    max_patterns: int | None = None,
    threads: int = 1,
) -> list[CommunityCharacterization]:
    """Mine then select for every community of at least the minimum size.

    Communities are processed independently (optionally across a thread
    pool) and reported in community-id order. A community whose members
    share no frequent pattern characterizes as all-deviant.
    """
    cap = DEFAULT_MAX_PATTERNS if max_patterns is None else max_patterns
    eligible = [
        (cid, nodes)
        for cid, nodes in db.communities().items()
        if len(nodes) >= min_community_size
    ]

    def characterize(cid: int, nodes: frozenset[int]) -> CommunityCharacterization:
        patterns = mine_closed(
            db, cid, min_sup, maximal=maximal, max_length=max_length, max_patterns=cap
        )
        if not patterns:
            return CommunityCharacterization(cid, None, (), frozenset(), nodes, ())
        return select_representatives(patterns, nodes, max_uncovered, distance_anchor)

    if threads > 1 and len(eligible) > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = [(cid, pool.submit(characterize, cid, nodes)) for cid, nodes in eligible]
            results = [f.result() for _, f in futures]
    else:
        results = [characterize(cid, nodes) for cid, nodes in eligible]
    return sorted(results, key=lambda c: c.community)
