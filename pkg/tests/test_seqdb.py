"""Database construction, the subsequence relation, dump/load."""

import random
from itertools import combinations

import pytest

from commchar.community import aggregate, louvain, structure_from_assignment
from commchar.errors import ParseError
from commchar.measures import compute_measure_table
from commchar.network import DynamicAttributedNetwork, build_schema
from commchar.seqdb import (
    Item,
    NodeSequence,
    build_database,
    dump_database,
    is_subsequence,
    load_database,
    make_itemset,
)

from conftest import make_db, random_two_community_db, seq


def small_attributed_net():
    # 4 nodes, 2 slices; node 3 is isolated everywhere and attribute-free
    schema = build_schema(2, {"icml": (1.0, 2.0, 3.0, 4.0)})
    xid = schema.by_name("icml").id
    slices = (frozenset({(0, 1), (1, 2)}), frozenset({(0, 1)}))
    values = {(0, 0, xid): 2.0, (2, 1, xid): 1.0}
    return DynamicAttributedNetwork(("a", "b", "c", "d"), 2, slices, schema, values), xid


def test_build_database_rules():
    net, xid = small_attributed_net()
    cs = structure_from_assignment({0: 0, 1: 0, 2: 0, 3: 1})
    table = compute_measure_table(net, cs)
    db = build_database(net, table, cs)
    by_node = {e.node: e for e in db.entries}

    # node 0 active in both slices: one element per slice, topo + attr items
    seq0 = by_node[0].sequence
    assert len(seq0) == 2
    assert seq0.slices == (0, 1)
    assert Item(xid, 1) in seq0.elements[0]  # icml value 2 -> second bin
    assert all(len({i.descriptor for i in e}) == len(e) for e in seq0.elements)
    assert all(tuple(sorted(e)) == e for e in seq0.elements)

    # node 2 is isolated in slice 1 but has an attribute there: attr item only
    seq2 = by_node[2].sequence
    assert seq2.slices == (0, 1)
    assert seq2.elements[1] == (Item(xid, 0),)

    # node 3 never active: empty sequence, provenance empty
    assert by_node[3].sequence.elements == ()
    assert by_node[3].community == 1


def test_build_database_element_count_matches_declared_descriptors():
    net, _ = small_attributed_net()
    cs = structure_from_assignment({0: 0, 1: 0, 2: 0, 3: 0})
    table = compute_measure_table(net, cs)
    db = build_database(net, table, cs)
    seq1 = db.sequence_of(1)
    # active node with nonzero degree: all six measures itemized, no attr
    assert len(seq1.elements[0]) == 6


def test_is_subsequence_examples():
    a = Item(0, 0)
    b = Item(1, 0)
    c = Item(2, 0)
    beta = ((a, b), (c,))
    assert is_subsequence(((a,),), beta)
    assert not is_subsequence(((a,), (a,)), ((a,),))
    assert is_subsequence(((a,), (c,)), ((c,), (a,), (c,)))
    assert not is_subsequence(((a,), (c,)), ((c,), (c,), (a,)))
    assert is_subsequence(((a, b),), beta)
    assert not is_subsequence(((a, c),), beta)
    # works against NodeSequence too
    assert is_subsequence(((a,),), seq([(0, 0), (1, 0)], [(2, 0)]))


def exhaustive_embedding(alpha, beta) -> bool:
    """Independent oracle: try every strictly increasing index assignment."""
    alpha = [frozenset(e) for e in alpha]
    beta = [frozenset(e) for e in beta]
    for positions in combinations(range(len(beta)), len(alpha)):
        if all(a <= beta[i] for a, i in zip(alpha, positions)):
            return True
    return False


def test_is_subsequence_matches_exhaustive_oracle():
    rng = random.Random(9)
    items = [Item(d, b) for d in range(3) for b in range(2)]
    for _ in range(400):
        def rand_seq(max_len):
            return tuple(
                tuple(sorted(rng.sample(items, rng.randint(1, 3))))
                for _ in range(rng.randint(1, max_len))
            )

        alpha = rand_seq(3)
        beta = rand_seq(5)
        assert is_subsequence(alpha, beta) == exhaustive_embedding(alpha, beta)


def test_subsequence_partial_order_properties():
    rng = random.Random(31)
    items = [Item(d, b) for d in range(3) for b in range(2)]

    def rand_seq():
        return tuple(
            tuple(sorted(rng.sample(items, rng.randint(1, 3))))
            for _ in range(rng.randint(1, 4))
        )

    seqs = [rand_seq() for _ in range(30)]
    for s in seqs:
        assert is_subsequence(s, s)  # reflexive
    for x in seqs[:12]:
        for y in seqs[:12]:
            for z in seqs[:12]:
                if is_subsequence(x, y) and is_subsequence(y, z):
                    assert is_subsequence(x, z)  # transitive
            if is_subsequence(x, y) and is_subsequence(y, x):
                assert x == y  # antisymmetric


def test_node_sequence_validation():
    with pytest.raises(ValueError):
        NodeSequence(((Item(0, 0),),), (0, 1))
    with pytest.raises(ValueError):
        NodeSequence(((Item(0, 0),), (Item(0, 0),)), (1, 0))
    with pytest.raises(ValueError):
        NodeSequence(((),), (0,))
    with pytest.raises(ValueError):
        make_itemset([Item(0, 0), Item(0, 1)])


def rendered_item_sets(db, elements):
    """Element-wise sets of item strings: order-free within an element."""
    return [frozenset(db.item_name(it) for it in e) for e in elements]


def test_dump_load_round_trip(tmp_path, planted):
    net, _ = planted
    cs = louvain(aggregate(net), seed=0)
    table = compute_measure_table(net, cs)
    db = build_database(net, table, cs)
    path = tmp_path / "db.tsv"
    dump_database(db, path)
    again = load_database(path)
    assert again.labels == db.labels
    orig = {
        db.labels[e.node]: (e.community, rendered_item_sets(db, e.sequence.elements))
        for e in db.entries
    }
    back = {
        again.labels[e.node]: (e.community, rendered_item_sets(again, e.sequence.elements))
        for e in again.entries
    }
    assert orig == back


def test_dump_is_deterministic(tmp_path):
    rng1, rng2 = random.Random(77), random.Random(77)
    db1 = random_two_community_db(rng1)
    db2 = random_two_community_db(rng2)
    p1, p2 = tmp_path / "a.tsv", tmp_path / "b.tsv"
    dump_database(db1, p1)
    dump_database(db2, p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_dump_load_keeps_empty_sequences(tmp_path):
    db = make_db({0: [seq([(0, 0)]), seq()], 1: [seq([(1, 1)])]})
    path = tmp_path / "db.tsv"
    dump_database(db, path)
    again = load_database(path)
    assert len(again) == 3
    empty = [e for e in again.entries if not e.sequence.elements]
    assert len(empty) == 1
    assert empty[0].community == 0


def test_load_database_rejects_malformed(tmp_path):
    bad1 = tmp_path / "bad1.tsv"
    bad1.write_text("a\t0\n")  # missing field
    with pytest.raises(ParseError):
        load_database(bad1)
    bad2 = tmp_path / "bad2.tsv"
    bad2.write_text("a\t0\t(x=1)(junk\n")
    with pytest.raises(ParseError):
        load_database(bad2)
    bad3 = tmp_path / "bad3.tsv"
    bad3.write_text("a\tzz\t(x=1)\n")
    with pytest.raises(ParseError):
        load_database(bad3)


def test_make_db_helper_shape():
    db = make_db({0: [seq([(0, 0)]), seq([(0, 1)])], 1: [seq([(1, 0)])]})
    assert len(db) == 3
    assert db.communities() == {0: frozenset({0, 1}), 1: frozenset({2})}
