import json
from pathlib import Path

from hypothesis import given, settings, strategies as st
import pytest

from posequiv.coding import pair
from posequiv.constructions import (WTable, build_family, build_interval_relation, build_triple_merge,
                                    classify_closed_entries, dense_simple_standin, interval_family,
                                    make_set, odd_ascending_and_classes, even_ascending_and_class_pairs,
                                    ascending_and_pair_classes, finiteness_guarded_ascending, ChainReps)
from posequiv.eqrel import identity
from posequiv.numbering import ascending_set, finite_approx, from_events
import oracles

TABLES = json.loads((Path(__file__).parent / "fixtures" / "wtables.json").read_text())


def z125():
    return build_interval_relation(from_events([(1, 1), (2, 2), (3, 5)]))


def test_empty_table_gives_identity():
    rel = build_triple_merge(WTable())
    assert rel.reps(300, 20) == list(range(20))
    assert rel.emit(300) == []


def test_single_entry_merge():
    rel = build_triple_merge(WTable.settled({0: [5]}))
    assert rel.reps(0, 8) == list(range(8))
    assert rel.emit(10) == [(0, 5)]
    assert rel.class_of(0, 500) == {0, 5}
    assert rel.rep_at(5, 500) == 6


@pytest.mark.parametrize("index", range(len(TABLES)))
def test_triple_merge_matches_naive_replay(index):
    table = {int(k): v for k, v in TABLES[index].items()}
    rel = build_triple_merge(WTable.from_json(TABLES[index]))
    naive = oracles.triple_merge_events(table, 80)
    assert [rel.event_at(s + 1) for s in range(80)] == naive


def test_triple_merge_is_deterministic():
    a = build_triple_merge(WTable.from_json(TABLES[3]))
    b = build_triple_merge(WTable.from_json(TABLES[3]))
    assert [a.reps(t, 10) for t in range(0, 300, 7)] == [b.reps(t, 10) for t in range(0, 300, 7)]


@pytest.mark.parametrize("index", range(len(TABLES)))
def test_rep_change_counts_are_bounded(index):
    rel = build_triple_merge(WTable.from_json(TABLES[index]))
    for m in range(17):
        assert rel.rep_changes(m, 600) <= m * m


def test_classify_examples():
    w = WTable()
    rel = build_triple_merge(w)
    assert classify_closed_entries(rel, w) == {}
    w = WTable.settled({0: [], 3: []})
    out = classify_closed_entries(build_triple_merge(w), w)
    assert all(v.is_holds and v.witness["branch"] == 1 for v in out.values())
    w = WTable.settled({0: [5]})
    out = classify_closed_entries(build_triple_merge(w), w)
    assert out[0].is_inconclusive and out[0].reason == "not-closed"
    w = WTable.settled({1: [0, 1, 2]})
    rel = build_triple_merge(w)
    assert rel.emit(400) == []
    out = classify_closed_entries(rel, w)
    assert out[1].is_holds and out[1].witness == {"index": 1, "branch": 2, "m": 3}


def test_classify_cover_branch():
    out = classify_closed_entries(build_triple_merge(WTable.from_json(TABLES[2])), WTable.from_json(TABLES[2]))
    assert out[3].witness["branch"] == 3


def test_interval_examples():
    rel = z125()
    t = 3
    assert sorted(map(sorted, rel.partition_upto(t, 7))) == [[0, 1, 2], [3], [4, 5], [6], [7]]
    assert rel.reps(t, 4) == [0, 3, 4, 6]
    assert not any(rel.related_at(2, 3, s) for s in range(100))
    assert sorted(map(sorted, rel.partition_upto(t, 7))) == sorted(map(sorted, oracles.interval_classes([1, 2, 5], 7)))


def test_interval_family_examples():
    fam = interval_family(z125())
    assert fam.decode(2).window(50, 7) == {0, 1, 2, 3, 4, 5}
    assert fam.decode(0).window(50, 7) == {0, 1, 2}
    empty = interval_family(identity())
    assert [empty.decode(n).enum_upto(40) for n in range(5)] == [{n} for n in range(5)]


def test_interval_family_distinct_when_tops_differ():
    rel = build_interval_relation(dense_simple_standin([[2 * n for n in range(9)]], 8))
    fam = interval_family(rel)
    tops = {}
    for n in range(9):
        tops.setdefault(rel.rep_at(n, 500), []).append(n)
    sets = {n: fam.decode(n).window(500, 60) for n in range(9)}
    for a in range(9):
        for b in range(a + 1, 9):
            if rel.rep_at(a, 500) != rel.rep_at(b, 500):
                assert sets[a] != sets[b]


def test_interval_relation_rejects_zero():
    with pytest.raises(ValueError):
        build_interval_relation(finite_approx([0, 3]))


def test_standin_examples():
    assert dense_simple_standin([], 4).enum_upto(100) == frozenset()
    z = dense_simple_standin([[2 * n for n in range(5)]], 4)
    non = [x for x in range(60) if x not in z.enum_upto(100)]
    assert all(non[n] > 2 * n for n in range(1, 5))  # a_0 = 0 always
    assert non[1] >= 3
    z = dense_simple_standin([[n + 1 for n in range(4)], [n * n for n in range(4)]], 3)
    non = [x for x in range(60) if x not in z.enum_upto(100)]
    assert non[2] > 4
    z = dense_simple_standin([[2 * n for n in range(9)]], 8)
    assert sorted(z.enum_upto(200)) == [1, 2, 4, 6, 8, 10, 12, 14, 16]


def test_closed_finite_family_over_identity_is_canonical():
    fam = build_family({"kind": "closed_finite_sets"}, identity())
    assert fam.decode(0b1011).enum_upto(5) == {0, 1, 3}


def test_odd_ascending_and_classes():
    rel = identity()
    fam = odd_ascending_and_classes(rel)
    assert fam.decode(2 * pair(3, 7) + 1).enum_upto(500) == {3}
    assert fam.decode(4).enum_upto(10) == {0, 1, 2, 3, 4}


def test_finiteness_guarded_examples():
    rel = identity()
    w = WTable.settled({0: [9, 10]})
    fam = finiteness_guarded_ascending(rel, w)
    for m in range(5):
        want = ascending_set(rel, 1 if m >= 2 else 2)
        assert fam.decode(pair(0, m + 1)).window(300, 20) == want.window(300, 20)


def test_guarded_members_fall_back_to_covering_ascending_sets():
    rel = build_triple_merge(WTable.from_json(TABLES[1]))
    for fam in (even_ascending_and_class_pairs(rel), ascending_and_pair_classes(rel)):
        for i in range(1, 60, 2):
            s = fam.decode(i)
            v = s.invalidated_at(400)
            if v is None:
                continue
            before = s.enum_upto(v - 1)
            after = s.window(400, 60)
            assert before <= s.enum_upto(400)
            assert any(after == ascending_set(rel, n).window(400, 60) for n in range(30))


def test_chain_reps_pick_one_element_per_class():
    b = make_set("even", identity())
    chain = ChainReps(b, identity())
    assert [chain.b_at(n, 20) for n in range(4)] == [0, 2, 4, 6]
    assert chain.b_at(50, 20) is None
    assert chain.chain_set(3).enum_upto(30) == {0, 2, 4}


def test_wtable_rejects_malformed_events():
    with pytest.raises(ValueError):
        WTable.from_json({"0": [[1, 2, 3]]})
    with pytest.raises(ValueError):
        WTable.from_json("[1, 2]")
    with pytest.raises(ValueError):
        WTable.from_json({"0": [[-1, 2]]})


@settings(max_examples=20, deadline=None)
@given(st.dictionaries(st.integers(0, 4), st.lists(st.tuples(st.integers(0, 30), st.integers(0, 25)), max_size=4),
                       max_size=4))
def test_random_tables_never_violate_the_trichotomy(table):
    w = WTable(table)
    rel = build_triple_merge(w)
    out = classify_closed_entries(rel, w, bound=40, budget=300)
    assert not any(v.is_violated for v in out.values())
    for m in range(9):
        assert rel.rep_changes(m, 300) <= m * m
