from hypothesis import given, settings, strategies as st
import pytest

from posequiv.eqrel import (explicit_pairs, from_recursive_set, identity, make_relation,
                            symmetric_difference, _predicate)
from posequiv.numbering import finite_approx
from posequiv.coding import finite_set
import oracles


def evens():
    return from_recursive_set(_predicate("even"))


def test_identity_is_reflexive_only():
    rel = identity()
    assert rel.related_at(3, 3, 0) and rel.related_at(3, 3, 50)
    assert not rel.related_at(3, 4, 50)
    assert [rel.rep_at(n, 40) for n in range(10)] == list(range(10))


def test_single_pair_stream():
    rel = explicit_pairs([(1, 3)])
    assert not rel.related_at(1, 3, 0)
    assert rel.related_at(1, 3, 1)
    assert rel.rep_at(3, 1) == 4
    assert rel.reps(1, 4) == [0, 1, 2, 4]


def test_closure_upto_examples():
    assert identity().closure_upto(5, 9, 10) == {5}
    assert evens().closure_upto(4, 80, 10) == {0, 2, 4, 6, 8, 10}
    z = make_relation({"kind": "interval", "Z": [1, 2, 5]})
    assert z.closure_upto(1, 3, 7) == {0, 1, 2}


def test_evens_classes_on_window():
    rel = evens()
    t = 300
    part = rel.partition_upto(t, 20)
    expected = [set(range(0, 21, 2))] + [{x} for x in range(1, 21, 2)]
    assert sorted(map(sorted, part)) == sorted(map(sorted, expected))


def test_evens_relates_2_and_8_from_some_stage_on():
    rel = evens()
    first = next(t for t in range(200) if rel.related_at(2, 8, t))
    assert all(rel.related_at(2, 8, t) for t in range(first, 200))


def test_symmetric_difference_with_empty_r_is_identity():
    rel = symmetric_difference(finite_approx([]))
    assert all(not rel.related_at(x, y, 100) for x in range(12) for y in range(12) if x != y)


def test_symmetric_difference_merges_codes_differing_inside_r():
    rel = symmetric_difference(finite_approx([0]))
    # D_2 = {1} and D_3 = {0, 1} differ only in 0
    t = next(t for t in range(200) if rel.related_at(2, 3, t))
    assert finite_set(2) ^ finite_set(3) == {0}
    assert not rel.related_at(2, 4, t)


@settings(max_examples=25, deadline=None)
@given(st.frozensets(st.integers(0, 5), max_size=3))
def test_symmetric_difference_limit_matches_definition(r):
    rel = symmetric_difference(finite_approx(r))
    for x in range(40):
        for y in range(40):
            assert rel.related_at(x, y, 300) == (finite_set(x) ^ finite_set(y) <= r)


def test_recursive_set_rejects_a_full_window():
    with pytest.raises(ValueError):
        from_recursive_set(lambda x: True, window=10)


def test_make_relation_rejects_unknown_kind():
    with pytest.raises(ValueError):
        make_relation({"kind": "nope"})


RELATIONS = {
    "identity": identity,
    "evens": evens,
    "explicit": lambda: explicit_pairs([(1, 3), (5, 9), (3, 9), (20, 40), (0, 12)]),
    "interval": lambda: make_relation({"kind": "interval", "Z": [1, 2, 5, 9, 10, 11, 30]}),
}


@pytest.mark.parametrize("name", sorted(RELATIONS))
def test_oracle_equivalence_on_sampled_stages(name):
    rel = RELATIONS[name]()
    for t in (0, 1, 2, 3, 5, 8, 13, 40):
        pairs = rel.emit(t)
        blocks = oracles.classes(pairs, 40)
        for b in blocks:
            x = min(b)
            assert rel.closure_upto(x, t, 40) == b
        assert rel.reps(t, 10) == oracles.reps(pairs, 10, 200)


@pytest.mark.parametrize("name", sorted(RELATIONS))
def test_emit_is_cumulative(name):
    rel = RELATIONS[name]()
    for s in range(30):
        assert rel.emit(s) == rel.emit(s + 1)[: len(rel.emit(s))]


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(sorted(RELATIONS)), st.integers(0, 150), st.integers(0, 16))
def test_reps_increase_in_n_and_grow_in_t(name, t, n):
    rel = RELATIONS[name]()
    assert rel.rep_at(n, t) < rel.rep_at(n + 1, t)
    assert rel.rep_at(n, t) <= rel.rep_at(n, t + 1)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(sorted(RELATIONS)), st.integers(0, 120), st.integers(0, 30), st.integers(0, 30))
def test_refinement_over_stages(name, t, x, y):
    rel = RELATIONS[name]()
    if rel.related_at(x, y, t):
        assert rel.related_at(x, y, t + 7)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(sorted(RELATIONS)), st.integers(0, 120), st.integers(0, 40))
def test_closures_partition_the_window(name, t, bound):
    rel = RELATIONS[name]()
    blocks = {rel.closure_upto(x, t, bound) for x in range(bound + 1)}
    assert set().union(*blocks) == set(range(bound + 1))
    assert sum(len(b) for b in blocks) == bound + 1


def test_rep_is_least_unrelated_to_earlier_reps():
    rel = RELATIONS["explicit"]()
    t = 5
    reps = rel.reps(t, 8)
    for n, a in enumerate(reps):
        assert all(not rel.related_at(a, b, t) for b in reps[:n])
        assert all(any(rel.related_at(y, b, t) for b in reps[:n]) for y in range(reps[n - 1] + 1 if n else 0, a))


def test_stable_reps_match_hand_values():
    assert evens().reps(400, 6) == [0, 1, 3, 5, 7, 9]
    assert RELATIONS["explicit"]().reps(10, 6) == [0, 1, 2, 4, 6, 7]
