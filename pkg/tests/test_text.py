from hypothesis import given, settings, strategies as st
import pytest

from posequiv.constructions import chain_and_naturals, make_set
from posequiv.eqrel import from_recursive_set, identity, _predicate
from posequiv.learners import chain_or_naturals, constant_learner
from posequiv.numbering import ascending_family, ascending_set, empty_set, finite_approx, from_events
from posequiv.text import (PAUSE, FiniteSequence, adversarial_chain_text, arbitrary_text,
                           canonical_text, complete_by_closure, fixed_text, seeded_text)


def test_finite_sequence_validates():
    s = FiniteSequence([3, PAUSE, 3, 1])
    assert s.content == {1, 3}
    with pytest.raises(ValueError):
        FiniteSequence([-1])
    with pytest.raises(ValueError):
        FiniteSequence(["x"])


def test_canonical_text_examples():
    assert list(canonical_text(empty_set()).prefix(5)) == [PAUSE] * 5
    assert canonical_text(ascending_set(identity(), 2)).prefix(30).content == {0, 1}
    late = from_events([(3, 5)])
    assert list(canonical_text(late).prefix(6)).index(5) >= 3


def test_seeded_text_examples():
    a3 = ascending_set(identity(), 3)
    assert seeded_text(a3, 11).prefix(80) == seeded_text(a3, 11).prefix(80)
    assert set(seeded_text(finite_approx([7]), 4, pause_rate=0).prefix(50)) == {7}
    assert seeded_text(a3, 2).prefix(200).content <= {0, 1, 2}
    assert seeded_text(a3, 2).prefix(200).content == {0, 1, 2}


def test_complete_by_closure_examples():
    evens = from_recursive_set(_predicate("even"))
    assert complete_by_closure((4,), evens).prefix(400).content >= set(range(0, 21, 2))
    assert complete_by_closure((4, 9), identity()).prefix(100).content == {4, 9}
    assert set(complete_by_closure((PAUSE, PAUSE), identity()).prefix(40)) == {PAUSE}


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6), st.integers(0, 8), st.integers(1, 150))
def test_text_content_stays_inside_the_limit_set(seed, n, length):
    rel = from_recursive_set(_predicate("mod:3:0"))
    target = ascending_set(rel, n)
    limit = target.enum_upto(1000)
    for text in (canonical_text(target), seeded_text(target, seed)):
        assert text.prefix(length).content <= limit


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_texts_replay_from_their_descriptor(seed):
    a = arbitrary_text(seed)
    b = arbitrary_text(a.descriptor["seed"], a.descriptor["universe"])
    assert a.prefix(60) == b.prefix(60)
    assert a.prefix(200).content <= set(a.descriptor["elements"])


def test_complete_by_closure_matches_closure_upto():
    evens = from_recursive_set(_predicate("even"))
    text = complete_by_closure((6, 3), evens)
    for s in (20, 60, 120):
        want = evens.closure([6, 3], s)
        got = text.prefix(s + 1).content
        assert got <= want
    assert text.prefix(400).content & set(range(21)) == {x for x in evens.closure([6, 3], 399) if x <= 20}


def test_fixed_text_pads_with_pauses():
    assert list(fixed_text([1, 2]).prefix(4)) == [1, 2, PAUSE, PAUSE]


def chain_setup():
    rel = identity()
    learner = chain_or_naturals(rel, make_set("even", rel), 1)
    return learner, learner.space


def test_adversary_forces_mind_changes_on_the_chain_learner():
    learner, chain = chain_setup()
    res = adversarial_chain_text(learner, chain)
    assert res.mind_changes >= 5


def test_adversary_stalls_on_a_constant_learner():
    rel = identity()
    res = adversarial_chain_text(constant_learner(ascending_family(rel), 3), chain_and_naturals(rel, make_set("even", rel)),
                                 budget=200)
    assert res.mind_changes <= 1
    assert res.progress.is_inconclusive


def test_adversary_with_zero_budget():
    learner, chain = chain_setup()
    res = adversarial_chain_text(learner, chain, budget=0)
    assert res.sequence == () and res.mind_changes == 0
