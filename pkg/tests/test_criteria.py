from hypothesis import given, settings, strategies as st
import pytest

from posequiv.constructions import infinite_and_shifted_ascending, make_set
from posequiv.criteria import (Trace, brute_force_ex, bc_nonmonotone_witness, constraint_check,
                               convergence_probe, criterion_verdict, mind_changes,
                               replay_nonmonotone_witness, run_trace, stabilising_sequence_search,
                               trace_from_hypotheses)
from posequiv.eqrel import identity
from posequiv.learners import (Learner, ascending_ex_learner, closure_bc_learner, constant_learner,
                               make_learner, scripted_bc_for_shifted)
from posequiv.numbering import Numbering, ascending_family, ascending_set, finite_approx, naturals
from posequiv.text import PAUSE, arbitrary_text, canonical_text, fixed_text

QUIET = 10


def small_space():
    return Numbering(lambda i: finite_approx(range(i)), "prefixes")


def test_run_trace_constant_learner():
    tr = run_trace(constant_learner(small_space(), 4), fixed_text([]), 3)
    assert tr.hypotheses == [4, 4, 4, 4] and tr.mind_changes == 0
    with pytest.raises(ValueError):
        run_trace(constant_learner(small_space()), fixed_text([]), 0)


def test_run_trace_ascending_learner_stabilizes_on_a2():
    rel = identity()
    m = ascending_ex_learner(rel)
    tr = run_trace(m, fixed_text([0, 1]), 50)
    assert tr.stabilization_point == 2
    assert m.space.decode(tr.hypotheses[-1]).enum_upto(100) == {0, 1}


def test_mind_change_count_skips_abstentions():
    assert mind_changes([None, None, 3, 3, 5]) == 1
    assert mind_changes([None, 3, None, 3]) == 0


def test_fin_examples():
    space = small_space()
    target = finite_approx(range(3))
    tr = trace_from_hypotheses([None, None] + [3] * 20, space)
    assert criterion_verdict(tr, "Fin", target, quiet=QUIET).is_holds
    tr = trace_from_hypotheses([2] + [3] * 20, space)
    assert criterion_verdict(tr, "Fin", target, quiet=QUIET).is_violated
    assert criterion_verdict(tr, "Ex", target, quiet=QUIET).is_holds
    tr = trace_from_hypotheses([None] + [5] * 20, space)
    assert criterion_verdict(tr, "Fin", target, quiet=QUIET).is_violated


def test_bc_with_fresh_but_equal_conjectures():
    space = Numbering(lambda i: finite_approx([0, 1]), "all-equal")
    tr = trace_from_hypotheses(list(range(30)), space)
    target = finite_approx([0, 1])
    assert criterion_verdict(tr, "Ex", target, quiet=QUIET).is_inconclusive
    assert criterion_verdict(tr, "BC", target, quiet=QUIET).is_holds


def test_vac_needs_and_uses_a_cap():
    space = Numbering(lambda i: finite_approx([0]), "same")
    tr = trace_from_hypotheses([1, 2, 1, 2] * 10, space)
    target = finite_approx([0])
    with pytest.raises(ValueError):
        criterion_verdict(tr, "Vac", target, quiet=QUIET)
    assert criterion_verdict(tr, "Vac", target, quiet=QUIET, cap=2).is_holds
    assert criterion_verdict(tr, "Vac", target, quiet=QUIET, cap=1).is_violated


def test_short_traces_are_inconclusive():
    tr = trace_from_hypotheses([3, 3, 3], small_space())
    for kind in ("Ex", "BC", "Fin"):
        assert criterion_verdict(tr, kind, finite_approx(range(3)), quiet=QUIET).is_inconclusive


hyps = st.lists(st.one_of(st.none(), st.integers(0, 4)), min_size=1, max_size=40)


@settings(max_examples=150, deadline=None)
@given(hyps, st.integers(0, 4))
def test_criteria_inclusions_and_ex_oracle(hs, t):
    space = small_space()
    tr = trace_from_hypotheses(hs, space)
    target = finite_approx(range(t))
    v = {k: criterion_verdict(tr, k, target, quiet=5, cap=3) for k in ("Fin", "Ex", "BC", "Vac")}
    if v["Fin"].is_holds:
        assert v["Ex"].is_holds
    if v["Ex"].is_holds:
        assert v["BC"].is_holds
    if v["Vac"].is_holds:
        assert v["BC"].is_holds
    assert v["Ex"].status == brute_force_ex(tr, target, quiet=5).status


@settings(max_examples=80, deadline=None)
@given(hyps, st.integers(0, 4), st.integers(1, 20))
def test_longer_horizons_never_flip_verdicts(hs, t, extra):
    space = small_space()
    target = finite_approx(range(t))
    short = trace_from_hypotheses(hs, space)
    longer = trace_from_hypotheses(hs + [hs[-1]] * extra, space)
    for kind in ("Fin", "Ex", "BC"):
        a = criterion_verdict(short, kind, target, quiet=5)
        b = criterion_verdict(longer, kind, target, quiet=5)
        if not a.is_inconclusive and not b.is_inconclusive:
            assert a.status == b.status


def test_convergence_probe_examples():
    rel = identity()
    assert convergence_probe(constant_learner(small_space()), [arbitrary_text(s) for s in range(5)], 100).is_holds
    m = ascending_ex_learner(rel)
    counts = []
    for horizon in (100, 200):
        v = convergence_probe(m, [canonical_text(naturals())], horizon)
        assert v.is_inconclusive
        counts.append(v.witness["mind_changes"])
    assert counts[0] < counts[1]


def test_weak_mode_skips_untagged_texts():
    m = ascending_ex_learner(identity())
    v = convergence_probe(m, [canonical_text(naturals())], 100, weak=True)
    assert v.is_holds and v.witness["texts"] == 0


def test_single_hypothesis_trace_passes_every_constraint():
    rel = identity()
    fam = ascending_family(rel)
    tr = trace_from_hypotheses([2] * 20, fam, data=[0, 1])
    for kind in ("Conservative", "StrongMon", "WeakMon"):
        assert constraint_check(tr, kind).is_holds
    assert constraint_check(tr, "Mon", target=ascending_set(rel, 2)).is_holds
    assert constraint_check(tr, "ClassPreserving", family=fam).is_holds


def test_constraint_violations_are_witnessed():
    rel = identity()
    fam = ascending_family(rel)
    tr = trace_from_hypotheses([3, 2, 2], fam, data=[0, 0])
    assert constraint_check(tr, "Conservative").is_violated
    assert constraint_check(tr, "StrongMon").is_violated
    assert constraint_check(tr, "WeakMon").is_violated
    assert constraint_check(tr, "Mon", target=ascending_set(rel, 3)).is_violated
    assert constraint_check(tr, "Mon", target=ascending_set(rel, 2)).is_holds


def test_stabilising_search_examples():
    rel = identity()
    v = stabilising_sequence_search(constant_learner(small_space()), ascending_set(rel, 3))
    assert v.is_holds and v.witness["sequence"] == []
    v = stabilising_sequence_search(ascending_ex_learner(rel), ascending_set(rel, 1))
    assert v.is_holds and v.witness["sequence"] == [0]
    flapping = Learner(lambda data: len(data) % 2, small_space())
    assert stabilising_sequence_search(flapping, ascending_set(rel, 2)).is_inconclusive


def shifted_family():
    rel = identity()
    b0 = make_set("even", rel)
    return rel, b0, infinite_and_shifted_ascending(rel, b0, 1)


def test_nonmonotone_witness_replays_to_violation():
    rel, b0, fam = shifted_family()
    bc = scripted_bc_for_shifted(rel, b0, 1)
    v = bc_nonmonotone_witness(bc, fam, rel)
    assert v.is_holds
    assert v.witness["x"] == rel.rep_at(v.witness["n"] + 2, 1000)
    assert replay_nonmonotone_witness(bc, fam, v.witness).is_violated


def test_nonmonotone_witness_inconclusive_cases():
    rel, b0, fam = shifted_family()
    assert bc_nonmonotone_witness(closure_bc_learner(rel), fam, rel).is_inconclusive
    assert bc_nonmonotone_witness(scripted_bc_for_shifted(rel, b0, 1), fam, rel, budgets=0).is_inconclusive
