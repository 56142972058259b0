"""Finite-horizon verdicts for learning criteria and constraints.

Every check answers Holds / Violated / Inconclusive.  Holds and Violated
carry positions, indices and bounds that replay to the same verdict.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Optional, Sequence

from .numbering import Numbering, SetApprox, equal_upto, subset_upto
from .text import PAUSE, FiniteSequence, Text, content, fixed_text
from .verdict import BOUND, HORIZON, QUIET, STAGE_BUDGET, Verdict, combine

CRITERIA = ("Ex", "BC", "Fin", "Vac")
CONSTRAINTS = ("Conservative", "StrongMon", "Mon", "WeakMon", "ClassPreserving")


@dataclass(frozen=True)
class TraceRecord:
    step: int
    datum: object
    hypothesis: Optional[int]
    budget_events: int = 0

    def as_dict(self) -> dict:
        return {"step": self.step, "datum": self.datum,
                "hypothesis": "?" if self.hypothesis is None else self.hypothesis,
                "budget_events": self.budget_events}


@dataclass
class Trace:
    """Record i holds the conjecture on the prefix of length i."""

    records: list = field(default_factory=list)
    data: tuple = ()
    space: Optional[Numbering] = None

    def __len__(self):
        return len(self.records)

    @property
    def hypotheses(self) -> list:
        return [r.hypothesis for r in self.records]

    @property
    def budget_events(self) -> int:
        return sum(r.budget_events for r in self.records)

    @property
    def mind_changes(self) -> int:
        return mind_changes(self.hypotheses)

    @property
    def distinct(self) -> set:
        return {h for h in self.hypotheses if h is not None}

    def runs(self) -> list[tuple[int, int]]:
        """(start position, hypothesis) of each maximal block of one conjecture, ``?`` skipped."""
        out = []
        for i, h in enumerate(self.hypotheses):
            if h is None:
                continue
            if not out or out[-1][1] != h:
                out.append((i, h))
        return out

    @property
    def stabilization_point(self) -> Optional[int]:
        hyps = self.hypotheses
        if not hyps or hyps[-1] is None:
            return None
        p = len(hyps) - 1
        while p > 0 and hyps[p - 1] == hyps[-1]:
            p -= 1
        return p

    def content_at(self, position: int) -> frozenset[int]:
        return content(self.data[:position])

    def decode(self, h: int) -> SetApprox:
        return self.space.decode(h)


def mind_changes(hyps: Sequence) -> int:
    seen = [h for h in hyps if h is not None]
    return sum(1 for a, b in zip(seen, seen[1:]) if a != b)


def run_trace(m, t: Text, horizon: int = HORIZON) -> Trace:
    """Evaluate ``m`` on every prefix of ``t`` of length 0..horizon."""
    if horizon < 1:
        raise ValueError("horizon must be at least 1")
    prefix = t.prefix(horizon)
    records = []
    for i in range(horizon + 1):
        conj = m.step(FiniteSequence(prefix[:i]))
        records.append(TraceRecord(i, prefix[i - 1] if i else None, conj.hypothesis, conj.budget_events))
    return Trace(records, tuple(prefix), m.space)


def trace_from_hypotheses(hyps: Sequence, space: Numbering, data: Sequence = ()) -> Trace:
    """Scripted trace, mainly for tests of the verdict logic."""
    data = tuple(data) + (PAUSE,) * max(0, len(hyps) - 1 - len(data))
    return Trace([TraceRecord(i, data[i - 1] if i else None, h) for i, h in enumerate(hyps)],
                 data, space)


# -- criteria -------------------------------------------------------------------

class _Judge:
    """Caches equal_upto verdicts of hypotheses against one target."""

    def __init__(self, trace, target, stage, bound, quiet):
        self.trace, self.target = trace, target
        self.stage, self.bound, self.quiet = stage, bound, quiet
        self.cache: dict = {}

    def __call__(self, h) -> Verdict:
        if h not in self.cache:
            self.cache[h] = equal_upto(self.trace.decode(h), self.target, self.stage, self.bound, self.quiet)
        return self.cache[h]


def criterion_verdict(trace: Trace, kind: str, target: SetApprox, bound: int = BOUND,
                      stage: int = STAGE_BUDGET, quiet: int = QUIET,
                      cap: Optional[int] = None) -> Verdict:
    if kind not in CRITERIA:
        raise ValueError(f"unknown criterion {kind!r}")
    judge = _Judge(trace, target, stage, bound, quiet)
    if kind == "Ex":
        return _ex(trace, judge)
    if kind == "BC":
        return _bc(trace, judge)
    if kind == "Fin":
        return _fin(trace, judge)
    if cap is None:
        raise ValueError("Vac needs an explicit cap on the number of distinct hypotheses")
    distinct = sorted(trace.distinct)
    if len(distinct) > cap:
        return Verdict.violated(distinct=len(distinct), cap=cap, hypotheses=distinct[: cap + 1])
    bc = _bc(trace, judge)
    if bc.is_holds:
        return Verdict.holds(distinct=len(distinct), cap=cap, **bc.witness)
    return bc


def _ex(trace: Trace, judge: _Judge) -> Verdict:
    p = trace.stabilization_point
    horizon = len(trace) - 1
    if p is None:
        return Verdict.inconclusive("no conjecture at the horizon", horizon=horizon)
    h = trace.hypotheses[-1]
    if horizon - p < judge.quiet:
        return Verdict.inconclusive("last change inside the quiet period", position=p,
                                    horizon=horizon, mind_changes=trace.mind_changes)
    sem = judge(h)
    if sem.is_holds:
        return Verdict.holds(hypothesis=h, stabilized_at=p, horizon=horizon,
                             mind_changes=trace.mind_changes, bound=judge.bound, stage=judge.stage)
    return Verdict.inconclusive("stabilized conjecture not equal to the target", hypothesis=h,
                                stabilized_at=p, comparison=sem)


def _bc(trace: Trace, judge: _Judge) -> Verdict:
    hyps = trace.hypotheses
    p = len(hyps)
    while p > 0 and hyps[p - 1] is not None and judge(hyps[p - 1]).is_holds:
        p -= 1
    horizon = len(hyps) - 1
    if horizon - p + 1 <= judge.quiet:
        return Verdict.inconclusive("correct suffix shorter than the quiet period", suffix_from=p,
                                    horizon=horizon)
    return Verdict.holds(correct_from=p, horizon=horizon, bound=judge.bound, stage=judge.stage)


def _fin(trace: Trace, judge: _Judge) -> Verdict:
    hyps = trace.hypotheses
    first = next((i for i, h in enumerate(hyps) if h is not None), None)
    if first is None:
        return Verdict.inconclusive("learner never committed", horizon=len(hyps) - 1)
    e = hyps[first]
    for i in range(first + 1, len(hyps)):
        if hyps[i] != e:
            return Verdict.violated(committed_at=first, hypothesis=e, changed_at=i, to=hyps[i])
    sem = judge(e)
    if sem.is_violated:
        return Verdict.violated(committed_at=first, hypothesis=e, wrong=sem.witness)
    if sem.is_inconclusive or len(hyps) - 1 - first < judge.quiet:
        return Verdict.inconclusive("commitment not yet confirmed", committed_at=first)
    return Verdict.holds(committed_at=first, hypothesis=e, bound=judge.bound, stage=judge.stage)


def brute_force_ex(trace: Trace, target: SetApprox, bound: int = BOUND, stage: int = STAGE_BUDGET,
                   quiet: int = QUIET) -> Verdict:
    """Reference Ex checker: try every suffix start and take the first constant one."""
    hyps = trace.hypotheses
    horizon = len(hyps) - 1
    for start in range(len(hyps)):
        tail = hyps[start:]
        if tail[0] is None or any(h != tail[0] for h in tail):
            continue
        if horizon - start < quiet:
            return Verdict.inconclusive("short tail")
        if equal_upto(trace.decode(tail[0]), target, stage, bound, quiet).is_holds:
            return Verdict.holds(hypothesis=tail[0], stabilized_at=start)
        return Verdict.inconclusive("wrong limit")
    return Verdict.inconclusive("no constant tail")


def convergence_probe(m, texts: Iterable, horizon: int = HORIZON, quiet: int = QUIET,
                      weak: bool = False) -> Verdict:
    """Per-corpus confidence evidence: every text's trace has a quiet tail.

    Items are texts or ``(text, tag)`` pairs; in weak mode untagged texts
    (arbitrary content) are skipped.
    """
    changes, events, checked = [], 0, 0
    for item in texts:
        text, tag = item if isinstance(item, tuple) else (item, None)
        if weak and tag is None:
            continue
        tr = run_trace(m, text, horizon)
        checked += 1
        changes.append(tr.mind_changes)
        events += tr.budget_events
        p = tr.stabilization_point
        if p is None or horizon - p < quiet:
            return Verdict.inconclusive("conjecture still moving near the horizon", text=text.descriptor,
                                        mind_changes=tr.mind_changes, horizon=horizon,
                                        budget_events=events)
    return Verdict.holds(texts=checked, horizon=horizon, mind_changes=changes, budget_events=events,
                         scope="supplied corpus only")


# -- constraints ----------------------------------------------------------------

def _contained(cnt: frozenset, w: SetApprox, stage: int, bound: int, quiet: int) -> Optional[bool]:
    """``cnt ⊆ W`` as True / False / None (unresolved)."""
    if cnt <= w.enum_upto(stage):
        return True
    top = max(cnt, default=0)
    if w.stable(stage, max(bound, top), quiet):
        return False
    return None


def constraint_check(trace: Trace, kind: str, space: Optional[Numbering] = None,
                     family: Optional[Numbering] = None, bound: int = BOUND,
                     stage: int = STAGE_BUDGET, quiet: int = QUIET,
                     target: Optional[SetApprox] = None, family_limit: int = 40) -> Verdict:
    if kind not in CONSTRAINTS:
        raise ValueError(f"unknown constraint {kind!r}")
    space = space or trace.space
    dec = space.decode
    runs = trace.runs()
    verdicts = []

    if kind == "Conservative":
        for (start, prev), (q, _h) in zip(runs, runs[1:]):
            c = _contained(trace.content_at(q), dec(prev), stage, bound, quiet)
            if c:
                return Verdict.violated(run_start=start, changed_at=q, hypothesis=prev, stage=stage)
            if c is None:
                verdicts.append(Verdict.inconclusive("containment unresolved", changed_at=q))
    elif kind == "StrongMon":
        pairs = _run_pairs(runs, all_pairs=len(trace.distinct) <= 60)
        for (i, a), (j, b) in pairs:
            v = subset_upto(dec(a), dec(b), stage, bound, quiet)
            if v.is_violated:
                return Verdict.violated(earlier=i, later=j, element=v.witness["element"], stage=stage,
                                        bound=bound)
            verdicts.append(v)
    elif kind == "Mon":
        if target is None:
            raise ValueError("Mon needs the target set")
        lang = target.window(stage, bound)
        for (i, a), (j, b) in _run_pairs(runs, all_pairs=True):
            wb = dec(b)
            extra = (dec(a).window(stage, bound) & lang) - wb.window(stage, bound)
            if extra:
                if wb.stable(stage, bound, quiet):
                    return Verdict.violated(earlier=i, later=j, element=min(extra), stage=stage,
                                            bound=bound)
                verdicts.append(Verdict.inconclusive("later conjecture still growing", later=j))
    elif kind == "WeakMon":
        for (i, a), (j, b) in _run_pairs(runs, all_pairs=True):
            premise = _contained(trace.content_at(j), dec(a), stage, bound, quiet)
            if premise is False:
                continue
            v = subset_upto(dec(a), dec(b), stage, bound, quiet)
            if v.is_violated and premise:
                return Verdict.violated(earlier=i, later=j, element=v.witness["element"], stage=stage,
                                        bound=bound)
            if not v.is_holds:
                verdicts.append(Verdict.inconclusive("implication unresolved", earlier=i, later=j))
    else:
        if family is None:
            raise ValueError("ClassPreserving needs the family")
        for h in sorted(trace.distinct):
            match = next((k for k in range(family_limit)
                          if equal_upto(dec(h), family.decode(k), stage, bound, quiet).is_holds), None)
            if match is None:
                verdicts.append(Verdict.inconclusive("no family member matched below the limit",
                                                     hypothesis=h, family_limit=family_limit))
    out = combine(verdicts)
    if out.is_holds:
        return Verdict.holds(kind=kind, runs=len(runs), bound=bound, stage=stage)
    return out


def _run_pairs(runs, all_pairs: bool):
    """Pairs (earlier run, later run) of distinct conjectures, first occurrence of each pair."""
    if not all_pairs:
        return list(zip(runs, runs[1:]))
    seen, out = set(), []
    for x, (i, a) in enumerate(runs):
        for j, b in runs[x + 1:]:
            if a != b and (a, b) not in seen:
                seen.add((a, b))
                out.append(((i, a), (j, b)))
    return out


# -- stabilising sequences ---------------------------------------------------------

def _sequences(alphabet: Sequence, max_len: int):
    for length in range(max_len + 1):
        yield from product(alphabet, repeat=length)


def changes_after(learner, prefix: Sequence, alphabet: Sequence, probe_len: int, base) -> bool:
    """Does some extension of ``prefix`` by at most ``probe_len`` symbols move the learner off ``base``?"""
    prefix = tuple(prefix)
    return any(learner(FiniteSequence(prefix + tau)) != base for tau in _sequences(alphabet, probe_len))


def first_stabilising(learner, alphabet: Sequence, seq_len: int, probe_len: int) -> tuple:
    """First σ over ``alphabet`` (length-lex) that no short probe moves; ``()`` if none is found."""
    found = _find_stabilising(learner, alphabet, alphabet, seq_len, probe_len)
    return found if found is not None else ()


def _find_stabilising(learner, seq_alphabet, probe_alphabet, seq_len, probe_len):
    for sigma in _sequences(seq_alphabet, seq_len):
        base = learner(FiniteSequence(sigma))
        if not changes_after(learner, sigma, probe_alphabet, probe_len, base):
            return sigma
    return None


def stabilising_sequence_search(m, s: SetApprox, len_bound: int = 2, probe_bound: int = 2,
                                stage: int = STAGE_BUDGET, bound: int = 20,
                                alphabet_cap: int = 8) -> Verdict:
    """Length-lex search for a σ over the set that no probe over the set plus ``#`` moves."""
    alphabet = sorted(s.window(stage, bound))[:alphabet_cap]
    sigma = _find_stabilising(m, alphabet, alphabet + [PAUSE], len_bound, probe_bound)
    if sigma is None:
        return Verdict.inconclusive("no stabilising sequence at these bounds", len_bound=len_bound,
                                    probe_bound=probe_bound, alphabet=alphabet)
    return Verdict.holds(sequence=list(sigma), hypothesis=m(FiniteSequence(sigma)),
                         len_bound=len_bound, probe_bound=probe_bound, alphabet=alphabet)


# -- monotonicity witness ---------------------------------------------------------------

def bc_nonmonotone_witness(bc, family: Numbering, rel, budgets: int = 2000, max_len: int = 3,
                           stage: int = STAGE_BUDGET, bound: int = BOUND, quiet: int = QUIET,
                           n_limit: int = 20) -> Verdict:
    """Drive a correct BC learner of ``{B_0} ∪ {A_{i+k}}`` into a monotonicity violation.

    Find σ over B_0 conjectured as B_0, then n with ``a_{n+k+1}`` in B_0 and
    cnt(σ) ⊆ B_{n+1}, then τ over B_{n+1} conjectured as B_{n+1}.  The
    element x = ``a_{n+k+1}`` lies in the first conjecture and in B_{n+2}
    but not in the second.  ``budgets`` caps learner evaluations.
    """
    k = family.k
    spent = 0

    def search(prefix, target):
        nonlocal spent
        alphabet = sorted(target.window(stage, bound))[:12]
        memo = {}
        for cand in _sequences(alphabet, max_len):
            if spent >= budgets:
                return None
            spent += 1
            h = bc(FiniteSequence(prefix + cand))
            if h is None:
                continue
            if h not in memo:
                memo[h] = equal_upto(bc.space.decode(h), target, stage, bound, quiet).is_holds
            if memo[h]:
                return cand
        return None

    b0 = family.decode(0)
    sigma = search((), b0)
    if sigma is None:
        return Verdict.inconclusive("no sequence conjectured as the infinite member", spent=spent)
    cnt = content(sigma)
    b0_window = b0.window(stage, bound)
    for n in range(n_limit):
        x = rel.rep_at(n + k + 1, stage)
        if x not in b0_window or not cnt <= family.decode(n + 1).enum_upto(stage):
            continue
        tau = search(sigma, family.decode(n + 1))
        if tau is None:
            return Verdict.inconclusive("no sequence conjectured as the ascending member", n=n, spent=spent)
        return Verdict.holds(sigma=list(sigma), tau=list(tau), x=x, n=n, target_index=n + 2, spent=spent)
    return Verdict.inconclusive("no suitable n below the limit", spent=spent)


def replay_nonmonotone_witness(bc, family: Numbering, witness: dict, stage: int = STAGE_BUDGET,
                               bound: int = BOUND, quiet: int = QUIET) -> Verdict:
    """Mon check of ``bc`` on σ∘τ against ``B_{n+2}``."""
    data = tuple(witness["sigma"]) + tuple(witness["tau"])
    tr = run_trace(bc, fixed_text(data), max(1, len(data)))
    return constraint_check(tr, "Mon", bc.space, bound=bound, stage=stage, quiet=quiet,
                            target=family.decode(witness["target_index"]))
