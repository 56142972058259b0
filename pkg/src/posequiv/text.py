"""Texts: total presentations of a set's elements, with the pause mark ``#``."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Iterable, Optional, Sequence, Union

from .eqrel import EqRelApprox
from .numbering import Numbering, SetApprox, equal_upto
from .verdict import BOUND, QUIET, STAGE_BUDGET, Verdict

PAUSE = "#"
Datum = Union[int, str]


class FiniteSequence(tuple):
    """An immutable finite sequence of data; ``content`` drops the pauses."""

    def __new__(cls, data: Iterable[Datum] = ()):
        data = tuple(data)
        for d in data:
            if d != PAUSE and not (isinstance(d, int) and d >= 0):
                raise ValueError(f"datum must be a natural number or {PAUSE!r}, got {d!r}")
        return super().__new__(cls, data)

    @property
    def content(self) -> frozenset[int]:
        return frozenset(d for d in self if d != PAUSE)

    def extend(self, more: Iterable[Datum]) -> "FiniteSequence":
        return FiniteSequence(tuple(self) + tuple(more))

    def __repr__(self):
        return "(" + ",".join(str(d) for d in self) + ")"


def content(data: Iterable[Datum]) -> frozenset[int]:
    return frozenset(d for d in data if d != PAUSE)


class Text:
    """A total text given by a generator; prefixes are memoised.

    ``step(position, emitted_so_far)`` returns the datum at ``position``.
    The descriptor identifies the generator for replay.
    """

    def __init__(self, step: Callable[[int, list], Datum], descriptor: dict):
        self._step = step
        self.descriptor = descriptor
        self._data: list[Datum] = []

    def __repr__(self):
        return f"Text({self.descriptor})"

    def at(self, position: int) -> Datum:
        while len(self._data) <= position:
            self._data.append(self._step(len(self._data), self._data))
        return self._data[position]

    def prefix(self, length: int) -> FiniteSequence:
        if length > 0:
            self.at(length - 1)
        return FiniteSequence(self._data[:length])


def fixed_text(data: Sequence[Datum], then: Datum = PAUSE) -> Text:
    """Finite data followed by ``then`` forever (pauses by default)."""
    data = tuple(data)
    return Text(lambda p, _: data[p] if p < len(data) else then,
                {"kind": "fixed", "data": list(data), "then": then})


def canonical_text(s: SetApprox) -> Text:
    """Position p emits the least element of ``s.enum_upto(p)`` not yet emitted, else ``#``."""
    state = {"emitted": set()}

    def step(p, _data):
        pending = s.enum_upto(p) - state["emitted"]
        if not pending:
            return PAUSE
        x = min(pending)
        state["emitted"].add(x)
        return x

    return Text(step, {"kind": "canonical", "set": s.label})


def seeded_text(s: SetApprox, seed: int, pause_rate: float = 0.2, fresh_rate: float = 0.5) -> Text:
    """Random interleaving of fresh elements, repetitions and pauses, fixed by ``seed``.

    With probability ``pause_rate`` a pause is emitted; otherwise the least
    pending element of ``s.enum_upto(p)`` with probability ``fresh_rate``
    (always, when nothing has been emitted yet), else a repetition of an
    element already shown.
    """
    if not 0 <= pause_rate < 1:
        raise ValueError("pause_rate must lie in [0, 1)")
    rng = random.Random(seed)
    state = {"emitted": set(), "order": []}

    def step(p, _data):
        roll = rng.random()
        pick = rng.random()
        if roll < pause_rate:
            return PAUSE
        pending = s.enum_upto(p) - state["emitted"]
        if pending and (not state["order"] or pick < fresh_rate):
            x = min(pending)
            state["emitted"].add(x)
            state["order"].append(x)
            return x
        if state["order"]:
            return state["order"][int(pick * len(state["order"])) % len(state["order"])]
        return PAUSE

    return Text(step, {"kind": "seeded", "set": s.label, "seed": seed, "pause_rate": pause_rate})


def arbitrary_text(seed: int, universe: int = 40, pause_rate: float = 0.2) -> Text:
    """A seeded text for an arbitrary finite subset of ``[0, universe)``."""
    rng = random.Random(seed)
    size = rng.randint(0, 6)
    elements = sorted(rng.sample(range(universe), size))
    from .numbering import finite_approx
    text = seeded_text(finite_approx(elements), seed, pause_rate)
    text.descriptor = {"kind": "arbitrary", "seed": seed, "universe": universe,
                       "elements": elements, "pause_rate": pause_rate}
    return text


def complete_by_closure(sigma: Sequence[Datum], rel: EqRelApprox) -> Text:
    """``sigma`` followed by the closure of its content, one new element per position."""
    sigma = FiniteSequence(sigma)
    base = sigma.content
    state = {"emitted": set(base)}

    def step(p, _data):
        if p < len(sigma):
            return sigma[p]
        pending = rel.closure(base, p) - state["emitted"]
        if not pending:
            return PAUSE
        x = min(pending)
        state["emitted"].add(x)
        return x

    return Text(step, {"kind": "closure-completion", "sigma": list(sigma), "relation": rel.label})


# -- adversarial driver --------------------------------------------------------

@dataclass
class AdversarialResult:
    sequence: FiniteSequence
    mind_changes: int
    progress: Verdict
    segments: list = field(default_factory=list)


def adversarial_chain_text(learner, chain: Numbering, budget: int = STAGE_BUDGET,
                           max_len: int = 3, stage: int = STAGE_BUDGET, bound: int = BOUND,
                           quiet: int = QUIET, rounds: Optional[int] = None) -> AdversarialResult:
    """Force mind changes along an ascending chain ``chain.decode(1) ⊂ chain.decode(2) ⊂ ...``.

    Round n looks, in length-lexicographic order over the elements of the
    stage approximation of ``B_{n+1}``, for the first string that drives
    the learner to a hypothesis equal (on the window) to ``B_{n+1}``.
    ``budget`` caps the total number of learner evaluations.
    """
    seq: tuple = ()
    spent = 0
    changes = 0
    last_hyp = None
    segments = []
    verdict_cache: dict = {}
    n = 0
    while rounds is None or n < rounds:
        target = chain.decode(n + 1)
        alphabet = sorted(target.window(stage, bound))
        found = None
        for length in range(max_len + 1):
            for cand in product(alphabet, repeat=length):
                if spent >= budget:
                    break
                spent += 1
                hyp = learner(FiniteSequence(seq + cand))
                if hyp is None:
                    continue
                key = (hyp, n)
                ok = verdict_cache.get(key)
                if ok is None:
                    ok = equal_upto(learner.space.decode(hyp), target, stage, bound, quiet).is_holds
                    verdict_cache[key] = ok
                if ok:
                    found = (cand, hyp)
                    break
            if found or spent >= budget:
                break
        if not found:
            return AdversarialResult(FiniteSequence(seq), changes,
                                     Verdict.inconclusive("search exhausted", round=n, spent=spent),
                                     segments)
        cand, hyp = found
        seq = seq + cand
        segments.append(list(cand))
        if last_hyp is not None and hyp != last_hyp:
            changes += 1
        last_hyp = hyp
        n += 1
        if spent >= budget:
            break
    return AdversarialResult(FiniteSequence(seq), changes,
                             Verdict.holds(rounds=n, mind_changes=changes, spent=spent), segments)
