"""Stage-approximated r.e. sets and uniformly enumerable numberings of them.

A :class:`SetApprox` is a monotone family of finite sets indexed by stage;
a :class:`Numbering` maps natural indices to SetApprox objects.  Equality
of r.e. sets is undecidable, so comparisons return a :class:`Verdict`
backed by a trailing quiet period.
"""

from __future__ import annotations

from typing import Callable, Iterable, Optional

from .coding import decode_tuple, encode_tuple, finite_set, finite_set_code, pair, unpair
from .eqrel import EqRelApprox
from .verdict import BOUND, QUIET, STAGE_BUDGET, Verdict, combine


class SetApprox:
    """A monotone stage-indexed approximation of one r.e. set.

    ``fn(stage)`` must return a finite set and be monotone in stage; with
    ``cumulative=True`` monotonicity is enforced by taking running unions.
    """

    def __init__(self, fn: Callable[[int], Iterable[int]], label: str = "set",
                 cumulative: bool = False):
        self._fn = fn
        self.label = label
        self._cumulative = cumulative
        self._memo: dict[int, frozenset[int]] = {}
        self._running: list[frozenset[int]] = []

    def __repr__(self):
        return f"SetApprox({self.label!r})"

    def enum_upto(self, stage: int) -> frozenset[int]:
        if stage < 0:
            return frozenset()
        if self._cumulative:
            while len(self._running) <= stage:
                prev = self._running[-1] if self._running else frozenset()
                self._running.append(prev | frozenset(self._fn(len(self._running))))
            return self._running[stage]
        got = self._memo.get(stage)
        if got is None:
            got = frozenset(self._fn(stage))
            self._memo[stage] = got
        return got

    def window(self, stage: int, bound: int) -> frozenset[int]:
        return frozenset(x for x in self.enum_upto(stage) if x <= bound)

    def stable(self, stage: int, bound: int, quiet: int = QUIET) -> bool:
        """Window content unchanged over the trailing ``quiet`` stages."""
        return self.window(stage, bound) == self.window(max(0, stage - quiet), bound)

    def enumeration_order(self, stage: int) -> list[int]:
        """Elements in order of first appearance (ties broken by value)."""
        seen: set[int] = set()
        out: list[int] = []
        for s in range(stage + 1):
            fresh = sorted(self.enum_upto(s) - seen)
            out.extend(fresh)
            seen.update(fresh)
        return out


def finite_approx(elements: Iterable[int], label: Optional[str] = None) -> SetApprox:
    """A finite set present from stage 0."""
    fixed = frozenset(elements)
    return SetApprox(lambda t: fixed, label or f"{sorted(fixed)}")


def from_events(events: Iterable[tuple[int, int]], label: str = "events") -> SetApprox:
    """Set built from ``(stage, element)`` events; present from that stage on."""
    events = sorted((int(s), int(x)) for s, x in events)

    def fn(t):
        return [x for s, x in events if s <= t]

    return SetApprox(fn, label)


def empty_set() -> SetApprox:
    return finite_approx((), "empty")


def naturals() -> SetApprox:
    """N, approximated as ``{0, ..., t}`` at stage t."""
    return SetApprox(lambda t: range(t + 1), "N")


class FiniteSetCode:
    """Canonical code of a finite set: ``D_i`` is the binary expansion of i."""

    __slots__ = ("code", "elements")

    def __init__(self, code: int):
        self.code = code
        self.elements = finite_set(code)

    @classmethod
    def of(cls, elements: Iterable[int]) -> "FiniteSetCode":
        return cls(finite_set_code(elements))

    def __eq__(self, other):
        return isinstance(other, FiniteSetCode) and other.code == self.code

    def __hash__(self):
        return hash(self.code)

    def __repr__(self):
        return f"D_{self.code}={sorted(self.elements)}"


class Numbering:
    """A uniformly enumerable indexed family: ``decode(i)`` is a SetApprox."""

    def __init__(self, decode: Callable[[int], SetApprox], label: str = "numbering",
                 relation: Optional[EqRelApprox] = None):
        self._decode = decode
        self.label = label
        self.relation = relation
        self._memo: dict[int, SetApprox] = {}

    def __repr__(self):
        return f"Numbering({self.label!r})"

    def decode(self, index: int) -> SetApprox:
        got = self._memo.get(index)
        if got is None:
            got = self._decode(index)
            self._memo[index] = got
        return got

    def __getitem__(self, index: int) -> SetApprox:
        return self.decode(index)


class TaggedSpace(Numbering):
    """Hypothesis space whose indices encode ``(tag, params...)``.

    Each tag owns a builder ``params -> SetApprox``.  Index of
    ``(tag, *params)`` is ``pair(tag_id, encode_tuple(params))``; indices
    with unknown tags decode to the empty set.
    """

    def __init__(self, label: str = "space", relation: Optional[EqRelApprox] = None):
        super().__init__(self._build, label, relation)
        self._tags: list[str] = []
        self._builders: list[Callable[..., SetApprox]] = []

    def register(self, tag: str, builder: Callable[..., SetApprox]) -> "TaggedSpace":
        if tag in self._tags:
            raise ValueError(f"tag {tag!r} already registered")
        self._tags.append(tag)
        self._builders.append(builder)
        return self

    def index(self, tag: str, *params: int) -> int:
        return pair(self._tags.index(tag), encode_tuple(params))

    def describe(self, index: int) -> tuple[str, tuple[int, ...]]:
        tag_id, rest = unpair(index)
        if tag_id >= len(self._tags):
            return ("?", ())
        return self._tags[tag_id], decode_tuple(rest)

    def _build(self, index: int) -> SetApprox:
        tag_id, rest = unpair(index)
        if tag_id >= len(self._tags):
            return empty_set()
        params = decode_tuple(rest)
        try:
            return self._builders[tag_id](*params)
        except TypeError:
            return empty_set()


# -- standard numberings --------------------------------------------------

def ascending_set(rel: EqRelApprox, n: int) -> SetApprox:
    """``A_n = [a_0, ..., a_{n-1}]`` approximated by the stage-t representatives."""
    return SetApprox(lambda t: rel.closure(rel.reps(t, n), t), f"A_{n}")


def ascending_family(rel: EqRelApprox) -> Numbering:
    return Numbering(lambda n: ascending_set(rel, n), "ascending", rel)


def ascending_cover(rel: EqRelApprox, content: Iterable[int], t: int) -> int:
    """Least n with ``content`` inside ``A_{n,t}``."""
    content = list(content)
    if not content:
        return 0
    return max(rel.rep_index(x, t) for x in content) + 1


def closure_set(rel: EqRelApprox, elements: Iterable[int], label: str = "closure") -> SetApprox:
    elements = frozenset(elements)
    return SetApprox(lambda t: rel.closure(elements, t), label)


def canonical_finite_sets() -> Numbering:
    """``i -> D_i``."""
    return Numbering(lambda i: finite_approx(finite_set(i), f"D_{i}"), "D")


def closure_numbering(num: Numbering, rel: EqRelApprox) -> Numbering:
    """``i -> [num_i]``, stage t set ``[num_i enumerated by t]_t``."""

    def decode(i):
        base = num.decode(i)
        return SetApprox(lambda t: rel.closure(base.enum_upto(t), t), f"[{base.label}]")

    return Numbering(decode, f"closure({num.label})", rel)


def closed_finite_sets(rel: EqRelApprox) -> Numbering:
    """Index i decodes to the closure ``[D_i]``."""
    return closure_numbering(canonical_finite_sets(), rel)


def guard_overwrite(source: SetApprox, start: int, valid: Callable[[int], bool],
                    overwrite: Callable[[frozenset[int], int], SetApprox],
                    label: str = "guarded") -> SetApprox:
    """Copy ``source`` from ``start`` while ``valid(s)`` holds, then overwrite.

    Let ``v`` be the least stage ``>= start`` with ``valid(v)`` false.  The
    set is empty before ``start``, follows ``source`` on ``[start, v)``,
    and from ``v`` on is the content copied so far together with
    ``overwrite(copied, v)``.
    """
    state = {"checked": start - 1, "invalid_at": None, "fallback": None, "copied": frozenset()}

    def invalid_at(u: int) -> Optional[int]:
        while state["invalid_at"] is None and state["checked"] < u:
            s = state["checked"] + 1
            if not valid(s):
                state["invalid_at"] = s
                copied = source.enum_upto(s - 1) if s > start else frozenset()
                state["copied"] = copied
                state["fallback"] = overwrite(copied, s)
            state["checked"] = s
        return state["invalid_at"]

    def fn(u: int):
        if u < start:
            return frozenset()
        v = invalid_at(u)
        if v is None:
            return source.enum_upto(u)
        return state["copied"] | state["fallback"].enum_upto(u)

    result = SetApprox(fn, label)
    result.invalidated_at = invalid_at  # type: ignore[attr-defined]
    return result


# -- one-one merge -------------------------------------------

def candidate_triple(i: int) -> tuple[int, int, int]:
    k, rest = unpair(i)
    n, t = unpair(rest)
    return k, n, t


def candidate_guard(e_family: Numbering, rel: EqRelApprox, k: int, n: int, t: int) -> bool:
    """Whether ``(k, n)`` looks like a witness for ``E_k`` at stage t."""
    ek = e_family.decode(k).enum_upto(t)
    reps = rel.reps(t, n + 2)
    if reps[n] in ek:
        return False
    if n % 2 == 1 and all(reps[m] in ek for m in range(n)):
        return True
    return reps[n + 1] in ek


def guarded_candidate(e_family: Numbering, rel: EqRelApprox, k: int, n: int, t: int,
                 base: Callable[[int], int] = lambda j: j) -> SetApprox:
    """``U_{k,n,t}``: copies ``E_k`` while the witness survives, else an odd ascending set."""
    ek = e_family.decode(k)
    reps_t = rel.reps(t, n + 2)

    def valid(s: int) -> bool:
        if s == t:
            return candidate_guard(e_family, rel, k, n, t)
        return reps_t[n] not in ek.enum_upto(s) and rel.reps(s, n + 2) == reps_t

    def overwrite(copied, _stage):
        h = max(copied, default=0)
        return ascending_set(rel, base(2 * h + 1))

    return guard_overwrite(ek, t, valid, overwrite, f"U_{k},{n},{t}")


def guarded_candidates(e_family: Numbering, rel: EqRelApprox,
                 base: Callable[[int], int] = lambda j: j) -> Numbering:
    """All ``U_{k,n,t}``; index i codes ``(k, n, t)`` by nested Cantor pairing."""
    return Numbering(lambda i: guarded_candidate(e_family, rel, *candidate_triple(i), base=base),
                     "U", rel)


class _Slot:
    __slots__ = ("created", "l_index", "killed", "h_index", "copied")

    def __init__(self, created, l_index=None, h_index=None):
        self.created = created
        self.l_index = l_index
        self.killed = None
        self.h_index = h_index
        self.copied = frozenset()


class OneOneMerge(Numbering):
    """One-one numbering of ``L ∪ H`` built stage by stage.

    ``L`` lists candidate sets possibly with repetitions (supplied as a
    growing list of SetApprox), ``H`` is one-one, disjoint from ``L`` and
    rich enough that every finite set lies in infinitely many ``H_j``.
    Output indices are slots in creation order.  A slot following ``L_i``
    is retired as soon as an earlier ``L_{i'}`` has the same stage content;
    the retired slot then follows the least unused ``H_j`` covering what it
    already enumerated.  ``L_i`` receives a fresh slot whenever it has none
    and no earlier ``L_{i'}`` agrees with it.  Each ``H_j`` not yet used
    gets its own slot once ``j < stage // h_rate``.
    """

    def __init__(self, l_members: Callable[[int], list[SetApprox]], h_family: Numbering,
                 h_rate: int = 8, label: str = "one-one-merge", relation=None):
        super().__init__(self._decode_slot, label, relation)
        self._l_members = l_members
        self._h = h_family
        self._h_rate = h_rate
        self.slots: list[_Slot] = []
        self._live: dict[int, int] = {}
        self._h_used: set[int] = set()
        self._stage = -1

    def run_to(self, stage: int) -> None:
        while self._stage < stage:
            self._stage += 1
            self._step(self._stage)

    def _step(self, s: int) -> None:
        members = self._l_members(s)
        first_with: dict[frozenset[int], int] = {}
        for i, member in enumerate(members):
            content = member.enum_upto(s)
            earlier = first_with.setdefault(content, i)
            slot_id = self._live.get(i)
            if earlier != i:
                if slot_id is not None:
                    self._retire(slot_id, content, s)
                    del self._live[i]
            elif slot_id is None:
                self._live[i] = len(self.slots)
                self.slots.append(_Slot(s, l_index=i))
        for j in range(s // self._h_rate):
            if j not in self._h_used:
                self._h_used.add(j)
                self.slots.append(_Slot(s, h_index=j))

    def _retire(self, slot_id: int, content: frozenset[int], s: int) -> None:
        slot = self.slots[slot_id]
        j = 0
        while j in self._h_used or not content <= self._h.decode(j).enum_upto(s):
            j += 1
        self._h_used.add(j)
        slot.killed = s
        slot.h_index = j
        slot.copied = content

    def slot_content(self, e: int, u: int) -> frozenset[int]:
        self.run_to(u)
        if e >= len(self.slots):
            return frozenset()
        slot = self.slots[e]
        if slot.created > u:
            return frozenset()
        if slot.l_index is not None and (slot.killed is None or u < slot.killed):
            return self._l_members(u)[slot.l_index].enum_upto(u)
        return slot.copied | self._h.decode(slot.h_index).enum_upto(u)

    def _decode_slot(self, e: int) -> SetApprox:
        return SetApprox(lambda u: self.slot_content(e, u), f"{self.label}[{e}]")

    def resolved(self, e: int, stage: int, quiet: int = QUIET, bound: int = BOUND) -> bool:
        """Slot exists, kept its role over the last ``quiet`` stages, and is window-stable."""
        self.run_to(stage)
        if e >= len(self.slots):
            return False
        slot = self.slots[e]
        if slot.created > stage - quiet:
            return False
        if slot.killed is not None and slot.killed > stage - quiet:
            return False
        return self.decode(e).stable(stage, bound, quiet)

    def describe(self, e: int) -> str:
        slot = self.slots[e]
        if slot.l_index is not None and slot.killed is None:
            return f"L[{slot.l_index}]"
        return f"H[{slot.h_index}]"


def one_one_merge(e_family: Numbering, rel: EqRelApprox, *, include_naturals: bool = False,
                 base: Callable[[int], int] = lambda j: j, code_rate: int = 16,
                 h_rate: int = 8) -> OneOneMerge:
    """One-one numbering of an closed superfamily of the ascending family.

    The second family is ``A_{base(2j)}``; the first consists of the sets
    ``U_{k,n,t}`` whose witness holds at their own start stage t (the others
    are overwritten at once and duplicate members already present).  At
    stage s the triples with code below ``code_rate * s`` are considered.
    N is added as the first candidate when ``include_naturals`` is set.
    """
    valid_codes: list[int] = []
    members: list[SetApprox] = [naturals()] if include_naturals else []
    scanned = {"upto": 0}

    def l_members(s: int) -> list[SetApprox]:
        limit = code_rate * (s + 1)
        while scanned["upto"] < limit:
            c = scanned["upto"]
            scanned["upto"] += 1
            k, n, t = candidate_triple(c)
            if candidate_guard(e_family, rel, k, n, t):
                valid_codes.append(c)
                members.append(guarded_candidate(e_family, rel, k, n, t, base=base))
        return members

    h_family = Numbering(lambda j: ascending_set(rel, base(2 * j)), "A_even", rel)
    merged = OneOneMerge(l_members, h_family, h_rate=h_rate, label="one-one-merge", relation=rel)
    merged.valid_codes = valid_codes  # type: ignore[attr-defined]
    return merged


# -- bounded comparisons ----------------------------------------------------

def equal_upto(a: SetApprox, b: SetApprox, stage: int = STAGE_BUDGET, bound: int = BOUND,
               quiet: int = QUIET) -> Verdict:
    """Three-valued equality on ``[0, bound]`` at ``stage``.

    Holds when the windows agree and both are stable over the trailing
    quiet period; Violated when some element is in one window and the
    other, stable, window lacks it; otherwise Inconclusive.
    """
    if a is b:
        return Verdict.holds(stage=stage, bound=bound, same_object=True)
    wa, wb = a.window(stage, bound), b.window(stage, bound)
    sa, sb = a.stable(stage, bound, quiet), b.stable(stage, bound, quiet)
    if wa == wb:
        if sa and sb:
            return Verdict.holds(stage=stage, bound=bound, quiet=quiet)
        return Verdict.inconclusive("windows agree but are still growing", stage=stage)
    only_a, only_b = wa - wb, wb - wa
    if only_a and sb:
        return Verdict.violated(element=min(only_a), present_in="left", stage=stage, bound=bound)
    if only_b and sa:
        return Verdict.violated(element=min(only_b), present_in="right", stage=stage, bound=bound)
    return Verdict.inconclusive("windows differ but neither side is stable", stage=stage)


def subset_upto(a: SetApprox, b: SetApprox, stage: int = STAGE_BUDGET, bound: int = BOUND,
                quiet: int = QUIET) -> Verdict:
    """Three-valued ``a ⊆ b`` on ``[0, bound]`` at ``stage``."""
    wa, wb = a.window(stage, bound), b.window(stage, bound)
    missing = wa - wb
    if missing:
        if b.stable(stage, bound, quiet):
            return Verdict.violated(element=min(missing), stage=stage, bound=bound)
        return Verdict.inconclusive("right side still growing", stage=stage)
    if a.stable(stage, bound, quiet):
        return Verdict.holds(stage=stage, bound=bound)
    return Verdict.inconclusive("left side still growing", stage=stage)


def one_one_upto(num: Numbering, indices: Iterable[int], stage: int = STAGE_BUDGET,
                 bound: int = BOUND, quiet: int = QUIET) -> Verdict:
    """Holds iff every pair of listed indices is witnessed distinct."""
    indices = sorted(set(indices))
    results = []
    for x, i in enumerate(indices):
        for j in indices[x + 1:]:
            eq = equal_upto(num.decode(i), num.decode(j), stage, bound, quiet)
            if eq.is_holds:
                return Verdict.violated(pair=(i, j), stage=stage, bound=bound)
            if eq.is_inconclusive:
                results.append(Verdict.inconclusive("pair unresolved", pair=(i, j)))
            else:
                results.append(Verdict.holds(pair=(i, j)))
    out = combine(results)
    if out.is_holds:
        return Verdict.holds(indices=indices, stage=stage, bound=bound)
    return out
