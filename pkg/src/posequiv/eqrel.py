"""Stage-approximated positive equivalence relations.

A relation is driven by an event source that emits at most one pair per
stage; stage ``t`` means "after the first ``t`` enumeration events".  The
relation at stage ``t`` is the reflexive, symmetric, transitive closure of
the pairs emitted so far.  Everything is computed lazily and memoised per
stage; callers only ever see pure functions of ``(arguments, stage)``.
"""

from __future__ import annotations

import heapq
from bisect import bisect_right
from typing import Callable, Iterable, Iterator, Mapping, Optional

from .coding import cantor_pairs

Pair = tuple[int, int]


class _Partition:
    """Non-trivial classes at one stage; every other natural is a singleton."""

    __slots__ = ("owner", "classes", "nonmins")

    def __init__(self, owner=None, classes=None, nonmins=()):
        self.owner: dict[int, int] = owner or {}
        self.classes: dict[int, frozenset[int]] = classes or {}
        self.nonmins: tuple[int, ...] = nonmins

    def find(self, x: int) -> int:
        return self.owner.get(x, x)

    def members(self, x: int) -> frozenset[int]:
        return self.classes.get(self.find(x), frozenset((x,)))

    def merge(self, x: int, y: int) -> "_Partition":
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return self
        joined = self.members(rx) | self.members(ry)
        low = min(rx, ry)
        owner = dict(self.owner)
        for z in joined:
            owner[z] = low
        classes = dict(self.classes)
        classes.pop(rx, None)
        classes.pop(ry, None)
        classes[low] = joined
        nonmins = tuple(sorted(set(self.nonmins) | {max(rx, ry)}))
        return _Partition(owner, classes, nonmins)


class EqRelApprox:
    """A positive equivalence relation given by its stage approximations.

    ``source`` is called once with the relation itself and must return an
    iterator yielding, for stages 1, 2, ..., either a pair or ``None``.
    The iterator may query the relation at stages already produced, which
    is how self-referential constructions (such as a staged merge driven by
    representatives) are expressed.
    """

    def __init__(self, source: Callable[["EqRelApprox"], Iterator[Optional[Pair]]],
                 label: str = "relation"):
        self.label = label
        self._source_factory = source
        self._source: Optional[Iterator[Optional[Pair]]] = None
        self._exhausted = False
        self._events: list[Optional[Pair]] = []
        self._parts: list[_Partition] = [_Partition()]

    def __repr__(self):
        return f"EqRelApprox({self.label!r})"

    # -- stage machinery -------------------------------------------------

    def _ensure(self, t: int) -> None:
        if t < 0:
            raise ValueError("stage must be non-negative")
        if self._source is None:
            self._source = self._source_factory(self)
        while len(self._parts) <= t:
            event = None
            if not self._exhausted:
                try:
                    event = next(self._source)
                except StopIteration:
                    self._exhausted = True
            part = self._parts[-1]
            if event is not None:
                x, y = event
                part = part.merge(x, y)
            self._events.append(event)
            self._parts.append(part)

    def _part(self, t: int) -> _Partition:
        self._ensure(t)
        return self._parts[t]

    @property
    def stages_computed(self) -> int:
        return len(self._parts) - 1

    def event_at(self, t: int) -> Optional[Pair]:
        """The pair emitted on the way from stage ``t-1`` to ``t``."""
        if t == 0:
            return None
        self._ensure(t)
        return self._events[t - 1]

    def emit(self, t: int) -> list[Pair]:
        """All pairs emitted through stage ``t`` (cumulative)."""
        self._ensure(t)
        return [e for e in self._events[:t] if e is not None]

    # -- queries ---------------------------------------------------------

    def related_at(self, x: int, y: int, t: int) -> bool:
        part = self._part(t)
        return part.find(x) == part.find(y)

    def class_of(self, x: int, t: int) -> frozenset[int]:
        """The full class of ``x`` at stage ``t`` (always finite)."""
        return self._part(t).members(x)

    def class_min(self, x: int, t: int) -> int:
        return self._part(t).find(x)

    def closure(self, elements: Iterable[int], t: int) -> frozenset[int]:
        """``[D]_t``: union of the stage-``t`` classes of ``elements``."""
        part = self._part(t)
        out: set[int] = set()
        for x in elements:
            out |= part.members(x)
        return frozenset(out)

    def closure_upto(self, x: int, t: int, bound: int) -> frozenset[int]:
        return frozenset(y for y in self.class_of(x, t) if y <= bound)

    def nontrivial_classes(self, t: int) -> list[frozenset[int]]:
        part = self._part(t)
        return [part.classes[k] for k in sorted(part.classes)]

    def rep_at(self, n: int, t: int) -> int:
        """``a_{n,t}``: the n-th least class minimum at stage ``t``."""
        a = n
        for v in self._part(t).nonmins:
            if v <= a:
                a += 1
            else:
                break
        return a

    def reps(self, t: int, count: int) -> list[int]:
        """``[a_{0,t}, ..., a_{count-1,t}]``."""
        nonmins = self._part(t).nonmins
        out = []
        x = 0
        i = 0
        while len(out) < count:
            if i < len(nonmins) and nonmins[i] == x:
                i += 1
            else:
                out.append(x)
            x += 1
        return out

    def rep_index(self, x: int, t: int) -> int:
        """Index n with ``x`` in the class of ``a_{n,t}``."""
        part = self._part(t)
        m = part.find(x)
        return m - bisect_right(part.nonmins, m)

    def rep_limit_hint(self, n: int, budget: int) -> int:
        return self.rep_at(n, budget)

    def rep_changes(self, n: int, budget: int) -> int:
        """Number of stages ``t < budget`` with ``a_{n,t} != a_{n,t+1}``."""
        self._ensure(budget)
        changes = 0
        prev = self.rep_at(n, 0)
        for t in range(1, budget + 1):
            cur = self.rep_at(n, t)
            if cur != prev:
                changes += 1
            prev = cur
        return changes

    def last_change(self, n: int, budget: int) -> int:
        """Last stage ``t <= budget`` at which ``a_n`` moved (0 if never)."""
        last = 0
        prev = self.rep_at(n, 0)
        for t in range(1, budget + 1):
            cur = self.rep_at(n, t)
            if cur != prev:
                last = t
            prev = cur
        return last

    def partition_upto(self, t: int, bound: int) -> list[frozenset[int]]:
        """Classes of stage ``t`` restricted to ``[0, bound]``."""
        seen: set[int] = set()
        out = []
        for x in range(bound + 1):
            if x in seen:
                continue
            cls = self.closure_upto(x, t, bound)
            seen |= cls
            out.append(cls)
        return out


# -- relation constructors ---------------------------------------------------

def from_events(events: Iterable[Optional[Pair]], label: str = "explicit") -> EqRelApprox:
    """Relation whose stage ``s`` event is the ``s``-th item of ``events``."""
    events = list(events)
    return EqRelApprox(lambda rel: iter(events), label)


def identity() -> EqRelApprox:
    return EqRelApprox(lambda rel: iter(()), "identity")


def explicit_pairs(pairs: Iterable[Pair], stages: Optional[Iterable[int]] = None) -> EqRelApprox:
    """Pairs emitted at stages 1, 2, ... or at the given distinct stages."""
    pairs = [tuple(p) for p in pairs]
    if stages is None:
        return from_events(pairs, "explicit")
    stages = list(stages)
    if len(stages) != len(pairs):
        raise ValueError("one stage per pair required")
    if len(set(stages)) != len(stages) or min(stages, default=1) < 1:
        raise ValueError("stages must be distinct and >= 1")
    slots: list[Optional[Pair]] = [None] * max(stages, default=0)
    for s, p in zip(stages, pairs):
        slots[s - 1] = p
    return from_events(slots, "explicit")


_PREDICATES: dict[str, Callable[[int], bool]] = {
    "even": lambda x: x % 2 == 0,
    "odd": lambda x: x % 2 == 1,
}


def _predicate(name: str) -> Callable[[int], bool]:
    if name in _PREDICATES:
        return _PREDICATES[name]
    if name.startswith("mod:"):
        _, k, r = name.split(":")
        k, r = int(k), int(r)
        if k < 2:
            raise ValueError("mod predicate needs modulus >= 2 (co-infinite)")
        return lambda x: x % k == r
    raise ValueError(f"unknown predicate {name!r}")


def from_recursive_set(member: Callable[[int], bool] | Iterable[int],
                       window: Optional[int] = None,
                       label: str = "recursive-set") -> EqRelApprox:
    """``x ~ y`` iff ``x = y`` or both lie in the recursive set A.

    ``member`` is a predicate, or a finite collection listing A.  Pairs
    ``(x, y)`` with ``x < y`` both in A are emitted in Cantor order.
    """
    if callable(member):
        pred = member
        finite = None
    else:
        finite = frozenset(member)
        pred = finite.__contains__
    if window is not None and all(pred(x) for x in range(window + 1)):
        raise ValueError("A covers the whole declared window; need infinitely many classes")

    if finite is not None:
        ordered = sorted(finite)
        pairs = [(x, y) for x in ordered for y in ordered if x < y]
        from .coding import pair as code
        pairs.sort(key=lambda p: code(*p))
        return from_events(pairs, label)

    def source(rel):
        for x, y in cantor_pairs():
            if x < y and pred(x) and pred(y):
                yield (x, y)

    return EqRelApprox(source, label)


def symmetric_difference(r, label: str = "symmetric-difference") -> EqRelApprox:
    """``x ~ y`` iff ``D_x`` and ``D_y`` differ only inside R.

    ``r`` is a SetApprox.  Single-bit flips generate the relation: the
    pair ``(y - 2^i, y)`` for ``i`` in R and bit ``i`` set in ``y``.  At
    stage ``s`` the least pending such pair with ``y <= s`` and ``i`` in
    ``R_s`` is emitted.
    """

    def source(rel):
        pending: list[tuple[int, int]] = []
        known: set[int] = set()
        s = 0
        while True:
            s += 1
            fresh = sorted(set(r.enum_upto(s)) - known)
            for i in fresh:
                for y in range(1 << i, s):
                    if y >> i & 1:
                        heapq.heappush(pending, (y, i))
            known.update(fresh)
            for i in known:
                if s >> i & 1:
                    heapq.heappush(pending, (s, i))
            if pending:
                y, i = heapq.heappop(pending)
                yield (y ^ (1 << i), y)
            else:
                yield None

    return EqRelApprox(source, label)


def make_relation(cfg: Mapping) -> EqRelApprox:
    """Build a relation from a declarative cfg (scenario-file dict).

    Kinds: ``identity``; ``recursive_set`` with ``predicate`` or
    ``members`` (+ optional ``window``); ``symmetric_difference`` with
    ``R`` (a list of elements); ``explicit_pairs`` with ``pairs`` and
    optional ``stages``; ``interval`` with ``Z`` (list) or ``dominate``;
    ``triple_merge`` with ``wtable``.
    """
    kind = cfg.get("kind")
    if kind == "identity":
        return identity()
    if kind == "recursive_set":
        if "predicate" in cfg:
            return from_recursive_set(_predicate(cfg["predicate"]), cfg.get("window"))
        if "members" in cfg:
            return from_recursive_set(cfg["members"], cfg.get("window"))
        raise ValueError("recursive_set needs 'predicate' or 'members'")
    if kind == "symmetric_difference":
        from .numbering import finite_approx
        return symmetric_difference(finite_approx(cfg.get("R", [])))
    if kind == "explicit_pairs":
        return explicit_pairs(cfg["pairs"], cfg.get("stages"))
    if kind == "interval":
        from .constructions import build_interval_relation, dense_simple_standin
        from .numbering import from_events as set_events
        if "Z" in cfg:
            return build_interval_relation(set_events(enumerate(cfg["Z"], start=1)))
        dom = cfg.get("dominate", {})
        return build_interval_relation(dense_simple_standin(
            [_function_table(f, dom.get("window", 8)) for f in dom.get("functions", [])],
            dom.get("window", 8)))
    if kind == "triple_merge":
        from .constructions import WTable, build_triple_merge
        return build_triple_merge(WTable.from_json(cfg.get("wtable", {})))
    raise ValueError(f"unknown relation kind {kind!r}")


def _function_table(desc, window: int) -> list[int]:
    """Function tables for domination stand-ins: a list, or ``"k*n"``/``"n^2"``/``"n+k"``."""
    if isinstance(desc, list):
        return [int(v) for v in desc]
    desc = str(desc).replace(" ", "")
    if desc == "n^2":
        return [n * n for n in range(window + 1)]
    if desc.endswith("*n"):
        k = int(desc[:-2])
        return [k * n for n in range(window + 1)]
    if desc.startswith("n+"):
        k = int(desc[2:])
        return [n + k for n in range(window + 1)]
    raise ValueError(f"unknown function description {desc!r}")
