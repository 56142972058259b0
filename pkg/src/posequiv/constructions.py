"""Concrete relations and families built on top of the stage engine.

Relations: the staged triple-merge relation driven by a W-table, and the
interval relation induced by a co-infinite enumerable set.  Families: the
separating families used by the learners module, each realised with the
guard-and-overwrite discipline whenever membership depends on parameters
that are only known in the limit.
"""

from __future__ import annotations

import json
from typing import Callable, Iterable, Mapping, Optional, Sequence

from .coding import pair, unpair
from .eqrel import EqRelApprox
from .numbering import (
    Numbering,
    SetApprox,
    ascending_set,
    closure_set,
    closed_finite_sets,
    finite_approx,
    from_events,
    guard_overwrite,
    naturals,
)
from .verdict import BOUND, QUIET, STAGE_BUDGET, Verdict


# -- W-tables ---------------------------------------------------------------

class WTable:
    """Finite stand-in for the standard enumeration of r.e. sets.

    ``events[n]`` lists ``(stage, element)`` pairs; ``W_{n,s}`` holds the
    elements whose stage is at most ``s``.  Indices absent from the table
    are empty.
    """

    def __init__(self, events: Mapping[int, Iterable[tuple[int, int]]] | None = None):
        self.events: dict[int, tuple[tuple[int, int], ...]] = {}
        for n, evs in (events or {}).items():
            n = int(n)
            if n < 0:
                raise ValueError("W-table indices must be natural numbers")
            cleaned = []
            for ev in evs:
                if len(ev) != 2:
                    raise ValueError(f"W-table entry {n}: events are (stage, element) pairs")
                s, x = int(ev[0]), int(ev[1])
                if s < 0 or x < 0:
                    raise ValueError(f"W-table entry {n}: negative stage or element")
                cleaned.append((s, x))
            self.events[n] = tuple(sorted(cleaned))
        self._sets: dict[int, SetApprox] = {}

    @classmethod
    def from_json(cls, data) -> "WTable":
        """Accept a mapping ``index -> [[stage, element], ...]`` (or a JSON string)."""
        if isinstance(data, str):
            data = json.loads(data)
        if not isinstance(data, Mapping):
            raise ValueError("W-table must be an object mapping index to events")
        try:
            return cls({int(k): v for k, v in data.items()})
        except (TypeError, ValueError) as exc:
            raise ValueError(f"malformed W-table: {exc}") from None

    @classmethod
    def settled(cls, sets: Mapping[int, Iterable[int]], stage: int = 0) -> "WTable":
        """Every listed element appears at ``stage``."""
        return cls({n: [(stage, x) for x in xs] for n, xs in sets.items()})

    def to_json(self) -> dict[str, list[list[int]]]:
        return {str(n): [list(ev) for ev in evs] for n, evs in sorted(self.events.items())}

    @property
    def indices(self) -> list[int]:
        return sorted(self.events)

    @property
    def settle_stage(self) -> int:
        return max((s for evs in self.events.values() for s, _ in evs), default=0)

    def at(self, n: int, s: int) -> frozenset[int]:
        return frozenset(x for st, x in self.events.get(n, ()) if st <= s)

    def final(self, n: int) -> frozenset[int]:
        return frozenset(x for _, x in self.events.get(n, ()))

    def set(self, n: int) -> SetApprox:
        got = self._sets.get(n)
        if got is None:
            got = from_events(self.events.get(n, ()), f"W_{n}")
            self._sets[n] = got
        return got


# -- the staged triple-merge relation ---------------------------------------

def build_triple_merge(w: WTable) -> EqRelApprox:
    """Triple-merge relation driven by ``w``.

    At construction stage s the relation of stage s is inspected; among
    triples ``n, k, l < s`` with ``n < l``, ``k < l``, the class of
    ``a_k`` missing ``W_{n,s}`` and the class of ``a_l`` meeting it, the
    one with least l (then least n, then least k) is chosen and the two
    classes are merged.  The merge becomes visible at stage s + 1.
    """
    indices = w.indices

    def source(rel: EqRelApprox):
        s = 0
        while True:
            best = None
            for n in indices:
                if n >= s:
                    break
                hit = sorted({rel.rep_index(x, s) for x in w.at(n, s)})
                if not hit:
                    continue
                hit_set = set(hit)
                k = 0
                while k in hit_set:
                    k += 1
                for ell in hit:
                    if ell > n and ell > k and ell < s:
                        cand = (ell, n, k)
                        if best is None or cand < best:
                            best = cand
                        break
            if best is None:
                yield None
            else:
                ell, _, k = best
                yield (rel.rep_at(k, s), rel.rep_at(ell, s))
            s += 1

    return EqRelApprox(source, "triple-merge")


def _closed_upto(rel: EqRelApprox, members: frozenset[int], stage: int, bound: int) -> bool:
    return all(rel.closure_upto(x, stage, bound) <= members for x in members if x <= bound)


def classify_closed_entries(merge_rel: EqRelApprox, w: WTable, bound: int = BOUND,
                 budget: int = STAGE_BUDGET, quiet: int = QUIET) -> dict[int, Verdict]:
    """Classify every closed W-table entry against the three possible shapes.

    For each index n whose final set is closed on ``[0, bound]`` at
    ``budget``: branch 1 is ``W_n ⊆ A_n``, branch 2 is ``W_n = A_m`` for
    some ``m >= n``, branch 3 is ``W_n ⊇ [0, bound]``.  Violated if none
    applies.  Entries that are not closed, or whose window is not yet
    stable, are Inconclusive.
    """
    out: dict[int, Verdict] = {}
    window_reps = merge_rel.rep_index(bound, budget) + 2
    stable = merge_rel.partition_upto(budget, bound) == merge_rel.partition_upto(max(0, budget - quiet), bound)
    for n in w.indices:
        members = frozenset(x for x in w.at(n, budget) if x <= bound)
        if w.settle_stage > budget - quiet or not stable:
            out[n] = Verdict.inconclusive("not-settled", index=n)
            continue
        if not _closed_upto(merge_rel, members, budget, bound):
            out[n] = Verdict.inconclusive("not-closed", index=n)
            continue

        def asc(m):
            return frozenset(x for x in merge_rel.closure(merge_rel.reps(budget, m), budget) if x <= bound)

        if members <= asc(n):
            out[n] = Verdict.holds(index=n, branch=1)
            continue
        if members >= frozenset(range(bound + 1)):
            # a window-covering set also matches A_m for large m; report the cover
            out[n] = Verdict.holds(index=n, branch=3)
            continue
        found = next((m for m in range(n, window_reps + 1) if asc(m) == members), None)
        if found is not None:
            out[n] = Verdict.holds(index=n, branch=2, m=found)
        else:
            out[n] = Verdict.violated(index=n, members=members, bound=bound, stage=budget)
    return out


# -- the interval relation ----------------------------------------------------

def _new_per_stage(z: SetApprox, stage: int) -> list[int]:
    return sorted(z.enum_upto(stage) - z.enum_upto(stage - 1))


def build_interval_relation(z: SetApprox, check_upto: int = STAGE_BUDGET) -> EqRelApprox:
    """Relation whose classes are the intervals between non-elements of Z.

    Each element z entering Z emits the pair ``(z-1, z)``; when several
    elements appear at the same stage they are queued one per stage.
    """
    for s in range(check_upto + 1):
        if 0 in z.enum_upto(s):
            raise ValueError("Z must never enumerate 0")

    def source(rel: EqRelApprox):
        queue: list[int] = []
        s = 0
        while True:
            s += 1
            fresh = _new_per_stage(z, s)
            if 0 in fresh:
                raise ValueError("Z must never enumerate 0")
            queue.extend(fresh)
            if queue:
                x = queue.pop(0)
                yield (x - 1, x)
            else:
                yield None

    rel = EqRelApprox(source, "interval")
    rel.z = z  # type: ignore[attr-defined]
    return rel


def interval_member(rel: EqRelApprox, n: int) -> SetApprox:
    """``B_n = [n] ∪ [a_n] ∪ {n, ..., a_n}``."""

    def fn(t):
        a = rel.rep_at(n, t)
        return rel.closure((n, a), t) | frozenset(range(n, a + 1))

    return SetApprox(fn, f"B_{n}")


def interval_family(z_or_rel) -> Numbering:
    rel = z_or_rel if isinstance(z_or_rel, EqRelApprox) else build_interval_relation(z_or_rel)
    return Numbering(lambda n: interval_member(rel, n), "interval-family", rel)


class DominationStandin(SetApprox):
    """Finite co-infinite Z whose non-elements outgrow listed functions on a window."""

    def __init__(self, tables: Sequence[Sequence[int]], window: int):
        self.tables = [list(t) for t in tables]
        self.window = window
        for t in self.tables:
            if len(t) <= window:
                raise ValueError("each function table must be total on [0, window]")
        order = self._simulate()
        self.order = order
        events = [(i + 1, x) for i, x in enumerate(order)]
        super().__init__(lambda s: [x for st, x in events if st <= s], "domination-standin")

    def _simulate(self) -> list[int]:
        z: set[int] = set()
        order: list[int] = []

        def nonelements(count):
            out, x = [], 0
            while len(out) < count:
                if x not in z:
                    out.append(x)
                x += 1
            return out

        while True:
            a = nonelements(self.window + 1)
            moved = False
            for n in range(1, self.window + 1):
                target = max((t[n] for t in self.tables), default=-1)
                if a[n] <= target:
                    z.add(a[n])
                    order.append(a[n])
                    moved = True
                    break
            if not moved:
                return order


def dense_simple_standin(fns: Sequence[Sequence[int]], window: int) -> DominationStandin:
    """Markers ``a_1 .. a_window`` pushed above every supplied table, one element per stage."""
    return DominationStandin(fns, window)


# -- chains inside an infinite r.e. set ----------------------------------------

class ChainReps:
    """``b_{n,s}``: the n-th listed element of B not equivalent to an earlier listed one."""

    def __init__(self, b: SetApprox, rel: EqRelApprox):
        self.b = b
        self.rel = rel
        self._memo: dict[int, list[int]] = {}

    def listed(self, s: int) -> list[int]:
        got = self._memo.get(s)
        if got is None:
            got = []
            seen: set[int] = set()
            for x in self.b.enumeration_order(s):
                m = self.rel.class_min(x, s)
                if m not in seen:
                    seen.add(m)
                    got.append(x)
            self._memo[s] = got
        return got

    def b_at(self, n: int, s: int) -> Optional[int]:
        """None while fewer than n + 1 distinct classes of B are visible."""
        listed = self.listed(s)
        return listed[n] if n < len(listed) else None

    def chain_set(self, n: int) -> SetApprox:
        """``{x : exists m < n, s with x related at s to b_{m,s}}``."""

        def fn(u):
            reps = [b for b in (self.b_at(m, u) for m in range(n)) if b is not None]
            return self.rel.closure(reps, u)

        return SetApprox(fn, f"chain_{n}", cumulative=True)


# -- family variants ------------------------------------------------------------

def _ascending_cover_of(rel: EqRelApprox, elements: frozenset[int]) -> SetApprox:
    """``A_{max(D)+1}`` with the convention ``max(∅) = 1``."""
    return ascending_set(rel, (max(elements) if elements else 1) + 1)


def recursive_set_singletons(rel: EqRelApprox, member: Callable[[int], bool]) -> Numbering:
    """``F_0 = A`` and ``F_{i+1} = {x_i}`` for the i-th non-member of A."""

    def outside(i):
        x, seen = 0, -1
        while True:
            if not member(x):
                seen += 1
                if seen == i:
                    return x
            x += 1

    def decode(i):
        if i == 0:
            return SetApprox(lambda t: [x for x in range(t + 1) if member(x)], "A")
        x = outside(i - 1)
        return finite_approx((x,), f"{{{x}}}")

    return Numbering(decode, "set-and-singletons", rel)


def odd_ascending_and_classes(rel: EqRelApprox) -> Numbering:
    """``L_{2n} = A_{2n+1}``, ``L_{2<n,s>+1} = [a_{n,s}]``."""

    def decode(i):
        if i % 2 == 0:
            return ascending_set(rel, i + 1)
        n, s = unpair((i - 1) // 2)
        a = rel.rep_at(n, s)
        return SetApprox(lambda t: rel.closure((a,), t), f"[a_{n},{s}]")

    return Numbering(decode, "odd-ascending+classes", rel)


def even_ascending_and_class_pairs(rel: EqRelApprox) -> Numbering:
    """``H_{2n} = A_{2n+2}``; ``H_{2<m,n,s>+1} = [a_{m,s}, a_{m+n+1,s}]`` while both stay put.

    On a move the set becomes the least ``A_{2k+2}`` covering what was enumerated.
    """

    def decode(i):
        if i % 2 == 0:
            return ascending_set(rel, i + 2)
        m, rest = unpair((i - 1) // 2)
        n, s = unpair(rest)
        lo, hi = rel.rep_at(m, s), rel.rep_at(m + n + 1, s)
        source = SetApprox(lambda t: rel.closure((lo, hi), t), f"[a_{m},a_{m + n + 1}]")

        def valid(u):
            return rel.rep_at(m, u) == lo and rel.rep_at(m + n + 1, u) == hi

        def overwrite(copied, stage):
            top = max((rel.rep_index(x, stage) for x in copied), default=0)
            return ascending_set(rel, 2 * max(0, top // 2) + 2)

        return guard_overwrite(source, s, valid, overwrite, f"H[{i}]")

    return Numbering(decode, "even-ascending+pairs", rel)


def shifted_ascending(rel: EqRelApprox, k: int) -> Numbering:
    """``L_n = A_{n+k+1}``."""
    return Numbering(lambda n: ascending_set(rel, n + k + 1), f"ascending+{k + 1}", rel)


def chain_and_naturals(rel: EqRelApprox, b: SetApprox) -> Numbering:
    """Index 0 is N; index n + 1 is the n-th chain set inside B."""
    chain = ChainReps(b, rel)

    def decode(i):
        return naturals() if i == 0 else chain.chain_set(i - 1)

    num = Numbering(decode, "chain+N", rel)
    num.chain = chain  # type: ignore[attr-defined]
    return num


def replace_with_naturals(base: Numbering, index: int = 2) -> Numbering:
    """Same as ``base`` except that ``index`` decodes to N."""
    return Numbering(lambda i: naturals() if i == index else base.decode(i),
                     f"{base.label} with N at {index}", base.relation)


def ascending_and_pair_classes(rel: EqRelApprox) -> Numbering:
    """``2n -> A_{n+1}``; ``2<n,s>+1 -> [a_{1,s}, a_{n+2,s}]`` guarded, else ``A_{max+1}``."""

    def decode(i):
        if i % 2 == 0:
            return ascending_set(rel, i // 2 + 1)
        n, s = unpair((i - 1) // 2)
        lo, hi = rel.rep_at(1, s), rel.rep_at(n + 2, s)
        source = SetApprox(lambda t: rel.closure((lo, hi), t), f"[a_1,a_{n + 2}]")

        def valid(u):
            return rel.rep_at(1, u) == lo and rel.rep_at(n + 2, u) == hi

        return guard_overwrite(source, s, valid, lambda d, _s: _ascending_cover_of(rel, d), f"P[{i}]")

    return Numbering(decode, "ascending+pair-classes", rel)


def finiteness_guarded_ascending(rel: EqRelApprox, w: WTable) -> Numbering:
    """``<n,0> -> A_{2n}``; ``<n,m+1> -> A_{2n+1}`` while ``|W_{n,s}| <= m``, else ``A_{2n+2}``."""

    def decode(i):
        n, j = unpair(i)
        if j == 0:
            return ascending_set(rel, 2 * n)
        m = j - 1
        return guard_overwrite(ascending_set(rel, 2 * n + 1), 0,
                               lambda s: len(w.at(n, s)) <= m,
                               lambda d, _s: ascending_set(rel, 2 * n + 2), f"G[{n},{m}]")

    return Numbering(decode, "finiteness-guarded", rel)


def infinite_and_shifted_ascending(rel: EqRelApprox, b0: SetApprox, k: int) -> Numbering:
    """Index 0 is the infinite set ``b0`` (missing ``a_k``); index n + 1 is ``A_{n+k+1}``."""

    def decode(i):
        return b0 if i == 0 else ascending_set(rel, i + k)

    num = Numbering(decode, f"B0+ascending+{k}", rel)
    num.k = k  # type: ignore[attr-defined]
    return num


def characteristic_closures(rel: EqRelApprox, samples: Callable[[int], frozenset[int]]) -> Numbering:
    """``i -> [F_i]`` for a uniformly generable list of finite samples."""
    return Numbering(lambda i: closure_set(rel, samples(i), f"[F_{i}]"), "sample-closures", rel)


# -- cosingleton family built from an explanatory learner ----------------------

class CosingletonFamily(Numbering):
    """``3i -> A_i``, ``3i+1 -> F``-guesses, ``3i+2 -> B_{n,m}`` guesses.

    ``F_n`` consists of the x for which some short extension of the
    current stabilising guess for ``[a_n]`` (followed by x) makes the
    learner change its mind; every search is bounded by ``seq_len`` and
    ``probe_len``.  ``B_{n,m}`` is ``[a_k : k < m, k != n]`` for
    ``n < m <= |W_n|``.  Invalidated parameters overwrite with
    ``A_{max(D)+1}``.
    """

    def __init__(self, rel: EqRelApprox, w: WTable, learner, seq_len: int = 2,
                 probe_len: int = 2, class_cap: int = 6):
        super().__init__(self._decode_member, "cosingleton", rel)
        self.rel = rel
        self.w = w
        self.learner = learner
        self.seq_len = seq_len
        self.probe_len = probe_len
        self.class_cap = class_cap
        self._guess_memo: dict = {}

    def alphabet(self, x: int, s: int) -> list:
        cls = sorted(self.rel.class_of(x, s))[: self.class_cap]
        return cls + ["#"]

    def guess(self, n: int, t: int) -> tuple[int, tuple]:
        """``e_{n,t}`` as the pair ``(a_{n,t}, tau)``."""
        a = self.rel.rep_at(n, t)
        alpha = tuple(self.alphabet(a, t))
        depth = min(t, self.probe_len)
        key = (alpha, depth)
        tau = self._guess_memo.get(key)
        if tau is None:
            from .criteria import first_stabilising
            tau = first_stabilising(self.learner, alpha, self.seq_len, depth)
            self._guess_memo[key] = tau
        return a, tau

    def cosingleton_guess(self, a: int, tau: tuple) -> SetApprox:
        from .criteria import changes_after
        base = self.learner(tau)

        def fn(u):
            out = []
            for x in range(u + 1):
                if self.rel.related_at(x, a, u):
                    continue
                alpha = sorted(set(self.alphabet(a, u)[:-1]) | set(self.alphabet(x, u)[:-1]))
                if changes_after(self.learner, tau + (x,), alpha + ["#"], self.probe_len, base):
                    out.append(x)
            return out

        return SetApprox(fn, f"F[{a}]", cumulative=True)

    def _decode_member(self, i: int) -> SetApprox:
        part, q = i % 3, i // 3
        rel = self.rel
        if part == 0:
            return ascending_set(rel, q)
        if part == 1:
            n, t = unpair(q)
            e = self.guess(n, t)
            return guard_overwrite(self.cosingleton_guess(*e), t,
                                   lambda s: self.guess(n, s) == e,
                                   lambda d, _s: _ascending_cover_of(rel, d), f"F[{n},{t}]")
        n, rest = unpair(q)
        m, t = unpair(rest)
        reps_t = rel.reps(t, m + 1)
        w_t = self.w.at(n, t)
        keep = [reps_t[k] for k in range(m) if k != n]
        source = SetApprox(lambda u: rel.closure(keep, u), f"B[{n},{m}]")

        def valid(s):
            if not (n < m <= len(w_t)):
                return False
            return rel.reps(s, m + 1) == reps_t and self.w.at(n, s) == w_t

        return guard_overwrite(source, t, valid, lambda d, _s: _ascending_cover_of(rel, d), f"B[{n},{m},{t}]")

    def index_of_ascending(self, n: int) -> int:
        return 3 * n

    def index_of_cosingleton(self, n: int, t: int) -> int:
        return 3 * pair(n, t) + 1

    def index_of_gap(self, n: int, m: int, t: int) -> int:
        return 3 * pair(n, pair(m, t)) + 2


def cosingleton_family(rel: EqRelApprox, w: WTable, learner, **bounds) -> CosingletonFamily:
    return CosingletonFamily(rel, w, learner, **bounds)


# -- declarative dispatch --------------------------------------------------------

FAMILY_KINDS = (
    "ascending", "closed_finite_sets", "set_and_singletons", "odd_ascending_and_classes",
    "even_ascending_and_class_pairs", "shifted_ascending", "chain_and_naturals",
    "replace_with_naturals", "ascending_and_pair_classes", "finiteness_guarded_ascending",
    "infinite_and_shifted_ascending", "interval_family", "cosingleton",
)


def make_set(cfg, rel: Optional[EqRelApprox] = None) -> SetApprox:
    """A SetApprox from a scenario value: a list, a predicate name, or a tagged object."""
    if isinstance(cfg, list):
        return finite_approx(cfg)
    if isinstance(cfg, str):
        from .eqrel import _predicate
        pred = _predicate(cfg)
        return SetApprox(lambda t: [x for x in range(t + 1) if pred(x)], cfg)
    if isinstance(cfg, Mapping):
        kind = cfg.get("kind")
        if kind == "finite":
            return finite_approx(cfg.get("elements", []))
        if kind == "predicate":
            return make_set(cfg["predicate"], rel)
        if kind == "closure":
            if rel is None:
                raise ValueError("closure sets need a relation")
            return closure_set(rel, cfg.get("elements", []))
        if kind == "naturals":
            return naturals()
        if kind == "ascending":
            if rel is None:
                raise ValueError("ascending sets need a relation")
            return ascending_set(rel, int(cfg["n"]))
    raise ValueError(f"cannot build a set from {cfg!r}")


def build_family(cfg: Mapping, rel: EqRelApprox, w: Optional[WTable] = None,
                 learner=None, base: Optional[Numbering] = None) -> Numbering:
    """Build one of the named families over ``rel``."""
    from .numbering import ascending_family
    kind = cfg.get("kind")

    def need(key):
        if key not in cfg:
            raise ValueError(f"family {kind!r} needs parameter {key!r}")
        return cfg[key]

    if kind == "ascending":
        return ascending_family(rel)
    if kind == "closed_finite_sets":
        return closed_finite_sets(rel)
    if kind == "set_and_singletons":
        from .eqrel import _predicate
        return recursive_set_singletons(rel, _predicate(need("predicate")))
    if kind == "odd_ascending_and_classes":
        return odd_ascending_and_classes(rel)
    if kind == "even_ascending_and_class_pairs":
        return even_ascending_and_class_pairs(rel)
    if kind == "shifted_ascending":
        return shifted_ascending(rel, int(need("k")))
    if kind == "chain_and_naturals":
        return chain_and_naturals(rel, make_set(need("B"), rel))
    if kind == "replace_with_naturals":
        if base is None:
            if "base" not in cfg:
                raise ValueError("family 'replace_with_naturals' needs parameter 'base'")
            base = build_family(cfg["base"], rel, w, learner)
        return replace_with_naturals(base, int(cfg.get("index", 2)))
    if kind == "ascending_and_pair_classes":
        return ascending_and_pair_classes(rel)
    if kind == "finiteness_guarded_ascending":
        if w is None:
            raise ValueError("family 'finiteness_guarded_ascending' needs a W-table")
        return finiteness_guarded_ascending(rel, w)
    if kind == "infinite_and_shifted_ascending":
        return infinite_and_shifted_ascending(rel, make_set(need("B0"), rel), int(need("k")))
    if kind == "interval_family":
        return interval_family(rel)
    if kind == "cosingleton":
        if w is None or learner is None:
            raise ValueError("family 'cosingleton' needs a W-table and a learner")
        return cosingleton_family(rel, w, learner)
    raise ValueError(f"unknown family kind {kind!r}")
