"""Learners: total maps from finite sequences to hypotheses.

A hypothesis is an index into the learner's declared space (a Numbering)
or ``None`` for the abstention mark ``?``.  Learners whose decision
depends on their previous conjecture fold over the prefix; the fold is
memoised, so evaluating every prefix of a text costs one step each.
"""

from __future__ import annotations

from collections import OrderedDict
from dataclasses import dataclass
from typing import Callable, Mapping, Optional, Sequence

from .coding import finite_set, finite_set_code, pair
from .constructions import (
    ChainReps,
    CosingletonFamily,
    WTable,
    ascending_and_pair_classes,
    chain_and_naturals,
    characteristic_closures,
    infinite_and_shifted_ascending,
    odd_ascending_and_classes,
    recursive_set_singletons,
    replace_with_naturals,
    interval_family,
)
from .eqrel import EqRelApprox
from .numbering import (
    Numbering,
    SetApprox,
    TaggedSpace,
    ascending_family,
    ascending_set,
    canonical_finite_sets,
    closure_set,
    guard_overwrite,
)
from .text import PAUSE, FiniteSequence, canonical_text, content
from .verdict import STAGE_BUDGET, Verdict

Hypothesis = Optional[int]


@dataclass(frozen=True)
class Conjecture:
    hypothesis: Hypothesis
    budget_events: int = 0


class Learner:
    """``step(data)`` gives a Conjecture; calling the learner gives just the hypothesis."""

    def __init__(self, fn: Callable[[tuple], Conjecture | Hypothesis], space: Numbering,
                 name: str = "learner", class_preserving: bool = False):
        self._fn = fn
        self.space = space
        self.name = name
        self.class_preserving = class_preserving

    def __repr__(self):
        return f"Learner({self.name!r})"

    def step(self, data) -> Conjecture:
        out = self._fn(tuple(data))
        return out if isinstance(out, Conjecture) else Conjecture(out)

    def __call__(self, data) -> Hypothesis:
        return self.step(data).hypothesis


class FoldLearner(Learner):
    """Learner whose step sees its own conjecture on the prefix one shorter."""

    def __init__(self, fn: Callable[[tuple, Optional[Conjecture]], Conjecture], space: Numbering,
                 name: str = "learner", class_preserving: bool = False, memo_size: int = 200_000):
        super().__init__(self._fold, space, name, class_preserving)
        self._step_fn = fn
        self._memo: OrderedDict[tuple, Conjecture] = OrderedDict()
        self._memo_size = memo_size

    def _fold(self, data: tuple) -> Conjecture:
        k = len(data)
        while k > 0 and data[:k] not in self._memo:
            k -= 1
        prior = self._memo.get(data[:k]) if k > 0 else None
        if k == 0:
            prior = self._remember((), self._step_fn((), None))
        for j in range(k + 1, len(data) + 1):
            prior = self._remember(data[:j], self._step_fn(data[:j], prior))
        return prior

    def _remember(self, key: tuple, value: Conjecture) -> Conjecture:
        self._memo[key] = value
        if len(self._memo) > self._memo_size:
            self._memo.popitem(last=False)
        return value


def constant_learner(space: Numbering, index: Hypothesis = 0) -> Learner:
    return Learner(lambda data: index, space, f"constant({index})")


# -- helpers ---------------------------------------------------------------------

def least_absent_rep(rel: EqRelApprox, cnt: frozenset[int], t: int, start: int = 0) -> int:
    """Least ``n >= start`` with ``a_{n,t}`` not in ``cnt``."""
    reps = rel.reps(t, start + len(cnt) + 1)
    n = start
    while reps[n] in cnt:
        n += 1
    return n


def _stable_since(rel: EqRelApprox, indices: Sequence[int], t: int) -> int:
    """Earliest stage from which ``a_m`` (m in indices) kept its stage-t value."""
    return max((rel.last_change(m, t) for m in indices), default=0)


def closure_space(rel: EqRelApprox, label: str = "closures") -> TaggedSpace:
    """Tags ``asc(n) -> A_n`` and ``closure(code) -> [D_code]``."""
    space = TaggedSpace(label, rel)
    space.register("asc", lambda n: ascending_set(rel, n))
    space.register("closure", lambda code: closure_set(rel, finite_set(code), f"[D_{code}]"))
    return space


# -- ascending family ---------------------------------------------------------------

def frozen_ascending(rel: EqRelApprox, n: int, t: int) -> SetApprox:
    """Classes of ``a_{0,t} .. a_{n-1,t}``, enumerated only until some ``a_m`` (m <= n) moves."""
    reps_t = tuple(rel.reps(t, n + 1))
    source = SetApprox(lambda u: rel.closure(reps_t[:n], u), f"A_{n}@{t}")
    return guard_overwrite(source, t, lambda s: tuple(rel.reps(s, n + 1)) == reps_t,
                           lambda d, _s: SetApprox(lambda u: (), "stop"), f"frozen A_{n}@{t}")


def ascending_ex_learner(rel: EqRelApprox, conservative: bool = False) -> Learner:
    """Conjecture ``A_{n_t}`` for the least n with ``a_{n,t}`` absent from the content.

    The conservative variant conjectures frozen sets and keeps its prior
    conjecture while the content still lies inside it at the current stage.
    """
    space = closure_space(rel, "ascending-hypotheses")
    space.register("frozen", lambda n, t: frozen_ascending(rel, n, t))

    if not conservative:
        def plain(data):
            t = len(data)
            return space.index("asc", least_absent_rep(rel, content(data), t))

        return Learner(plain, space, "ascending-ex")

    def careful(data, prior):
        t = len(data)
        cnt = content(data)
        if prior is not None and cnt <= space.decode(prior.hypothesis).enum_upto(t):
            return prior
        return Conjecture(space.index("frozen", least_absent_rep(rel, cnt, t), t))

    return FoldLearner(careful, space, "ascending-conservative")


def closure_bc_learner(rel: EqRelApprox) -> Learner:
    """Conjecture the closure of the content seen so far."""
    space = closure_space(rel, "closure-hypotheses")
    return Learner(lambda data: space.index("closure", finite_set_code(content(data))),
                   space, "closure-bc")


def interval_confident_learner(z_or_rel) -> Learner:
    """Least n whose stage-|σ| interval set covers the content; fallback ``B_0``."""
    family = interval_family(z_or_rel)
    rel = family.relation

    def fn(data):
        t = len(data)
        cnt = content(data)
        if not cnt:
            return 0
        low = min(cnt)
        j = rel.rep_index(low, t)
        ceiling = rel.rep_at(j + 1, t)
        for n in range(ceiling):
            if cnt <= family.decode(n).enum_upto(t):
                return n
        return 0

    return Learner(fn, family, "interval-confident")


# -- strong union ----------------------------------------------------------------------

def strong_union_confident_learner(m1: Learner, m2: Learner, f: Callable[[int], int],
                                   g: Callable[[int], int], merged: Numbering,
                                   budget: int = STAGE_BUDGET) -> Learner:
    """Merge two confident learners through one-one reductions f, g into ``merged``.

    When the mapped conjectures differ, the least x in the symmetric
    difference of the two candidate sets at some stage above |σ| decides.
    If no such stage is found within ``budget`` stages the prior conjecture
    is repeated and a budget event is recorded.
    """

    def fn(data, prior):
        d, e = m1(data), m2(data)
        if d is None and e is None:
            return Conjecture(None)
        if d is None or e is None:
            return Conjecture(f(d) if d is not None else g(e))
        left, right = f(d), g(e)
        if left == right:
            return Conjecture(left)
        cnt = content(data)
        a, b = merged.decode(left), merged.decode(right)
        for s in range(len(data) + 1, len(data) + 1 + budget):
            diff = a.enum_upto(s) ^ b.enum_upto(s)
            if diff:
                x = min(diff)
                in_a = x in a.enum_upto(s)
                if (x in cnt) == in_a:
                    return Conjecture(left)
                return Conjecture(right)
        fallback = prior.hypothesis if prior is not None else left
        return Conjecture(fallback, 1)

    learner = FoldLearner(fn, merged, "strong-union")
    learner.components = (m1, m2, f, g)  # type: ignore[attr-defined]
    return learner


# -- vacillation to explanation --------------------------------------------------------

def subset_index_space(rel: EqRelApprox) -> Numbering:
    """Index ``pair(n, code(D))`` decodes to ``[a_i : i in D, i < n]`` (a subset of ``A_n``)."""
    from .coding import unpair

    def decode(e):
        n, code = unpair(e)
        picks = [i for i in finite_set(code) if i < n]
        return SetApprox(lambda t: rel.closure([rel.rep_at(i, t) for i in picks], t),
                         f"Q[{n},{sorted(picks)}]", cumulative=False)

    return Numbering(decode, "subset-indices", rel)


def scripted_vacillator(rel: EqRelApprox) -> Learner:
    """Alternates between two indices of the span of the representatives seen."""
    space = subset_index_space(rel)

    def fn(data):
        t = len(data)
        cnt = content(data)
        seen = sorted({rel.rep_index(x, t) for x in cnt})
        top = (seen[-1] + 1) if seen else 0
        code = finite_set_code(seen)
        return pair(top + 1 + (t % 2), code)

    learner = Learner(fn, space, "scripted-vacillator")
    learner.order = lambda e: _unpair_first(e)  # type: ignore[attr-defined]
    return learner


def _unpair_first(e: int) -> int:
    from .coding import unpair
    return unpair(e)[0]


def vac_to_ex_converter(m: Learner, rel: EqRelApprox,
                        order: Optional[Callable[[int], int]] = None) -> Learner:
    """Track the largest index order n* output by m; decide between ``A_l`` and a subset of ``A_{n*}``.

    Before m makes any conjecture n* counts as 0.

    ``order`` maps m's hypotheses to the ordering used (defaults to the
    learner's own ``order`` attribute, else the identity).
    """
    order = order or getattr(m, "order", None) or (lambda e: e)
    space = closure_space(rel, "converter-hypotheses")

    def fn(data, prior):
        t = len(data)
        h = m(data)
        best = prior.star if prior is not None else None  # type: ignore[attr-defined]
        if h is not None:
            best = order(h) if best is None else max(best, order(h))
        cnt = content(data)
        star = best if best is not None else 0
        if rel.rep_at(star, t) in cnt:
            out = _StarConjecture(space.index("asc", least_absent_rep(rel, cnt, t)))
        else:
            reps = rel.reps(t, star)
            out = _StarConjecture(space.index("closure", finite_set_code(r for r in reps if r in cnt)))
        object.__setattr__(out, "star", best)
        return out

    return FoldLearner(fn, space, "vac-to-ex")


@dataclass(frozen=True)
class _StarConjecture(Conjecture):
    star: Optional[int] = None


# -- finite learners and samples -----------------------------------------------------------

def extract_characteristic_sample(fin: Learner, target: SetApprox,
                                  budget: int = STAGE_BUDGET) -> Verdict:
    """Content seen by ``fin`` on the canonical text of ``target`` at its first commitment."""
    text = canonical_text(target)
    for length in range(budget + 1):
        prefix = text.prefix(length)
        if fin(prefix) is not None:
            return Verdict.holds(sample=prefix.content, position=length)
    return Verdict.inconclusive("learner never committed within budget", budget=budget)


def first_datum_finite(rel: EqRelApprox, member: Callable[[int], bool]) -> Learner:
    """Abstain until the first number x; then the set if x is in it, else ``{x}``."""
    family = recursive_set_singletons(rel, member)

    def fn(data):
        for d in data:
            if d != PAUSE:
                if member(d):
                    return 0
                return 1 + sum(1 for y in range(d) if not member(y))
        return None

    return Learner(fn, family, "first-datum-finite", class_preserving=True)


def sample_finite(rel: EqRelApprox, samples: Callable[[int], frozenset[int]]) -> Learner:
    """Abstain until some ``F_i`` with ``i <= |σ|`` lies in the content; conjecture the least."""
    family = characteristic_closures(rel, samples)

    def fn(data):
        cnt = content(data)
        for i in range(len(data) + 1):
            if samples(i) <= cnt:
                return i
        return None

    return Learner(fn, family, "sample-finite", class_preserving=True)


def bounded_content_confident(default: int = 0) -> Learner:
    """Canonical index of the content while it has at most two elements."""
    space = canonical_finite_sets()

    def fn(data):
        cnt = content(data)
        return finite_set_code(cnt) if len(cnt) <= 2 else default

    return Learner(fn, space, "bounded-content-confident")


def finite_then_naturals(fin: Learner, family: Numbering, index: int = 2,
                         budget: int = STAGE_BUDGET) -> Learner:
    """Copy ``fin`` until the samples of members 0 and 1 are both seen, then conjecture N."""
    samples = []
    for j in (0, 1):
        v = extract_characteristic_sample(fin, family.decode(j), budget)
        if not v.is_holds:
            raise ValueError(f"no characteristic sample for member {j} within budget")
        samples.append(v.witness["sample"])
    both = samples[0] | samples[1]
    space = replace_with_naturals(family, index)

    def fn(data):
        if both <= content(data):
            return index
        return fin(data)

    learner = Learner(fn, space, "finite-then-naturals")
    learner.samples = samples  # type: ignore[attr-defined]
    return learner


# -- learners for the separating families ---------------------------------------------------

def odd_ascending_or_class(rel: EqRelApprox) -> Learner:
    """Explanatory learner for odd ascending sets together with single classes."""
    family = odd_ascending_and_classes(rel)

    def fn(data):
        t = len(data)
        cnt = content(data)
        if not cnt:
            return 0
        if rel.rep_at(0, t) in cnt:
            n = 0
            while not (rel.rep_at(2 * n, t) in cnt and rel.rep_at(2 * n + 1, t) not in cnt):
                n += 1
            return 2 * n
        j = rel.rep_index(min(cnt), t)
        return 2 * pair(j, _stable_since(rel, [j], t)) + 1

    return Learner(fn, family, "odd-ascending-or-class", class_preserving=True)


def chain_or_naturals(rel: EqRelApprox, b: SetApprox, k: int) -> Learner:
    """N once ``a_k`` shows up; otherwise the chain set below the least absent ``b_n``."""
    family = chain_and_naturals(rel, b)
    chain: ChainReps = family.chain  # type: ignore[attr-defined]

    def fn(data):
        t = len(data)
        cnt = content(data)
        if rel.rep_at(k, t) in cnt:
            return 0
        n = 0
        while True:
            bn = chain.b_at(n, t)
            if bn is None or bn not in cnt:
                return n + 1
            n += 1

    return Learner(fn, family, "chain-or-naturals", class_preserving=True)


def ascending_or_pair_class(rel: EqRelApprox) -> Learner:
    """``A_{n+1}`` when ``a_0`` is present, else the pair class ``[a_1, a_{n+2}]``."""
    family = ascending_and_pair_classes(rel)

    def fn(data):
        t = len(data)
        cnt = content(data)
        if rel.rep_at(0, t) in cnt:
            n = least_absent_rep(rel, cnt, t, start=1) - 1
            return 2 * n
        limit = len(cnt) + 2
        for n in range(limit):
            if rel.rep_at(n + 2, t) in cnt:
                return 2 * pair(n, _stable_since(rel, [1, n + 2], t)) + 1
        return 0

    return Learner(fn, family, "ascending-or-pair-class", class_preserving=True)


def weak_monotone_shifted(rel: EqRelApprox, b0: SetApprox, k: int) -> Learner:
    """Weakly monotone, class-preserving learner for an infinite set plus shifted ascending sets."""
    family = infinite_and_shifted_ascending(rel, b0, k)
    space = TaggedSpace("weak-monotone-hypotheses", rel)
    space.register("member", lambda i: family.decode(i))

    def guarded(n, t):
        reps_t = rel.reps(t, n + k + 1)
        allowed = set(reps_t)
        source = SetApprox(lambda u: rel.closure(reps_t, u), f"A_{n + k + 1}@{t}")
        return guard_overwrite(source, t,
                               lambda s: all(rel.rep_at(m, s) in allowed for m in range(k + 1)),
                               lambda d, _s: family.decode(1), f"case[{n},{t}]")

    space.register("guarded", guarded)

    def fn(data):
        t = len(data)
        cnt = content(data)
        if rel.rep_at(k, t) not in cnt:
            return space.index("member", 0)
        j = least_absent_rep(rel, cnt, t)
        if j >= k + 1:
            return space.index("guarded", j - k - 1, _stable_since(rel, range(j + 1), t))
        return space.index("member", 1)

    learner = Learner(fn, space, "weak-monotone-shifted", class_preserving=True)
    learner.family = family  # type: ignore[attr-defined]
    return learner


def scripted_bc_for_shifted(rel: EqRelApprox, b0: SetApprox, k: int) -> Learner:
    """A correct behaviourally correct learner for the same family, used as a fixture."""
    family = infinite_and_shifted_ascending(rel, b0, k)

    def fn(data):
        t = len(data)
        cnt = content(data)
        if rel.rep_at(k, t) not in cnt:
            return 0
        j = least_absent_rep(rel, cnt, t)
        return j - k if j >= k + 1 else 1

    return Learner(fn, family, "scripted-bc-shifted", class_preserving=True)


def cosingleton_bc(rel: EqRelApprox, w: WTable, inner: Learner, **bounds) -> Learner:
    """Behaviourally correct learner for the cosingleton family built from ``inner``."""
    family = CosingletonFamily(rel, w, inner, **bounds)
    space = TaggedSpace("cosingleton-hypotheses", rel)
    space.register("member", lambda i: family.decode(i))

    def gap_then_cosingleton(n, m, t):
        reps_t = rel.reps(t, m + 1)
        w_t = w.at(n, t)
        keep = [reps_t[j] for j in range(m) if j != n]
        source = SetApprox(lambda u: rel.closure(keep, u), f"B[{n},{m}]@{t}")
        fallback = family.decode(family.index_of_cosingleton(n, t))
        return guard_overwrite(source, t,
                               lambda s: rel.reps(s, m + 1) == reps_t and w.at(n, s) == w_t,
                               lambda d, _s: fallback, f"BF[{n},{m},{t}]")

    space.register("gap", gap_then_cosingleton)

    def fn(data):
        t = len(data)
        cnt = content(data)
        n = least_absent_rep(rel, cnt, t)
        m = least_absent_rep(rel, cnt, t, start=n + 1)
        if m == n + 1:
            return space.index("member", family.index_of_ascending(n))
        since = _stable_since(rel, range(n + 1), t)
        if len(w.at(n, t)) > m:
            return space.index("gap", n, m, t)
        return space.index("member", family.index_of_cosingleton(n, since))

    learner = Learner(fn, space, "cosingleton-bc")
    learner.family = family  # type: ignore[attr-defined]
    return learner


# -- declarative dispatch -------------------------------------------------------------------

LEARNER_KINDS = (
    "ascending_ex", "ascending_conservative", "closure_bc", "interval_confident",
    "first_datum_finite", "odd_ascending_or_class", "chain_or_naturals",
    "ascending_or_pair_class", "weak_monotone_shifted", "scripted_bc_shifted",
    "bounded_content_confident", "scripted_vacillator", "vac_to_ex", "constant",
    "strong_union", "cosingleton_bc", "sample_finite", "finite_then_naturals",
)


def make_learner(cfg: Mapping, rel: EqRelApprox, w: Optional[WTable] = None) -> Learner:
    """Build a learner from a declarative cfg (scenario-file dict)."""
    from .constructions import make_set
    from .eqrel import _predicate
    kind = cfg.get("kind")

    def need(key):
        if key not in cfg:
            raise ValueError(f"learner {kind!r} needs parameter {key!r}")
        return cfg[key]

    if kind == "ascending_ex":
        return ascending_ex_learner(rel, conservative=False)
    if kind == "ascending_conservative":
        return ascending_ex_learner(rel, conservative=True)
    if kind == "closure_bc":
        return closure_bc_learner(rel)
    if kind == "interval_confident":
        return interval_confident_learner(rel)
    if kind == "first_datum_finite":
        return first_datum_finite(rel, _predicate(need("predicate")))
    if kind == "odd_ascending_or_class":
        return odd_ascending_or_class(rel)
    if kind == "chain_or_naturals":
        return chain_or_naturals(rel, make_set(need("B"), rel), int(need("k")))
    if kind == "ascending_or_pair_class":
        return ascending_or_pair_class(rel)
    if kind == "weak_monotone_shifted":
        return weak_monotone_shifted(rel, make_set(need("B0"), rel), int(need("k")))
    if kind == "scripted_bc_shifted":
        return scripted_bc_for_shifted(rel, make_set(need("B0"), rel), int(need("k")))
    if kind == "bounded_content_confident":
        return bounded_content_confident(int(cfg.get("default", 0)))
    if kind == "scripted_vacillator":
        return scripted_vacillator(rel)
    if kind == "vac_to_ex":
        return vac_to_ex_converter(scripted_vacillator(rel), rel)
    if kind == "constant":
        return constant_learner(ascending_family(rel), cfg.get("index", 0))
    if kind == "strong_union":
        return _sub_ascending_union(rel)
    if kind == "cosingleton_bc":
        if w is None:
            raise ValueError("learner 'cosingleton_bc' needs a W-table")
        return cosingleton_bc(rel, w, ascending_ex_learner(rel))
    if kind == "sample_finite":
        table = {int(i): frozenset(v) for i, v in need("samples").items()}
        return sample_finite(rel, lambda i: table.get(i, frozenset({10 ** 9 + i})))
    if kind == "finite_then_naturals":
        base = first_datum_finite(rel, _predicate(need("predicate")))
        return finite_then_naturals(base, base.space, int(cfg.get("index", 2)))
    raise ValueError(f"unknown learner kind {kind!r}")


def sub_ascending_learner(rel: EqRelApprox, scale: Callable[[int], int], offset: int = 0) -> Learner:
    """Confident-on-its-family learner for ``{A_{scale(n)}}``: least n with ``scale(n) >= n_t``."""
    fam = Numbering(lambda n: ascending_set(rel, scale(n)), "sub-ascending", rel)

    def fn(data):
        t = len(data)
        need = least_absent_rep(rel, content(data), t)
        n = 0
        while scale(n) < need:
            n += 1
        return n

    return Learner(fn, fam, "sub-ascending")


def _sub_ascending_union(rel: EqRelApprox) -> Learner:
    m1 = sub_ascending_learner(rel, lambda n: 2 * n)
    m2 = sub_ascending_learner(rel, lambda n: 2 * n + 1)
    return strong_union_confident_learner(m1, m2, lambda d: 2 * d, lambda e: 2 * e + 1,
                                          ascending_family(rel))
