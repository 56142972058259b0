"""Watch the ascending learner lock onto A_3 over the even-numbers relation.

Over this relation every even number sits in the class of 0, and each odd
number is its own class.  The representatives are therefore 0, 1, 3, 5, ...
and A_3 is the evens together with 1 and 3.

Run: python3 demos/ascending_learner.py
"""

from posequiv import (ascending_ex_learner, ascending_set, canonical_text, constraint_check,
                      criterion_verdict, make_relation, run_trace, seeded_text)

rel = make_relation({"kind": "recursive_set", "predicate": "even"})
print("representatives at stage 200:", rel.reps(200, 6))

target = ascending_set(rel, 3)
print("A_3 on [0, 20]:", sorted(target.window(200, 20)))

for name, learner in (("plain", ascending_ex_learner(rel)),
                      ("conservative", ascending_ex_learner(rel, conservative=True))):
    print(f"\n{name} learner")
    for text in (canonical_text(target), seeded_text(target, seed=11)):
        trace = run_trace(learner, text, 300)
        moves = [(r.step, learner.space.describe(r.hypothesis)) for i, r in enumerate(trace.records)
                 if i == 0 or r.hypothesis != trace.records[i - 1].hypothesis]
        print("  text:", text.descriptor["kind"], "first data:", list(text.prefix(8)))
        print("  conjecture changes:", moves[:6])
        print("  Ex:", criterion_verdict(trace, "Ex", target).status,
              " Conservative:", constraint_check(trace, "Conservative").status)
