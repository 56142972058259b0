"""A correct behaviourally correct learner that is not monotone, with a replayable witness.

The family holds the evens plus shifted ascending sets.  A weakly monotone
learner handles it; the scripted BC learner for the same family gives up
monotonicity, and the witness search finds the two strings that show it.

Run: python3 demos/monotonicity_witness.py
"""

from posequiv import canonical_text, constraint_check, make_relation, run_trace
from posequiv.constructions import make_set
from posequiv.criteria import bc_nonmonotone_witness, replay_nonmonotone_witness
from posequiv.learners import scripted_bc_for_shifted, weak_monotone_shifted

rel = make_relation({"kind": "identity"})
evens = make_set("even", rel)
wm = weak_monotone_shifted(rel, evens, 1)

for i in range(4):
    target = wm.family.decode(i)
    trace = run_trace(wm, canonical_text(target), 200)
    print(f"member {i} {sorted(target.window(200, 12))}: WeakMon",
          constraint_check(trace, "WeakMon").status, "ClassPreserving",
          constraint_check(trace, "ClassPreserving", family=wm.family).status)

bc = scripted_bc_for_shifted(rel, evens, 1)
found = bc_nonmonotone_witness(bc, wm.family, rel)
print("\nwitness:", found.status, found.witness)
print("replayed Mon check:", replay_nonmonotone_witness(bc, wm.family, found.witness).status)
