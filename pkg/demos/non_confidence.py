"""An adversary keeps a chain learner changing its mind.

The learner guesses the chain set below the least even number it has not
seen, or all of N once 1 shows up.  The adversary grows the text just
enough to make each successive chain set correct, and every round costs
the learner a mind change.  On the text of all evens the mind-change count
keeps growing as the horizon doubles, so no finite horizon settles it.

Run: python3 demos/non_confidence.py
"""

from posequiv import canonical_text, convergence_probe, make_relation
from posequiv.constructions import chain_and_naturals, make_set
from posequiv.learners import chain_or_naturals
from posequiv.text import adversarial_chain_text

rel = make_relation({"kind": "identity"})
evens = make_set("even", rel)
learner = chain_or_naturals(rel, evens, 1)

result = adversarial_chain_text(learner, chain_and_naturals(rel, evens), rounds=8)
print("adversarial segments:", result.segments)
print("mind changes forced:", result.mind_changes, "-", result.progress.status)

for horizon in (250, 500, 1000):
    v = convergence_probe(learner, [canonical_text(evens)], horizon)
    print(f"horizon {horizon:4d}: {v.status}, mind changes {v.witness['mind_changes']}")
