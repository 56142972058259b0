"""Stage-approximated positive equivalence relations and learners over their classes."""

from .coding import pair, unpair, encode_tuple, decode_tuple, finite_set, finite_set_code
from .eqrel import EqRelApprox, make_relation
from .numbering import (Numbering, SetApprox, TaggedSpace, ascending_family, ascending_set,
                        closure_set, equal_upto, guard_overwrite, one_one_merge, one_one_upto,
                        subset_upto)
from .constructions import WTable, build_family, build_triple_merge, build_interval_relation, classify_closed_entries
from .text import PAUSE, FiniteSequence, Text, canonical_text, fixed_text, seeded_text
from .learners import Conjecture, Learner, ascending_ex_learner, make_learner
from .criteria import (Trace, constraint_check, convergence_probe, criterion_verdict, run_trace,
                       stabilising_sequence_search)
from .verdict import BOUND, HORIZON, QUIET, STAGE_BUDGET, Verdict

__all__ = [name for name in dir() if not name.startswith("_")]
