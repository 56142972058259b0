"""Build the triple-merge relation from a small W-table and inspect it.

Each table entry W_n is a stage-indexed set, given as (stage, element)
events.  The construction merges classes so that the representatives
settle, each a_m moving at most m^2 times, and it sorts every entry that
is closed under the merged relation into one of three cases:
  1. W_n lies inside some A_n,
  2. W_n equals A_m for some m,
  3. W_n covers the whole window.
Entries that are not closed are reported as inconclusive.

Run: python3 demos/triple_merge.py
"""

from posequiv import WTable, build_triple_merge, classify_closed_entries

TABLES = {
    "merging": {"0": [[0, 5]], "1": [[3, 0], [4, 1]], "2": [[2, 0], [5, 1], [6, 2], [7, 3]]},
    "already closed": {"0": [[3, 0], [4, 1]], "1": [[10, 0]], "2": [[2, 0], [5, 1], [6, 2], [7, 3]]},
}

for title, table in TABLES.items():
    w = WTable.from_json(table)
    rel = build_triple_merge(w)
    print(f"== {title} table:", table)
    print("emitted pairs:", rel.emit(300))
    for t in (0, 5, 10, 300):
        print(f"stage {t:3d} representatives:", rel.reps(t, 8))
    print("change counts a_0..a_7:", [rel.rep_changes(m, 300) for m in range(8)])
    for n, verdict in classify_closed_entries(rel, w).items():
        print(f"entry {n}: {verdict.status}", verdict.reason or verdict.witness)
    print()
