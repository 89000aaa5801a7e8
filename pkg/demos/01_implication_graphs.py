"""Annotating implication relations between yes/no propositions.

A proposition is a question plus its gold answer, pinned to one image.
Annotations say how two propositions constrain each other; the graph
builder turns them into directed arrows (sufficient -> necessary),
merging duplicates and refusing contradictory annotations.
"""

from conqa import (
    ConflictError,
    Proposition,
    RelationKind,
    RelationRecord,
    build_graph,
    invert,
    to_arrows,
)

# Four statements about one picture of a snowy street.
props = [
    Proposition(id="snowing", image_id="street", question="Is it snowing?", answer="yes"),
    Proposition(id="winter", image_id="street", question="Is it winter?", answer="yes"),
    Proposition(id="cold", image_id="street", question="Is it cold outside?", answer="yes"),
    Proposition(id="crowded", image_id="street", question="Is the street crowded?", answer="no"),
]

# Snowing is sufficient for winter; winter is necessary for snowing.
# The two records say the same thing from opposite ends.
records = [
    RelationRecord("street", "snowing", "winter", RelationKind.SUFFICIENT_FOR),
    RelationRecord("street", "winter", "snowing", RelationKind.NECESSARY_FOR),
    # Snowing and cold go together in this corpus: an equivalence
    # contributes an arrow in each direction.
    RelationRecord("street", "snowing", "cold", RelationKind.EQUIVALENT),
    # Crowdedness has nothing to do with the weather.
    RelationRecord("street", "crowded", "winter", RelationKind.UNRELATED),
]

print("each annotation normalizes to directed arrows:")
for record in records:
    arrows = to_arrows(record)
    rendered = ", ".join(f"{a.sufficient} -> {a.necessary}" for a in arrows) or "(none)"
    print(f"  {record.prop_i:8s} {record.kind.value:11s} {record.prop_j:8s}  =>  {rendered}")

# Swapping the endpoints of an annotation flips its direction but not
# its meaning; invert() gives the kind seen from the other side.
kind = RelationKind.SUFFICIENT_FOR
print(f"\n{kind.value} seen from the other side: {invert(kind).value}")

graph = build_graph(records, props)
print(f"\ngraph over {len(graph.propositions)} propositions, {len(graph)} arrows:")
for arrow in graph.arrows():
    print(f"  {arrow.sufficient} -> {arrow.necessary}")

# The first two records described the same arrow twice, and the
# equivalence added two more: four records, three distinct arrows.

# Contradictions do not merge.  Claiming a pair is unrelated after an
# arrow has been recorded for it is an annotation bug, and the builder
# says so instead of guessing.
bad = records + [RelationRecord("street", "snowing", "winter", RelationKind.UNRELATED)]
try:
    build_graph(bad, props)
except ConflictError as exc:
    print(f"\nconflicting annotation rejected: {exc}")
