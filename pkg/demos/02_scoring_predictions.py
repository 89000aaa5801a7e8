"""Scoring a model's answers for accuracy and logical consistency.

A violated arrow is one whose sufficient proposition was answered
correctly while its necessary proposition was not: the model asserted
the stronger statement and denied the weaker one.  Flip correction
repairs violations after the fact by negating one side of each
violated pair, and the choice of side trades accuracy against
consistency in opposite directions.
"""

from conqa import (
    FLIP_FIRST,
    FLIP_RANDOM,
    FLIP_SECOND,
    Prediction,
    PredictionSet,
    Proposition,
    RelationKind,
    RelationRecord,
    accuracy,
    build_graph,
    build_report,
    flip_correction,
)

# A chain of increasingly weak statements about one image: each one is
# sufficient for the next.
chain = ["poodle", "dog", "animal", "alive", "thing"]
props = [
    Proposition(id=name, image_id="photo", question=f"Is there a {name}?", answer="yes")
    for name in chain
]
records = [
    RelationRecord("photo", a, b, RelationKind.SUFFICIENT_FOR)
    for a, b in zip(chain, chain[1:])
]
graph = build_graph(records, props)

# The model is sure about the poodle but stumbles in the middle of the
# chain: it sees a poodle yet denies there being a dog.
answers = {"poodle": "yes", "dog": "no", "animal": "no", "alive": "yes", "thing": "yes"}
preds = PredictionSet(
    Prediction(image_id="photo", prop_id=name, predicted_answer=answers[name], probability=0.8)
    for name in chain
)

report = build_report(graph, preds)
print(f"arrows {report.total_arrows}, violated {report.inconsistencies}")
print(f"accuracy {report.accuracy:.2f}, consistency {report.consistency:.2f}")
for arrow in report.inconsistent_pairs:
    print(f"  violated: {arrow.sufficient} -> {arrow.necessary}")

# "poodle -> dog" is violated (poodle right, dog wrong). "dog -> animal"
# is not: a wrong sufficient answer cannot violate anything.

print("\nflip correction, one pass against the original answers:")
print(f"{'strategy':10s} {'accuracy':>9s} {'consistency':>12s}")
base = build_report(graph, preds)
print(f"{'none':10s} {base.accuracy:>9.2f} {base.consistency:>12.2f}")
for strategy in (FLIP_FIRST, FLIP_SECOND, FLIP_RANDOM):
    fixed = flip_correction(graph, preds, strategy, seed=0)
    fixed_report = build_report(graph, fixed)
    print(f"{strategy:10s} {fixed_report.accuracy:>9.2f} {fixed_report.consistency:>12.2f}")

# Flipping the first (sufficient) side retracts a correct answer, so
# accuracy falls.  Flipping the second (necessary) side corrects a
# wrong answer, so accuracy rises, and here it exposes the next arrow
# in the chain instead: single-pass correction does not cascade.
