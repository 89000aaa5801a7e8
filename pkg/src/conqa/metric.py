"""Accuracy and implication-consistency scoring for predicted answers.

An arrow "sufficient -> necessary" is violated exactly when the sufficient
proposition is answered correctly and the necessary one is not.  Consistency
is the fraction of arrows that are not violated.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, replace
from typing import Dict, Iterable, Iterator, List, Tuple

from .errors import (
    DanglingReferenceError,
    EmptyGraphError,
    MissingPredictionError,
    NonBinaryAnswerError,
)
from .relations import ImplicationArrow, ImplicationGraph, Proposition

FLIP_FIRST = "first"
FLIP_SECOND = "second"
FLIP_RANDOM = "random"
FLIP_STRATEGIES = (FLIP_FIRST, FLIP_SECOND, FLIP_RANDOM)


def normalize_answer(text: str) -> str:
    """Case-fold and trim, so 'Yes ' and 'yes' compare equal."""
    return text.strip().casefold()


@dataclass(frozen=True)
class Prediction:
    """A model's answer for one proposition, with the confidence it assigns."""

    image_id: str
    prop_id: str
    predicted_answer: str
    probability: float

    def __post_init__(self):
        if not 0.0 <= self.probability <= 1.0:
            raise ValueError(
                f"prediction for {self.prop_id!r} has probability {self.probability!r} "
                "outside [0, 1]"
            )

    @property
    def key(self) -> Tuple[str, str]:
        return (self.image_id, self.prop_id)


class PredictionSet:
    """Predictions keyed by (image_id, prop_id)."""

    def __init__(self, predictions: Iterable[Prediction] = ()):
        self._entries: Dict[Tuple[str, str], Prediction] = {}
        for pred in predictions:
            if pred.key in self._entries:
                raise ValueError(f"duplicate prediction for {pred.key!r}")
            self._entries[pred.key] = pred

    def __iter__(self) -> Iterator[Prediction]:
        return iter(self._entries.values())

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, key: Tuple[str, str]) -> bool:
        return key in self._entries

    def __eq__(self, other) -> bool:
        if not isinstance(other, PredictionSet):
            return NotImplemented
        return self._entries == other._entries

    def get(self, image_id: str, prop_id: str):
        return self._entries.get((image_id, prop_id))

    def require(self, image_id: str, prop_id: str) -> Prediction:
        pred = self._entries.get((image_id, prop_id))
        if pred is None:
            raise MissingPredictionError(
                f"no prediction for proposition {prop_id!r} on image {image_id!r}"
            )
        return pred

    def keys(self):
        return self._entries.keys()


def evaluate_truth(prediction: Prediction, proposition: Proposition) -> bool:
    """Whether the predicted answer matches the gold answer after normalization."""
    return normalize_answer(prediction.predicted_answer) == normalize_answer(proposition.answer)


def inconsistent_arrows(
    graph: ImplicationGraph, predictions: PredictionSet
) -> List[ImplicationArrow]:
    """Arrows whose sufficient side is answered correctly but whose necessary side is not."""
    violated = []
    for arrow in graph.arrows():
        suff_ok = evaluate_truth(
            predictions.require(arrow.image_id, arrow.sufficient),
            graph.proposition(arrow.image_id, arrow.sufficient),
        )
        nec_ok = evaluate_truth(
            predictions.require(arrow.image_id, arrow.necessary),
            graph.proposition(arrow.image_id, arrow.necessary),
        )
        if suff_ok and not nec_ok:
            violated.append(arrow)
    return violated


def count_inconsistencies(graph: ImplicationGraph, predictions: PredictionSet) -> int:
    return len(inconsistent_arrows(graph, predictions))


def consistency_ratio(graph: ImplicationGraph, predictions: PredictionSet) -> float:
    """1 - violations / arrows.  Undefined (EmptyGraphError) without arrows."""
    total = len(graph)
    if total == 0:
        raise EmptyGraphError("consistency is undefined for a graph with no arrows")
    return 1.0 - count_inconsistencies(graph, predictions) / total


def accuracy(predictions: PredictionSet, propositions: Iterable[Proposition]) -> float:
    """Fraction of propositions whose predicted answer matches the gold answer."""
    props = list(propositions)
    if not props:
        raise ValueError("accuracy is undefined over zero propositions")
    correct = 0
    for prop in props:
        pred = predictions.require(prop.image_id, prop.id)
        correct += evaluate_truth(pred, prop)
    return correct / len(props)


@dataclass(frozen=True)
class ConsistencyReport:
    """Joint accuracy/consistency summary with the violated arrows listed."""

    total_arrows: int
    inconsistencies: int
    consistency: float
    accuracy: float
    inconsistent_pairs: Tuple[ImplicationArrow, ...]

    def as_dict(self) -> dict:
        return {
            "total_arrows": self.total_arrows,
            "inconsistencies": self.inconsistencies,
            "consistency": self.consistency,
            "accuracy": self.accuracy,
            "inconsistent_pairs": [
                {
                    "image_id": arrow.image_id,
                    "sufficient": arrow.sufficient,
                    "necessary": arrow.necessary,
                }
                for arrow in self.inconsistent_pairs
            ],
        }


def build_report(graph: ImplicationGraph, predictions: PredictionSet) -> ConsistencyReport:
    """Score predictions against a graph.

    Accuracy covers every proposition the graph knows about, consistency every
    arrow.  Prediction keys outside the graph's propositions raise
    DanglingReferenceError; missing ones raise MissingPredictionError.
    """
    if len(graph) == 0:
        raise EmptyGraphError("cannot report consistency for a graph with no arrows")
    for key in predictions.keys():
        if key not in graph.propositions:
            raise DanglingReferenceError(
                f"prediction references unknown proposition {key[1]!r} on image {key[0]!r}"
            )
    violated = inconsistent_arrows(graph, predictions)
    total = len(graph)
    return ConsistencyReport(
        total_arrows=total,
        inconsistencies=len(violated),
        consistency=1.0 - len(violated) / total,
        accuracy=accuracy(predictions, graph.propositions.values()),
        inconsistent_pairs=tuple(violated),
    )


def _flip_answer(pred: Prediction) -> Prediction:
    answer = normalize_answer(pred.predicted_answer)
    if answer == "yes":
        flipped = "no"
    elif answer == "no":
        flipped = "yes"
    else:
        raise NonBinaryAnswerError(
            f"cannot flip non-binary answer {pred.predicted_answer!r} "
            f"for proposition {pred.prop_id!r}"
        )
    return replace(pred, predicted_answer=flipped, probability=1.0 - pred.probability)


def _random_coin(seed: int, arrow: ImplicationArrow) -> int:
    # Keyed hash of the arrow identity, so the draw does not depend on
    # iteration order and repeats exactly for the same seed.
    key = (seed % 2**64).to_bytes(8, "little")
    payload = "\x1f".join((arrow.image_id, arrow.sufficient, arrow.necessary)).encode("utf-8")
    digest = hashlib.blake2b(payload, key=key, digest_size=1).digest()
    return digest[0] & 1


def flip_correction(
    graph: ImplicationGraph,
    predictions: PredictionSet,
    strategy: str,
    seed: int = 0,
) -> PredictionSet:
    """Repair violated arrows by flipping one side's answer, in a single pass.

    The violated arrows are found against the original predictions only;
    flips are then applied at once, each proposition flipped at most once.
    Strategy "first" flips the sufficient side (a correct answer becomes
    wrong), "second" flips the necessary side (a wrong answer becomes
    correct), "random" picks a side per arrow from a seeded draw.
    """
    if strategy not in FLIP_STRATEGIES:
        raise ValueError(f"unknown flip strategy {strategy!r}, expected one of {FLIP_STRATEGIES}")
    targets = set()
    for arrow in inconsistent_arrows(graph, predictions):
        if strategy == FLIP_FIRST:
            side = arrow.sufficient
        elif strategy == FLIP_SECOND:
            side = arrow.necessary
        else:
            side = arrow.sufficient if _random_coin(seed, arrow) == 0 else arrow.necessary
        targets.add((arrow.image_id, side))

    corrected = PredictionSet()
    for pred in predictions:
        corrected._entries[pred.key] = _flip_answer(pred) if pred.key in targets else pred
    return corrected
