"""Propositions, relation annotations, and directed implication graphs.

A relation annotation ties two propositions about the same image.  Every
annotation normalizes to directed arrows "sufficient -> necessary": an
equivalence contributes one arrow in each direction (scored independently),
an unrelated annotation contributes none.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Dict, Iterable, Iterator, List, Mapping, Tuple

from .errors import ConflictError, DanglingReferenceError


class RelationKind(Enum):
    """How the truth of one proposition constrains the other.

    The enum values double as the wire format used in relations files.
    """

    SUFFICIENT_FOR = "forward"
    """If the first proposition is true, the second must be true."""

    NECESSARY_FOR = "backward"
    """The first proposition must be true whenever the second is."""

    EQUIVALENT = "equivalent"
    """Both propositions are true together or false together."""

    UNRELATED = "unrelated"
    """Neither proposition constrains the other."""


@dataclass(frozen=True)
class Proposition:
    """A yes/no statement about one image: a question plus its gold answer."""

    id: str
    image_id: str
    question: str
    answer: str

    def __post_init__(self):
        if not self.id or not self.image_id:
            raise ValueError("proposition needs a non-empty id and image_id")
        if not self.question or not self.answer:
            raise ValueError(f"proposition {self.id!r} needs a non-empty question and answer")

    @property
    def key(self) -> Tuple[str, str]:
        return (self.image_id, self.id)


@dataclass(frozen=True)
class RelationRecord:
    """One annotated relation between two propositions of the same image."""

    image_id: str
    prop_i: str
    prop_j: str
    kind: RelationKind

    def __post_init__(self):
        if not self.image_id or not self.prop_i or not self.prop_j:
            raise ValueError("relation record needs non-empty image and proposition ids")
        if self.prop_i == self.prop_j:
            raise ValueError(
                f"relation on image {self.image_id!r} links {self.prop_i!r} to itself"
            )


@dataclass(frozen=True)
class ImplicationArrow:
    """Directed edge: whenever `sufficient` holds, `necessary` must hold."""

    image_id: str
    sufficient: str
    necessary: str


def invert(kind: RelationKind) -> RelationKind:
    """The kind as seen with the two propositions swapped."""
    if kind is RelationKind.SUFFICIENT_FOR:
        return RelationKind.NECESSARY_FOR
    if kind is RelationKind.NECESSARY_FOR:
        return RelationKind.SUFFICIENT_FOR
    return kind


def to_arrows(record: RelationRecord) -> List[ImplicationArrow]:
    """Directed arrows contributed by a single annotation."""
    image = record.image_id
    if record.kind is RelationKind.SUFFICIENT_FOR:
        return [ImplicationArrow(image, record.prop_i, record.prop_j)]
    if record.kind is RelationKind.NECESSARY_FOR:
        return [ImplicationArrow(image, record.prop_j, record.prop_i)]
    if record.kind is RelationKind.EQUIVALENT:
        return [
            ImplicationArrow(image, record.prop_i, record.prop_j),
            ImplicationArrow(image, record.prop_j, record.prop_i),
        ]
    return []


@dataclass(frozen=True)
class ImplicationGraph:
    """Deduplicated arrows grouped per image, plus every known proposition.

    Arrows within an image are kept sorted, so graphs built from the same
    records in any order compare equal.
    """

    arrows_by_image: Mapping[str, Tuple[ImplicationArrow, ...]]
    propositions: Mapping[Tuple[str, str], Proposition]

    def arrows(self) -> Iterator[ImplicationArrow]:
        for image_arrows in self.arrows_by_image.values():
            yield from image_arrows

    def __len__(self) -> int:
        return sum(len(a) for a in self.arrows_by_image.values())

    def proposition(self, image_id: str, prop_id: str) -> Proposition:
        return self.propositions[(image_id, prop_id)]


def build_graph(
    records: Iterable[RelationRecord], propositions: Iterable[Proposition]
) -> ImplicationGraph:
    """Merge annotations into one deduplicated arrow set per image.

    Duplicate and compatible annotations merge silently.  An unrelated
    annotation for a pair that any other record connects with an arrow is a
    contradiction and raises ConflictError.  Records naming propositions not
    present in `propositions` raise DanglingReferenceError.
    """
    prop_index: Dict[Tuple[str, str], Proposition] = {}
    for prop in propositions:
        if prop.key in prop_index:
            raise ValueError(
                f"duplicate proposition id {prop.id!r} for image {prop.image_id!r}"
            )
        prop_index[prop.key] = prop

    arrow_sets: Dict[str, set] = {}
    pairs_with_arrows: Dict[str, set] = {}
    pairs_unrelated: Dict[str, set] = {}
    for record in records:
        for end in (record.prop_i, record.prop_j):
            if (record.image_id, end) not in prop_index:
                raise DanglingReferenceError(
                    f"relation on image {record.image_id!r} references unknown proposition {end!r}"
                )
        pair = tuple(sorted((record.prop_i, record.prop_j)))
        if record.kind is RelationKind.UNRELATED:
            pairs_unrelated.setdefault(record.image_id, set()).add(pair)
            if pair in pairs_with_arrows.get(record.image_id, ()):
                raise ConflictError(
                    f"pair {pair!r} on image {record.image_id!r} is annotated both "
                    "unrelated and related"
                )
        else:
            pairs_with_arrows.setdefault(record.image_id, set()).add(pair)
            if pair in pairs_unrelated.get(record.image_id, ()):
                raise ConflictError(
                    f"pair {pair!r} on image {record.image_id!r} is annotated both "
                    "unrelated and related"
                )
            arrow_sets.setdefault(record.image_id, set()).update(to_arrows(record))

    arrows_by_image = {
        image_id: tuple(sorted(arrow_sets[image_id], key=lambda a: (a.sufficient, a.necessary)))
        for image_id in sorted(arrow_sets)
    }
    return ImplicationGraph(arrows_by_image=arrows_by_image, propositions=prop_index)
