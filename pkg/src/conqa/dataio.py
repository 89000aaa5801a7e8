"""JSON Lines readers and writers for the on-disk formats.

One object per line.  Datasets live in a directory holding worlds.jsonl,
propositions.jsonl, and relations.jsonl; predictions and converted
propositions are single files.  Writing is deterministic: fixed key order,
compact separators.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable, Iterator, List

from .metric import Prediction
from .relations import Proposition, RelationKind, RelationRecord
from .synth import Query, SyntheticDataset, World, parse_question

WORLDS_FILE = "worlds.jsonl"
PROPOSITIONS_FILE = "propositions.jsonl"
RELATIONS_FILE = "relations.jsonl"


def read_jsonl(path) -> Iterator[dict]:
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                row = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}:{line_no}: invalid JSON: {exc}") from exc
            if not isinstance(row, dict):
                raise ValueError(f"{path}:{line_no}: expected an object")
            yield row


def write_jsonl(path, rows: Iterable[dict]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, separators=(",", ":")) + "\n")


def _require(row: dict, key: str, context: str):
    if key not in row:
        raise ValueError(f"{context}: missing field {key!r}")
    return row[key]


def read_propositions(path) -> List[Proposition]:
    return [
        Proposition(
            id=str(_require(row, "id", f"{path}")),
            image_id=str(_require(row, "image_id", f"{path}")),
            question=str(_require(row, "question", f"{path}")),
            answer=str(_require(row, "answer", f"{path}")),
        )
        for row in read_jsonl(path)
    ]


def write_propositions(path, propositions: Iterable[Proposition]) -> None:
    write_jsonl(
        path,
        (
            {
                "id": p.id,
                "image_id": p.image_id,
                "question": p.question,
                "answer": p.answer,
            }
            for p in propositions
        ),
    )


def read_relations(path) -> List[RelationRecord]:
    records = []
    for row in read_jsonl(path):
        raw_kind = _require(row, "kind", f"{path}")
        try:
            kind = RelationKind(raw_kind)
        except ValueError:
            raise ValueError(
                f"{path}: unknown relation kind {raw_kind!r}, expected one of "
                f"{[k.value for k in RelationKind]}"
            ) from None
        records.append(
            RelationRecord(
                image_id=str(_require(row, "image_id", f"{path}")),
                prop_i=str(_require(row, "prop_i", f"{path}")),
                prop_j=str(_require(row, "prop_j", f"{path}")),
                kind=kind,
            )
        )
    return records


def write_relations(path, records: Iterable[RelationRecord]) -> None:
    write_jsonl(
        path,
        (
            {
                "image_id": r.image_id,
                "prop_i": r.prop_i,
                "prop_j": r.prop_j,
                "kind": r.kind.value,
            }
            for r in records
        ),
    )


def read_predictions(path) -> List[Prediction]:
    return [
        Prediction(
            image_id=str(_require(row, "image_id", f"{path}")),
            prop_id=str(_require(row, "prop_id", f"{path}")),
            predicted_answer=str(_require(row, "predicted_answer", f"{path}")),
            probability=float(_require(row, "probability", f"{path}")),
        )
        for row in read_jsonl(path)
    ]


def write_predictions(path, predictions: Iterable[Prediction]) -> None:
    write_jsonl(
        path,
        (
            {
                "image_id": p.image_id,
                "prop_id": p.prop_id,
                "predicted_answer": p.predicted_answer,
                "probability": p.probability,
            }
            for p in predictions
        ),
    )


def read_worlds(path) -> List[World]:
    worlds = []
    for row in read_jsonl(path):
        attributes = _require(row, "attributes", f"{path}")
        if not isinstance(attributes, list):
            raise ValueError(f"{path}: attributes must be a list of bits")
        worlds.append(
            World(id=str(_require(row, "id", f"{path}")), attributes=tuple(attributes))
        )
    return worlds


def write_worlds(path, worlds: Iterable[World]) -> None:
    write_jsonl(
        path, ({"id": w.id, "attributes": list(w.attributes)} for w in worlds)
    )


def write_dataset(directory, dataset: SyntheticDataset) -> None:
    """Write worlds, propositions, and relations under one directory."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    write_worlds(directory / WORLDS_FILE, dataset.worlds)
    write_propositions(directory / PROPOSITIONS_FILE, dataset.propositions())
    write_relations(directory / RELATIONS_FILE, dataset.relations)


def read_dataset(directory) -> SyntheticDataset:
    """Rebuild a dataset from its three files.

    Formulas are recovered by parsing the question text, which the renderer
    guarantees is possible.
    """
    directory = Path(directory)
    worlds = read_worlds(directory / WORLDS_FILE)
    if not worlds:
        raise ValueError(f"{directory}: no worlds")
    n_attr = len(worlds[0].attributes)
    for world in worlds:
        if len(world.attributes) != n_attr:
            raise ValueError(
                f"{directory}: world {world.id!r} has {len(world.attributes)} "
                f"attributes, expected {n_attr}"
            )
    queries = [
        Query(
            id=p.id,
            world_id=p.image_id,
            formula=parse_question(p.question),
            answer=p.answer,
        )
        for p in read_propositions(directory / PROPOSITIONS_FILE)
    ]
    relations = read_relations(directory / RELATIONS_FILE)
    return SyntheticDataset(
        n_attr=n_attr,
        worlds=tuple(worlds),
        queries=tuple(queries),
        relations=tuple(relations),
    )
