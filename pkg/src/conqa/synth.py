"""Synthetic worlds of binary attributes with logically related yes/no queries.

A world fixes a small vector of bits.  A query asks whether a boolean formula
over those bits holds (one literal, or a conjunction or disjunction of two
literals on distinct attributes); its gold answer is the formula evaluated on
the world.  The relation between two queries of the same world is decided
exactly by enumerating every attribute assignment: the event "the proposition
as stated is true" either entails the other event, is entailed by it, both,
or neither.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import InfeasibleError, NonBinaryAnswerError
from .metric import normalize_answer
from .relations import Proposition, RelationKind, RelationRecord

MAX_ATTRIBUTES = 20

CONNECTIVE_LIT = "lit"
CONNECTIVE_AND = "and"
CONNECTIVE_OR = "or"
CONNECTIVES = (CONNECTIVE_LIT, CONNECTIVE_AND, CONNECTIVE_OR)

# Share of each relation kind that `match_relation_mix` aims for, measured
# over the generated relation records.
TARGET_RELATION_MIX = {
    RelationKind.NECESSARY_FOR: 0.60,
    RelationKind.EQUIVALENT: 0.17,
    RelationKind.UNRELATED: 0.12,
    RelationKind.SUFFICIENT_FOR: 0.11,
}

# Probability that a free slot (mix matching off) starts from a proposal that
# shares an attribute between the two formulas, which is what makes arrows
# common enough for training to have signal.
_FREE_RELATED_PROPOSAL = 0.8


@dataclass(frozen=True)
class Literal:
    """One attribute test: bit at `index`, possibly negated."""

    index: int
    negated: bool = False

    def __post_init__(self):
        if self.index < 0:
            raise ValueError(f"literal index must be nonnegative, got {self.index}")


@dataclass(frozen=True)
class Formula:
    """A literal, or a two-literal conjunction or disjunction."""

    connective: str
    literals: Tuple[Literal, ...]

    def __post_init__(self):
        if self.connective not in CONNECTIVES:
            raise ValueError(f"unknown connective {self.connective!r}")
        if self.connective == CONNECTIVE_LIT:
            if len(self.literals) != 1:
                raise ValueError("a literal formula takes exactly one literal")
        else:
            if len(self.literals) != 2:
                raise ValueError(f"{self.connective!r} takes exactly two literals")
            if self.literals[0].index == self.literals[1].index:
                raise ValueError(
                    f"{self.connective!r} literals must test distinct attributes"
                )

    @property
    def max_index(self) -> int:
        return max(lit.index for lit in self.literals)


@dataclass(frozen=True)
class World:
    """A full assignment of the binary attributes."""

    id: str
    attributes: Tuple[int, ...]

    def __post_init__(self):
        if not self.id:
            raise ValueError("world needs a non-empty id")
        if not self.attributes or any(b not in (0, 1) for b in self.attributes):
            raise ValueError(f"world {self.id!r} attributes must be bits")


@dataclass(frozen=True)
class Query:
    """A formula asked about one world, with the gold answer."""

    id: str
    world_id: str
    formula: Formula
    answer: str


def evaluate_formula(formula: Formula, attributes: Sequence[int]) -> bool:
    """Truth of the formula under one attribute assignment."""
    if formula.max_index >= len(attributes):
        raise ValueError(
            f"formula tests attribute {formula.max_index} but the world has "
            f"only {len(attributes)}"
        )
    values = [bool(attributes[lit.index]) ^ lit.negated for lit in formula.literals]
    if formula.connective == CONNECTIVE_AND:
        return values[0] and values[1]
    if formula.connective == CONNECTIVE_OR:
        return values[0] or values[1]
    return values[0]


@lru_cache(maxsize=4)
def _assignment_table(n_attr: int) -> np.ndarray:
    # Row r holds the bits of r, one column per attribute.
    rows = np.arange(2**n_attr, dtype=np.uint32)
    return np.stack([(rows >> i) & 1 for i in range(n_attr)], axis=1).astype(bool)


def formula_truth_table(formula: Formula, n_attr: int) -> np.ndarray:
    """Truth of the formula over all 2**n_attr assignments."""
    if not 1 <= n_attr <= MAX_ATTRIBUTES:
        raise ValueError(f"n_attr must lie in [1, {MAX_ATTRIBUTES}], got {n_attr}")
    if formula.max_index >= n_attr:
        raise ValueError(
            f"formula tests attribute {formula.max_index} but n_attr is {n_attr}"
        )
    table = _assignment_table(n_attr)
    cols = [
        ~table[:, lit.index] if lit.negated else table[:, lit.index]
        for lit in formula.literals
    ]
    if formula.connective == CONNECTIVE_AND:
        return cols[0] & cols[1]
    if formula.connective == CONNECTIVE_OR:
        return cols[0] | cols[1]
    return cols[0]


def _event(formula: Formula, answer: str, n_attr: int) -> np.ndarray:
    answer = normalize_answer(answer)
    if answer not in ("yes", "no"):
        raise NonBinaryAnswerError(f"expected a yes/no answer, got {answer!r}")
    table = formula_truth_table(formula, n_attr)
    return table if answer == "yes" else ~table


def oracle_relation(
    formula_a: Formula,
    answer_a: str,
    formula_b: Formula,
    answer_b: str,
    n_attr: int,
) -> RelationKind:
    """Exact relation between two answered queries, by full enumeration.

    The events compared are "formula evaluates to the stated answer", so a
    negated formula with a flipped answer describes the same event.
    """
    event_a = _event(formula_a, answer_a, n_attr)
    event_b = _event(formula_b, answer_b, n_attr)
    a_implies_b = not np.any(event_a & ~event_b)
    b_implies_a = not np.any(event_b & ~event_a)
    if a_implies_b and b_implies_a:
        return RelationKind.EQUIVALENT
    if a_implies_b:
        return RelationKind.SUFFICIENT_FOR
    if b_implies_a:
        return RelationKind.NECESSARY_FOR
    return RelationKind.UNRELATED


_ON_OFF = {False: "on", True: "off"}


def render_question(formula: Formula) -> str:
    """Surface text for a formula; injective, so parsing can recover it."""
    if formula.connective == CONNECTIVE_LIT:
        lit = formula.literals[0]
        return f"Is bit{lit.index} {_ON_OFF[lit.negated]}?"
    parts = [f"bit{lit.index} is {_ON_OFF[lit.negated]}" for lit in formula.literals]
    return f"Is it true that {parts[0]} {formula.connective} {parts[1]}?"


_LIT_RE = re.compile(r"Is bit(\d+) (on|off)\?")
_PAIR_RE = re.compile(
    r"Is it true that bit(\d+) is (on|off) (and|or) bit(\d+) is (on|off)\?"
)


def parse_question(text: str) -> Formula:
    """Inverse of render_question."""
    m = _LIT_RE.fullmatch(text)
    if m:
        return Formula(CONNECTIVE_LIT, (Literal(int(m.group(1)), m.group(2) == "off"),))
    m = _PAIR_RE.fullmatch(text)
    if m:
        return Formula(
            m.group(3),
            (
                Literal(int(m.group(1)), m.group(2) == "off"),
                Literal(int(m.group(4)), m.group(5) == "off"),
            ),
        )
    raise ValueError(f"question does not match the synthetic grammar: {text!r}")


@dataclass(frozen=True)
class SyntheticDataset:
    """Worlds, their queries, and the annotated relations between queries."""

    n_attr: int
    worlds: Tuple[World, ...]
    queries: Tuple[Query, ...]
    relations: Tuple[RelationRecord, ...]

    def propositions(self) -> List[Proposition]:
        return [
            Proposition(q.id, q.world_id, render_question(q.formula), q.answer)
            for q in self.queries
        ]

    def worlds_by_id(self) -> Dict[str, World]:
        return {w.id: w for w in self.worlds}

    def queries_for(self, world_id: str) -> List[Query]:
        return [q for q in self.queries if q.world_id == world_id]


def _answer_for(formula: Formula, world: World) -> str:
    return "yes" if evaluate_formula(formula, world.attributes) else "no"


def _random_literal(rng, n_attr: int, index: Optional[int] = None) -> Literal:
    if index is None:
        index = int(rng.integers(n_attr))
    return Literal(index, bool(rng.integers(2)))


def _distinct_index(rng, n_attr: int, taken: int) -> int:
    other = int(rng.integers(n_attr - 1))
    return other + 1 if other >= taken else other


def _random_formula(rng, n_attr: int, include: Optional[int] = None) -> Formula:
    """Draw from the grammar; `include` forces one literal onto that attribute."""
    roll = rng.random()
    first = _random_literal(rng, n_attr, include)
    if roll < 0.4 and n_attr >= 1:
        return Formula(CONNECTIVE_LIT, (first,))
    if n_attr < 2:
        return Formula(CONNECTIVE_LIT, (first,))
    connective = CONNECTIVE_AND if roll < 0.7 else CONNECTIVE_OR
    second = _random_literal(rng, n_attr, _distinct_index(rng, n_attr, first.index))
    pair = (first, second) if rng.integers(2) == 0 else (second, first)
    return Formula(connective, pair)


def _related_proposal(rng, n_attr: int) -> Tuple[Formula, Formula]:
    """Two formulas sharing an attribute; implications are common among these."""
    f_a = _random_formula(rng, n_attr)
    shared = f_a.literals[int(rng.integers(len(f_a.literals)))].index
    f_b = _random_formula(rng, n_attr, include=shared)
    return f_a, f_b


def _equivalent_partner(rng, formula: Formula) -> Formula:
    """A structurally different formula whose event matches (up to answer flip).

    Either the complement is built (negate every literal and swap the
    connective, or flip a lone literal), which the world-derived answer
    undoes, or the operands are swapped.
    """
    if formula.connective == CONNECTIVE_LIT:
        lit = formula.literals[0]
        return Formula(CONNECTIVE_LIT, (Literal(lit.index, not lit.negated),))
    swap = Formula(formula.connective, (formula.literals[1], formula.literals[0]))
    flipped = tuple(Literal(lit.index, not lit.negated) for lit in formula.literals)
    other = CONNECTIVE_OR if formula.connective == CONNECTIVE_AND else CONNECTIVE_AND
    de_morgan = Formula(other, flipped)
    return swap if rng.integers(2) == 0 else de_morgan


_RELATED_KINDS = (
    RelationKind.NECESSARY_FOR,
    RelationKind.EQUIVALENT,
    RelationKind.SUFFICIENT_FOR,
)


def _draw_kind(rng, related_only: bool) -> RelationKind:
    kinds = list(TARGET_RELATION_MIX)
    probs = np.array([TARGET_RELATION_MIX[k] for k in kinds])
    if related_only:
        kinds = [k for k in kinds if k is not RelationKind.UNRELATED]
        probs = np.array([TARGET_RELATION_MIX[k] for k in kinds])
        probs = probs / probs.sum()
    return kinds[int(rng.choice(len(kinds), p=probs))]


def _sample_slot(
    rng,
    n_attr: int,
    world: World,
    existing: List[Formula],
    target: Optional[RelationKind],
    force_related: bool,
    max_attempts: int,
) -> Tuple[Formula, Formula, RelationKind]:
    """One accepted query pair, oracle-verified, honoring the target kind."""
    for _ in range(max_attempts):
        if target is RelationKind.EQUIVALENT:
            f_a = _random_formula(rng, n_attr)
            f_b = _equivalent_partner(rng, f_a)
        elif target in (RelationKind.SUFFICIENT_FOR, RelationKind.NECESSARY_FOR):
            f_a, f_b = _related_proposal(rng, n_attr)
        elif target is RelationKind.UNRELATED:
            f_a, f_b = _random_formula(rng, n_attr), _random_formula(rng, n_attr)
        elif rng.random() < _FREE_RELATED_PROPOSAL:
            f_a, f_b = _related_proposal(rng, n_attr)
        else:
            f_a, f_b = _random_formula(rng, n_attr), _random_formula(rng, n_attr)

        if f_a == f_b or f_a in existing or f_b in existing:
            continue
        kind = oracle_relation(
            f_a, _answer_for(f_a, world), f_b, _answer_for(f_b, world), n_attr
        )
        if target is None:
            if force_related and kind is RelationKind.UNRELATED:
                continue
            return f_a, f_b, kind
        if kind is target:
            return f_a, f_b, kind
        # A one-way implication the wrong way round is the target seen from
        # the other side, so swap the pair.
        if {kind, target} == {RelationKind.SUFFICIENT_FOR, RelationKind.NECESSARY_FOR}:
            return f_b, f_a, target
    raise InfeasibleError(
        f"gave up after {max_attempts} attempts sampling a "
        f"{'related' if target is None else target.name} pair for world {world.id!r}"
    )


def generate(
    seed: int,
    n_worlds: int = 50,
    n_attr: int = 12,
    queries_per_world: int = 8,
    match_relation_mix: bool = False,
    max_attempts: int = 1000,
) -> SyntheticDataset:
    """Build a deterministic dataset of worlds, queries, and verified relations.

    Queries come in pairs; each pair gets one relation record whose kind the
    exhaustive oracle confirmed.  Every world ends up with at least one
    arrow-producing pair.  With `match_relation_mix` the target kind of each
    pair is drawn from TARGET_RELATION_MIX before sampling.
    """
    if not 1 <= n_attr <= MAX_ATTRIBUTES:
        raise ValueError(f"n_attr must lie in [1, {MAX_ATTRIBUTES}], got {n_attr}")
    if n_worlds < 1:
        raise ValueError(f"n_worlds must be positive, got {n_worlds}")
    if queries_per_world < 2:
        raise ValueError(f"queries_per_world must be at least 2, got {queries_per_world}")

    rng = np.random.default_rng(seed)
    worlds: List[World] = []
    queries: List[Query] = []
    relations: List[RelationRecord] = []

    for w_idx in range(n_worlds):
        world = World(
            id=f"w{w_idx:04d}",
            attributes=tuple(int(b) for b in rng.integers(0, 2, n_attr)),
        )
        worlds.append(world)
        formulas: List[Formula] = []
        has_related = False
        n_slots = queries_per_world // 2
        for slot in range(n_slots):
            last_chance = slot == n_slots - 1 and not has_related
            if match_relation_mix:
                target = _draw_kind(rng, related_only=last_chance)
                force_related = False
            else:
                target = None
                force_related = last_chance
            f_a, f_b, kind = _sample_slot(
                rng, n_attr, world, formulas, target, force_related, max_attempts
            )
            ids = []
            for formula in (f_a, f_b):
                query = Query(
                    id=f"{world.id}q{len(formulas):02d}",
                    world_id=world.id,
                    formula=formula,
                    answer=_answer_for(formula, world),
                )
                formulas.append(formula)
                queries.append(query)
                ids.append(query.id)
            relations.append(RelationRecord(world.id, ids[0], ids[1], kind))
            if kind is not RelationKind.UNRELATED:
                has_related = True
        if queries_per_world % 2:
            for _ in range(max_attempts):
                extra = _random_formula(rng, n_attr)
                if extra not in formulas:
                    break
            else:
                raise InfeasibleError(f"no fresh formula left for world {world.id!r}")
            queries.append(
                Query(
                    id=f"{world.id}q{len(formulas):02d}",
                    world_id=world.id,
                    formula=extra,
                    answer=_answer_for(extra, world),
                )
            )
            formulas.append(extra)

    return SyntheticDataset(
        n_attr=n_attr,
        worlds=tuple(worlds),
        queries=tuple(queries),
        relations=tuple(relations),
    )
