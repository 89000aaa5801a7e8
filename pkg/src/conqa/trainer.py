"""A deliberately small logistic model trained on arrow pairs.

The point is not the model, it is the harness around it: batches are built
from implication arrows, the objective is answer cross entropy plus the
weighted consistency penalty, and every epoch reports held-out accuracy and
consistency so the trade-off between the two is visible.  Features are
corrupted once per dataset by seeded dropout, which keeps accuracy away from
the ceiling and leaves errors for the penalty to act on.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from math import isnan
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import DimensionMismatchError, EmptyGraphError
from .loss import consistency_loss, consistency_loss_grad
from .metric import (
    ConsistencyReport,
    Prediction,
    PredictionSet,
    accuracy,
    build_report,
    consistency_ratio,
    normalize_answer,
)
from .relations import ImplicationArrow, ImplicationGraph, build_graph
from .synth import CONNECTIVES, Query, SyntheticDataset, World

FEATURE_DROPOUT_RATE = 0.3
HELD_OUT_FRACTION = 0.2


@dataclass(frozen=True)
class TrainConfig:
    """Optimization settings; consistency_weight 0 trains on cross entropy alone."""

    consistency_weight: float = 0.0
    learning_rate: float = 0.1
    epochs: int = 50
    batch_pairs: int = 16
    seed: int = 0
    epsilon: float = 1e-7

    def __post_init__(self):
        if self.consistency_weight < 0:
            raise ValueError("consistency_weight must be nonnegative")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.epochs < 1 or self.batch_pairs < 1:
            raise ValueError("epochs and batch_pairs must be at least 1")


@dataclass(eq=False)
class ToyModel:
    """Single logistic unit: weights, bias."""

    weights: np.ndarray
    bias: float


@dataclass(frozen=True)
class EpochMetrics:
    epoch: int
    train_loss: float
    accuracy: float
    consistency: float


@dataclass(frozen=True)
class MetricsHistory:
    """Per-epoch held-out metrics plus the final scored report."""

    epochs: Tuple[EpochMetrics, ...]
    final_report: Optional[ConsistencyReport]

    def as_dict(self) -> dict:
        return {
            "epochs": [
                {
                    "epoch": m.epoch,
                    "train_loss": m.train_loss,
                    "accuracy": m.accuracy,
                    "consistency": None if isnan(m.consistency) else m.consistency,
                }
                for m in self.epochs
            ],
            "final_report": self.final_report.as_dict() if self.final_report else None,
        }


def feature_length(n_attr: int) -> int:
    return 3 * n_attr + 3


def featurize(world: World, query: Query) -> np.ndarray:
    """Deterministic features for one query against one world.

    Layout: the attribute bits, then per attribute a signed indicator of a
    literal testing it (+1 plain, -1 negated), then per attribute whether
    that literal is satisfied by the world, then a connective one-hot.
    """
    n = len(world.attributes)
    formula = query.formula
    if formula.max_index >= n:
        raise DimensionMismatchError(
            f"query {query.id!r} tests attribute {formula.max_index} but world "
            f"{world.id!r} has {n}"
        )
    x = np.zeros(feature_length(n))
    x[:n] = world.attributes
    for lit in formula.literals:
        x[n + lit.index] = -1.0 if lit.negated else 1.0
        if bool(world.attributes[lit.index]) ^ lit.negated:
            x[2 * n + lit.index] = 1.0
    x[3 * n + CONNECTIVES.index(formula.connective)] = 1.0
    return x


def _sigmoid(z):
    return 1.0 / (1.0 + np.exp(-np.clip(z, -60.0, 60.0)))


def predict_prob(model: ToyModel, features: np.ndarray) -> float:
    """Probability the answer is yes; its complement is the probability of no."""
    features = np.asarray(features, dtype=float)
    if features.shape != model.weights.shape:
        raise DimensionMismatchError(
            f"feature vector of length {features.shape} does not match model "
            f"dimension {model.weights.shape}"
        )
    return float(_sigmoid(features @ model.weights + model.bias))


def _chunk(arrows: Sequence[ImplicationArrow], batch_pairs: int, rng) -> List[List[ImplicationArrow]]:
    order = rng.permutation(len(arrows))
    shuffled = [arrows[i] for i in order]
    return [shuffled[i : i + batch_pairs] for i in range(0, len(shuffled), batch_pairs)]


def sample_batches(
    dataset: SyntheticDataset,
    batch_pairs: int,
    seed,
    image_ids=None,
) -> List[List[Tuple[ImplicationArrow, World]]]:
    """Shuffle the dataset's arrows and cut them into batches.

    Each batch entry pairs an arrow with its world.  Every arrow lands in
    exactly one batch; only the last batch may be short.
    """
    if batch_pairs < 1:
        raise ValueError("batch_pairs must be at least 1")
    graph = build_graph(dataset.relations, dataset.propositions())
    arrows = [
        a for a in graph.arrows() if image_ids is None or a.image_id in image_ids
    ]
    if not arrows:
        raise EmptyGraphError("dataset has no implication arrows to batch")
    worlds = dataset.worlds_by_id()
    return [
        [(arrow, worlds[arrow.image_id]) for arrow in batch]
        for batch in _chunk(arrows, batch_pairs, np.random.default_rng(seed))
    ]


def batch_loss_and_grad(
    model: ToyModel,
    features: np.ndarray,
    labels: np.ndarray,
    suff_rows: np.ndarray,
    nec_rows: np.ndarray,
    consistency_weight: float,
    epsilon: float = 1e-7,
) -> Tuple[float, np.ndarray, float]:
    """Joint loss over one batch of arrows and its exact parameter gradient.

    `suff_rows[k]` and `nec_rows[k]` index the feature rows of the k-th
    arrow's two propositions.  The cross-entropy term averages over both
    propositions of every arrow; the penalty term averages over arrows.
    Where a probability hits the clamp the corresponding gradient is zero.
    """
    rows = np.concatenate([suff_rows, nec_rows])
    x = features[rows]
    y = labels[rows]
    z = x @ model.weights + model.bias
    p_yes = _sigmoid(z)
    truth_prob = np.where(y == 1.0, p_yes, 1.0 - p_yes)
    clamped = np.clip(truth_prob, epsilon, 1.0 - epsilon)
    loss = float(np.mean(-np.log(clamped)))
    inside = (truth_prob >= epsilon) & (truth_prob <= 1.0 - epsilon)
    dz = np.where(inside, p_yes - y, 0.0) / len(rows)

    n_pairs = len(suff_rows)
    if consistency_weight > 0 and n_pairs:
        p_suff = truth_prob[:n_pairs]
        p_nec = truth_prob[n_pairs:]
        loss += consistency_weight * float(
            np.mean(consistency_loss(p_suff, p_nec, epsilon))
        )
        g_suff, g_nec = consistency_loss_grad(p_suff, p_nec, epsilon)
        sign = np.where(y == 1.0, 1.0, -1.0)
        slope = p_yes * (1.0 - p_yes)
        dz = dz + consistency_weight * (
            np.concatenate([g_suff, g_nec]) * slope * sign / n_pairs
        )

    return loss, x.T @ dz, float(dz.sum())


class _Indexed:
    """Dataset compiled to arrays: features, labels, and arrow row indices."""

    def __init__(self, dataset: SyntheticDataset, seed: int):
        worlds = dataset.worlds_by_id()
        self.queries = dataset.queries
        self.row_of: Dict[Tuple[str, str], int] = {}
        raw = np.zeros((len(dataset.queries), feature_length(dataset.n_attr)))
        self.labels = np.zeros(len(dataset.queries))
        for k, query in enumerate(dataset.queries):
            raw[k] = featurize(worlds[query.world_id], query)
            self.labels[k] = 1.0 if normalize_answer(query.answer) == "yes" else 0.0
            self.row_of[(query.world_id, query.id)] = k
        drop_rng = np.random.default_rng([seed, 2])
        keep = drop_rng.random(raw.shape) >= FEATURE_DROPOUT_RATE
        self.features = raw * keep

    def arrow_rows(self, arrows: Sequence[ImplicationArrow]):
        suff = np.array(
            [self.row_of[(a.image_id, a.sufficient)] for a in arrows], dtype=int
        )
        nec = np.array(
            [self.row_of[(a.image_id, a.necessary)] for a in arrows], dtype=int
        )
        return suff, nec


def _predictions_for(model, indexed, queries) -> PredictionSet:
    preds = PredictionSet()
    for query in queries:
        row = indexed.row_of[(query.world_id, query.id)]
        p_yes = float(_sigmoid(indexed.features[row] @ model.weights + model.bias))
        answer = "yes" if p_yes >= 0.5 else "no"
        preds._entries[(query.world_id, query.id)] = Prediction(
            image_id=query.world_id,
            prop_id=query.id,
            predicted_answer=answer,
            probability=max(p_yes, 1.0 - p_yes),
        )
    return preds


@dataclass(eq=False)
class TrainResult:
    """Everything a run produced: the model, per-epoch metrics, and the
    held-out predictions with the graph they are scored against."""

    model: ToyModel
    history: MetricsHistory
    predictions: PredictionSet
    eval_graph: ImplicationGraph


def train(dataset: SyntheticDataset, config: TrainConfig) -> TrainResult:
    """Fit the toy model and report held-out metrics each epoch.

    Worlds are split 80/20 into train and held-out by a seeded permutation;
    the returned predictions cover the held-out propositions after the final
    epoch.  All randomness (split, init, dropout, batch order) derives from
    config.seed, so a rerun reproduces everything exactly.
    """
    if len(dataset.worlds) < 2:
        raise ValueError("training needs at least two worlds to hold some out")

    indexed = _Indexed(dataset, config.seed)
    split_rng = np.random.default_rng([config.seed, 0])
    order = split_rng.permutation(len(dataset.worlds))
    n_eval = max(1, int(round(HELD_OUT_FRACTION * len(dataset.worlds))))
    n_eval = min(n_eval, len(dataset.worlds) - 1)
    eval_ids = {dataset.worlds[i].id for i in order[:n_eval]}

    props = dataset.propositions()
    graph = build_graph(dataset.relations, props)
    train_arrows = [a for a in graph.arrows() if a.image_id not in eval_ids]
    if not train_arrows:
        raise EmptyGraphError("no implication arrows left in the training split")
    eval_queries = [q for q in dataset.queries if q.world_id in eval_ids]
    eval_graph = build_graph(
        [r for r in dataset.relations if r.image_id in eval_ids],
        [p for p in props if p.image_id in eval_ids],
    )
    eval_props = [p for p in props if p.image_id in eval_ids]

    init_rng = np.random.default_rng([config.seed, 1])
    model = ToyModel(
        weights=0.01 * init_rng.standard_normal(feature_length(dataset.n_attr)),
        bias=0.0,
    )

    history: List[EpochMetrics] = []
    for epoch in range(config.epochs):
        epoch_rng = np.random.default_rng([config.seed, 3, epoch])
        losses = []
        for batch in _chunk(train_arrows, config.batch_pairs, epoch_rng):
            suff, nec = indexed.arrow_rows(batch)
            loss, grad_w, grad_b = batch_loss_and_grad(
                model,
                indexed.features,
                indexed.labels,
                suff,
                nec,
                config.consistency_weight,
                config.epsilon,
            )
            model.weights = model.weights - config.learning_rate * grad_w
            model.bias = model.bias - config.learning_rate * grad_b
            losses.append(loss)
        preds = _predictions_for(model, indexed, eval_queries)
        if len(eval_graph):
            cons = consistency_ratio(eval_graph, preds)
        else:
            cons = float("nan")
        history.append(
            EpochMetrics(
                epoch=epoch,
                train_loss=float(np.mean(losses)),
                accuracy=accuracy(preds, eval_props),
                consistency=cons,
            )
        )

    report = build_report(eval_graph, preds) if len(eval_graph) else None
    return TrainResult(
        model=model,
        history=MetricsHistory(tuple(history), report),
        predictions=preds,
        eval_graph=eval_graph,
    )


@dataclass(frozen=True)
class SweepResult:
    """Final held-out metrics for one (weight, seed) run."""

    weight: float
    seed: int
    accuracy: float
    consistency: float


def _sweep_task(args) -> SweepResult:
    dataset, config = args
    last = train(dataset, config).history.epochs[-1]
    return SweepResult(
        weight=config.consistency_weight,
        seed=config.seed,
        accuracy=last.accuracy,
        consistency=last.consistency,
    )


def sweep(
    dataset: SyntheticDataset,
    weights: Sequence[float],
    seeds: Sequence[int],
    base_config: Optional[TrainConfig] = None,
    n_jobs: int = 1,
) -> List[SweepResult]:
    """Train once per (consistency weight, seed) and collect final metrics.

    Runs are independent and keyed by (weight, seed); with n_jobs > 1 they
    execute in a process pool and the joined results are identical.
    """
    base = base_config or TrainConfig()
    tasks = [
        (dataset, replace(base, consistency_weight=w, seed=s))
        for w in weights
        for s in seeds
    ]
    if n_jobs > 1:
        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            results = list(pool.map(_sweep_task, tasks))
    else:
        results = [_sweep_task(t) for t in tasks]
    return sorted(results, key=lambda r: (r.weight, r.seed))


@dataclass(frozen=True)
class SweepSummary:
    weight: float
    accuracy_mean: float
    accuracy_std: float
    consistency_mean: float
    consistency_std: float
    n_runs: int


def summarize_sweep(results: Sequence[SweepResult]) -> List[SweepSummary]:
    """Mean and spread of the final metrics per consistency weight."""
    by_weight: Dict[float, List[SweepResult]] = {}
    for res in results:
        by_weight.setdefault(res.weight, []).append(res)
    summaries = []
    for weight in sorted(by_weight):
        runs = by_weight[weight]
        accs = np.array([r.accuracy for r in runs])
        cons = np.array([r.consistency for r in runs])
        ddof = 1 if len(runs) > 1 else 0
        summaries.append(
            SweepSummary(
                weight=weight,
                accuracy_mean=float(accs.mean()),
                accuracy_std=float(accs.std(ddof=ddof)),
                consistency_mean=float(cons.mean()),
                consistency_std=float(cons.std(ddof=ddof)),
                n_runs=len(runs),
            )
        )
    return summaries
