"""Tests for the toy trainer: features, batching, gradients, and the sweep.

The model is a single logistic unit over hand-built features.  Training
splits worlds into train and held-out parts, walks arrow batches with
plain gradient descent, and reports held-out accuracy and consistency
each epoch.  Every random choice is derived from the config seed.
"""

import math

import numpy as np
import pytest

from conqa import (
    DimensionMismatchError,
    EmptyGraphError,
    Formula,
    Literal,
    Query,
    RelationKind,
    RelationRecord,
    SyntheticDataset,
    ToyModel,
    TrainConfig,
    World,
    batch_loss_and_grad,
    build_graph,
    build_report,
    consistency_loss,
    feature_length,
    featurize,
    generate,
    predict_prob,
    sample_batches,
    summarize_sweep,
    sweep,
    train,
)
from conqa.trainer import FEATURE_DROPOUT_RATE, HELD_OUT_FRACTION, SweepResult, _sigmoid


def _lit(index, negated=False):
    return Formula("lit", (Literal(index, negated),))


def _small_dataset(seed=3):
    return generate(seed=seed, n_worlds=10, n_attr=8, queries_per_world=4)


class TestFeaturize:
    def test_length(self):
        assert feature_length(8) == 27
        assert feature_length(12) == 39

    def test_plain_literal_layout(self):
        world = World(id="w", attributes=(0, 0, 0))
        query = Query(id="q", world_id="w", formula=_lit(0), answer="no")
        x = featurize(world, query)
        np.testing.assert_array_equal(
            x, [0, 0, 0, 1, 0, 0, 0, 0, 0, 1, 0, 0]
        )

    def test_negated_literal_satisfaction(self):
        world = World(id="w", attributes=(1, 0, 1))
        formula = Formula("and", (Literal(0, False), Literal(2, True)))
        query = Query(id="q", world_id="w", formula=formula, answer="no")
        x = featurize(world, query)
        np.testing.assert_array_equal(x[:3], [1, 0, 1])
        np.testing.assert_array_equal(x[3:6], [1, 0, -1])
        np.testing.assert_array_equal(x[6:9], [1, 0, 0])
        np.testing.assert_array_equal(x[9:], [0, 1, 0])

    def test_out_of_range_attribute_rejected(self):
        world = World(id="w", attributes=(1, 0))
        query = Query(id="q", world_id="w", formula=_lit(5), answer="yes")
        with pytest.raises(DimensionMismatchError):
            featurize(world, query)

    def test_deterministic(self):
        data = _small_dataset()
        worlds = data.worlds_by_id()
        for query in data.queries[:10]:
            once = featurize(worlds[query.world_id], query)
            again = featurize(worlds[query.world_id], query)
            np.testing.assert_array_equal(once, again)


class TestPredictProb:
    def test_zero_model_is_uncertain(self):
        model = ToyModel(weights=np.zeros(12), bias=0.0)
        assert predict_prob(model, np.ones(12)) == 0.5

    def test_bias_shifts_probability(self):
        model = ToyModel(weights=np.zeros(4), bias=2.0)
        np.testing.assert_allclose(predict_prob(model, np.zeros(4)), _sigmoid(2.0))

    def test_dimension_mismatch_rejected(self):
        model = ToyModel(weights=np.zeros(4), bias=0.0)
        with pytest.raises(DimensionMismatchError):
            predict_prob(model, np.zeros(5))


class TestSampleBatches:
    def test_partitions_all_arrows(self):
        data = _small_dataset()
        graph = build_graph(data.relations, data.propositions())
        batches = sample_batches(data, batch_pairs=4, seed=0)
        seen = [arrow for batch in batches for arrow, _ in batch]
        assert sorted(seen, key=lambda a: (a.image_id, a.sufficient, a.necessary)) == list(
            graph.arrows()
        )

    def test_batch_sizes(self):
        data = _small_dataset()
        batches = sample_batches(data, batch_pairs=4, seed=0)
        assert all(len(b) == 4 for b in batches[:-1])
        assert 1 <= len(batches[-1]) <= 4

    def test_pairs_arrow_with_its_world(self):
        data = _small_dataset()
        for batch in sample_batches(data, batch_pairs=8, seed=1):
            for arrow, world in batch:
                assert isinstance(world, World)
                assert world.id == arrow.image_id

    def test_deterministic_per_seed(self):
        data = _small_dataset()
        assert sample_batches(data, 4, seed=9) == sample_batches(data, 4, seed=9)

    def test_seed_changes_order(self):
        data = _small_dataset()
        assert sample_batches(data, 4, seed=0) != sample_batches(data, 4, seed=1)

    def test_image_filter(self):
        data = _small_dataset()
        keep = {data.worlds[0].id, data.worlds[1].id}
        batches = sample_batches(data, 4, seed=0, image_ids=keep)
        assert {arrow.image_id for b in batches for arrow, _ in b} <= keep

    def test_no_arrows_rejected(self):
        worlds = [World(id="w0", attributes=(1, 0)), World(id="w1", attributes=(0, 1))]
        queries = [
            Query(id="q0", world_id="w0", formula=_lit(0), answer="yes"),
            Query(id="q1", world_id="w0", formula=_lit(1), answer="no"),
        ]
        records = [RelationRecord("w0", "q0", "q1", RelationKind.UNRELATED)]
        data = SyntheticDataset(n_attr=2, worlds=worlds, queries=queries, relations=records)
        with pytest.raises(EmptyGraphError):
            sample_batches(data, 4, seed=0)


class TestBatchLossAndGrad:
    def _setup(self, consistency_weight, seed=17):
        rng = np.random.default_rng(seed)
        n_rows, dim, n_pairs = 12, 9, 5
        features = rng.normal(size=(n_rows, dim))
        labels = rng.integers(0, 2, size=n_rows).astype(float)
        suff = rng.integers(0, n_rows, size=n_pairs)
        nec = rng.integers(0, n_rows, size=n_pairs)
        model = ToyModel(weights=0.3 * rng.normal(size=dim), bias=0.1)
        return model, features, labels, suff, nec, consistency_weight

    def test_pure_cross_entropy_value(self):
        model, features, labels, suff, nec, _ = self._setup(0.0)
        loss, _, _ = batch_loss_and_grad(model, features, labels, suff, nec, 0.0)
        rows = np.concatenate([suff, nec])
        manual = 0.0
        for r in rows:
            p = _sigmoid(features[r] @ model.weights + model.bias)
            truth = p if labels[r] == 1.0 else 1.0 - p
            manual += -math.log(truth)
        np.testing.assert_allclose(loss, manual / len(rows), rtol=1e-12)

    def test_penalty_term_added(self):
        model, features, labels, suff, nec, _ = self._setup(0.0)
        base, _, _ = batch_loss_and_grad(model, features, labels, suff, nec, 0.0)
        full, _, _ = batch_loss_and_grad(model, features, labels, suff, nec, 0.8)
        p = _sigmoid(features @ model.weights + model.bias)
        truth = np.where(labels == 1.0, p, 1.0 - p)
        penalty = float(np.mean(consistency_loss(truth[suff], truth[nec])))
        np.testing.assert_allclose(full, base + 0.8 * penalty, rtol=1e-12)

    @pytest.mark.parametrize("weight", [0.0, 0.7])
    def test_gradient_matches_finite_differences(self, weight):
        model, features, labels, suff, nec, _ = self._setup(weight)
        _, grad_w, grad_b = batch_loss_and_grad(
            model, features, labels, suff, nec, weight
        )

        def loss_at(w, b):
            probe = ToyModel(weights=w, bias=b)
            value, _, _ = batch_loss_and_grad(probe, features, labels, suff, nec, weight)
            return value

        h = 1e-6
        fd_w = np.zeros_like(model.weights)
        for k in range(len(model.weights)):
            step = np.zeros_like(model.weights)
            step[k] = h
            fd_w[k] = (
                loss_at(model.weights + step, model.bias)
                - loss_at(model.weights - step, model.bias)
            ) / (2 * h)
        fd_b = (
            loss_at(model.weights, model.bias + h)
            - loss_at(model.weights, model.bias - h)
        ) / (2 * h)
        np.testing.assert_allclose(grad_w, fd_w, rtol=1e-5, atol=1e-8)
        np.testing.assert_allclose(grad_b, fd_b, rtol=1e-5, atol=1e-8)


class TestTrain:
    def test_deterministic(self):
        data = _small_dataset()
        config = TrainConfig(epochs=5, seed=4)
        first = train(data, config)
        second = train(data, config)
        np.testing.assert_array_equal(first.model.weights, second.model.weights)
        assert first.model.bias == second.model.bias
        assert first.history == second.history
        assert first.predictions == second.predictions

    def test_history_covers_every_epoch(self):
        data = _small_dataset()
        result = train(data, TrainConfig(epochs=7, seed=0))
        epochs = [m.epoch for m in result.history.epochs]
        assert epochs == list(range(7))
        for m in result.history.epochs:
            assert math.isfinite(m.train_loss)
            assert 0.0 <= m.accuracy <= 1.0
            assert math.isnan(m.consistency) or 0.0 <= m.consistency <= 1.0

    def test_final_report_matches_predictions(self):
        data = _small_dataset()
        result = train(data, TrainConfig(epochs=5, seed=1))
        report = build_report(result.eval_graph, result.predictions)
        assert result.history.final_report == report
        last = result.history.epochs[-1]
        assert last.consistency == report.consistency

    def test_held_out_worlds_fraction(self):
        data = generate(seed=0, n_worlds=20, n_attr=8, queries_per_world=4)
        result = train(data, TrainConfig(epochs=2, seed=0))
        eval_worlds = {key[0] for key in result.predictions.keys()}
        assert len(eval_worlds) == round(HELD_OUT_FRACTION * 20)
        assert set(result.predictions.keys()) == set(result.eval_graph.propositions)

    def test_two_worlds_minimum(self):
        data = _small_dataset()
        tiny = SyntheticDataset(
            n_attr=data.n_attr,
            worlds=data.worlds[:1],
            queries=data.queries_for(data.worlds[0].id),
            relations=[r for r in data.relations if r.image_id == data.worlds[0].id],
        )
        with pytest.raises(ValueError):
            train(tiny, TrainConfig(epochs=1))

    def test_matches_reference_loop(self):
        """Rebuild the documented seeding scheme step by step and compare."""
        data = _small_dataset()
        config = TrainConfig(consistency_weight=0.0, epochs=6, seed=2, batch_pairs=4)
        result = train(data, config)

        worlds = data.worlds_by_id()
        raw = np.zeros((len(data.queries), feature_length(data.n_attr)))
        labels = np.zeros(len(data.queries))
        row_of = {}
        for k, query in enumerate(data.queries):
            raw[k] = featurize(worlds[query.world_id], query)
            labels[k] = 1.0 if query.answer == "yes" else 0.0
            row_of[(query.world_id, query.id)] = k
        keep = np.random.default_rng([config.seed, 2]).random(raw.shape) >= FEATURE_DROPOUT_RATE
        features = raw * keep

        order = np.random.default_rng([config.seed, 0]).permutation(len(data.worlds))
        n_eval = max(1, int(round(HELD_OUT_FRACTION * len(data.worlds))))
        eval_ids = {data.worlds[i].id for i in order[:n_eval]}
        graph = build_graph(data.relations, data.propositions())
        arrows = [a for a in graph.arrows() if a.image_id not in eval_ids]

        weights = 0.01 * np.random.default_rng([config.seed, 1]).standard_normal(
            feature_length(data.n_attr)
        )
        bias = 0.0
        model = ToyModel(weights=weights, bias=bias)
        for epoch in range(config.epochs):
            rng = np.random.default_rng([config.seed, 3, epoch])
            perm = rng.permutation(len(arrows))
            shuffled = [arrows[i] for i in perm]
            for start in range(0, len(shuffled), config.batch_pairs):
                batch = shuffled[start : start + config.batch_pairs]
                suff = np.array([row_of[(a.image_id, a.sufficient)] for a in batch])
                nec = np.array([row_of[(a.image_id, a.necessary)] for a in batch])
                _, grad_w, grad_b = batch_loss_and_grad(
                    model, features, labels, suff, nec, 0.0, config.epsilon
                )
                model.weights = model.weights - config.learning_rate * grad_w
                model.bias = model.bias - config.learning_rate * grad_b

        np.testing.assert_array_equal(result.model.weights, model.weights)
        assert result.model.bias == model.bias


class TestSweep:
    def test_covers_grid_sorted(self):
        data = _small_dataset()
        base = TrainConfig(epochs=2)
        results = sweep(data, weights=[0.5, 0.0], seeds=[1, 0], base_config=base)
        assert [(r.weight, r.seed) for r in results] == [
            (0.0, 0),
            (0.0, 1),
            (0.5, 0),
            (0.5, 1),
        ]

    def test_matches_individual_runs(self):
        data = _small_dataset()
        base = TrainConfig(epochs=3)
        results = sweep(data, weights=[0.25], seeds=[2], base_config=base)
        direct = train(data, TrainConfig(consistency_weight=0.25, epochs=3, seed=2))
        last = direct.history.epochs[-1]
        assert results[0].accuracy == last.accuracy
        assert results[0].consistency == last.consistency

    def test_parallel_equals_serial(self):
        data = _small_dataset()
        base = TrainConfig(epochs=2)
        serial = sweep(data, weights=[0.0, 0.1], seeds=[0], base_config=base, n_jobs=1)
        parallel = sweep(data, weights=[0.0, 0.1], seeds=[0], base_config=base, n_jobs=2)
        assert serial == parallel


class TestSummarizeSweep:
    def test_means_and_stds(self):
        results = [
            SweepResult(weight=0.0, seed=0, accuracy=0.6, consistency=0.7),
            SweepResult(weight=0.0, seed=1, accuracy=0.8, consistency=0.9),
            SweepResult(weight=0.1, seed=0, accuracy=0.5, consistency=1.0),
        ]
        rows = summarize_sweep(results)
        assert [r.weight for r in rows] == [0.0, 0.1]
        np.testing.assert_allclose(rows[0].accuracy_mean, 0.7)
        np.testing.assert_allclose(rows[0].accuracy_std, np.std([0.6, 0.8], ddof=1))
        np.testing.assert_allclose(rows[0].consistency_mean, 0.8)
        assert rows[0].n_runs == 2
        assert rows[1].accuracy_std == 0.0
        assert rows[1].n_runs == 1


class TestTrainConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            TrainConfig(consistency_weight=-1.0)
        with pytest.raises(ValueError):
            TrainConfig(learning_rate=0.0)
        with pytest.raises(ValueError):
            TrainConfig(epochs=0)
        with pytest.raises(ValueError):
            TrainConfig(batch_pairs=0)

    def test_defaults(self):
        config = TrainConfig()
        assert config.consistency_weight == 0.0
        assert config.learning_rate == 0.1
        assert config.epochs == 50
        assert config.batch_pairs == 16
