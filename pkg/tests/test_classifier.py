import math

import numpy as np
import pytest

from oracles import finite_difference_grads
from semtype.classifier import (
    ClassifierParams,
    LabeledExample,
    TrainConfig,
    loss_and_gradients,
    make_background_examples,
    predict,
    softmax,
    train,
)
from semtype.embeddings import EmbeddingStore
from semtype.errors import TrainingError, ValidationError
from semtype.features import FEATURE_NAMES, N_PROFILE_FEATURES, extract_features
from semtype.ontology import UNKNOWN_TYPE_ID, load_ontology
from semtype.tables import Table, make_column, profile_column


def small_store(dim=2):
    return EmbeddingStore(dim, {"ny": np.array([1.0, 0.0]), "tx": np.array([0.0, 1.0])})


def example(features, label, weight=1.0):
    return LabeledExample(np.asarray(features, dtype=np.float64), label, weight)


class TestFeatures:
    def test_vector_length_is_22_plus_dim(self):
        store = small_store()
        col = make_column("x", ["NY", "TX"])
        vec = extract_features(col, profile_column(col), store)
        assert vec.shape == (N_PROFILE_FEATURES + store.dimension,)
        assert len(FEATURE_NAMES) == N_PROFILE_FEATURES

    def test_empty_column_zero_filled(self):
        store = small_store()
        col = make_column("x", ["", ""])
        vec = extract_features(col, profile_column(col), store)
        assert vec[FEATURE_NAMES.index("numeric_presence")] == 0.0
        assert np.all(vec[N_PROFILE_FEATURES:] == 0.0)
        assert np.all(np.isfinite(vec))

    def test_dominance_two_thirds(self):
        store = small_store()
        col = make_column("x", ["a", "a", "b"])
        vec = extract_features(col, profile_column(col), store)
        assert vec[FEATURE_NAMES.index("top_value_dominance")] == pytest.approx(2 / 3)

    def test_integers_and_unique_ratio(self):
        store = small_store()
        col = make_column("x", ["1", "2", "3"])
        vec = extract_features(col, profile_column(col), store)
        assert vec[FEATURE_NAMES.index("fraction_integer")] == 1.0
        assert vec[FEATURE_NAMES.index("unique_ratio")] == 1.0

    def test_permutation_invariance(self):
        store = small_store()
        values = ["NY", "TX", "NY", "CA", "TX", "NY"]
        a = extract_features(make_column("x", values), profile_column(make_column("x", values)), store)
        rev = list(reversed(values))
        b = extract_features(make_column("x", rev), profile_column(make_column("x", rev)), store)
        assert np.array_equal(a, b)

    def test_value_embedding_mean(self):
        store = small_store()
        col = make_column("x", ["NY", "TX"])
        vec = extract_features(col, profile_column(col), store)
        assert vec[N_PROFILE_FEATURES:] == pytest.approx([0.5, 0.5])


class TestSoftmaxAndPredict:
    def test_uniform_for_zero_params(self):
        params = ClassifierParams(
            labels=("a", "b", UNKNOWN_TYPE_ID),
            weights=np.zeros((3, 2)),
            bias=np.zeros(3),
            train_config=TrainConfig(),
        )
        pred = predict(np.array([1.0, -1.0]), params)
        assert pred.scores == pytest.approx({"a": 1 / 3, "b": 1 / 3, UNKNOWN_TYPE_ID: 1 / 3})

    def test_hand_computed_two_class(self):
        # logits (1, 0) -> (e/(e+1), 1/(e+1)); derived by direct arithmetic
        params = ClassifierParams(
            labels=("a", UNKNOWN_TYPE_ID),
            weights=np.array([[1.0, 0.0], [0.0, 0.0]]),
            bias=np.zeros(2),
            train_config=TrainConfig(),
        )
        pred = predict(np.array([1.0, 0.0]), params)
        e = math.e
        assert pred.scores["a"] == pytest.approx(e / (e + 1), abs=1e-12)
        assert pred.scores[UNKNOWN_TYPE_ID] == pytest.approx(1 / (e + 1), abs=1e-12)

    def test_sums_to_one_within_1e9(self):
        rng = np.random.Generator(np.random.PCG64(3))
        params = ClassifierParams(
            labels=("a", "b", "c", UNKNOWN_TYPE_ID),
            weights=rng.normal(size=(4, 6)) * 5,
            bias=rng.normal(size=4),
            train_config=TrainConfig(),
        )
        for _ in range(20):
            pred = predict(rng.normal(size=6) * 3, params)
            assert abs(sum(pred.scores.values()) - 1.0) < 1e-9
            assert all(p > 0 for p in pred.scores.values())

    def test_argmax_invariant_to_constant_logit_shift(self):
        logits = np.array([0.2, -1.3, 2.5])
        assert np.argmax(softmax(logits)) == np.argmax(softmax(logits + 100.0))

    def test_dimension_mismatch(self):
        params = ClassifierParams(
            labels=("a", UNKNOWN_TYPE_ID),
            weights=np.zeros((2, 3)),
            bias=np.zeros(2),
            train_config=TrainConfig(),
        )
        with pytest.raises(ValidationError):
            predict(np.zeros(4), params)


class TestGradients:
    def test_analytic_matches_finite_differences(self):
        # 20+ random instances, 3 classes x 5 features, central differences
        rng = np.random.Generator(np.random.PCG64(11))
        worst = 0.0
        for _ in range(20):
            X = rng.normal(size=(8, 5))
            y = rng.integers(0, 3, size=8)
            sw = rng.uniform(0.2, 1.0, size=8)
            W = rng.normal(size=(3, 5))
            b = rng.normal(size=3)
            l2 = 1e-3

            _, grad_w, grad_b = loss_and_gradients(W, b, X, y, sw, l2)
            fd_w, fd_b = finite_difference_grads(
                lambda w_, b_: loss_and_gradients(w_, b_, X, y, sw, l2)[0], W, b
            )
            scale = max(np.max(np.abs(fd_w)), np.max(np.abs(fd_b)), 1e-8)
            err = max(np.max(np.abs(grad_w - fd_w)), np.max(np.abs(grad_b - fd_b)))
            worst = max(worst, err / scale)
        assert worst < 1e-4


class TestTraining:
    def separable_examples(self):
        return [
            example([1.0, 0.0], "a"),
            example([0.9, 0.1], "a"),
            example([0.0, 1.0], "b"),
            example([0.1, 0.9], "b"),
        ]

    def test_separable_reaches_training_accuracy_one(self):
        params = train(self.separable_examples(), ["a", "b", UNKNOWN_TYPE_ID])
        for ex in self.separable_examples():
            pred = predict(ex.features, params)
            assert max(pred.scores, key=pred.scores.get) == ex.type_id

    def test_bitwise_reproducible(self):
        a = train(self.separable_examples(), ["a", "b", UNKNOWN_TYPE_ID])
        b = train(self.separable_examples(), ["a", "b", UNKNOWN_TYPE_ID])
        assert np.array_equal(a.weights, b.weights)
        assert np.array_equal(a.bias, b.bias)

    def test_loss_non_increasing_within_jitter(self):
        params = train(self.separable_examples(), ["a", "b", UNKNOWN_TYPE_ID])
        history = params.loss_history
        assert all(later <= earlier + 1e-3 for earlier, later in zip(history, history[1:]))

    def test_l2_shrinks_weights_on_separable_data(self):
        config0 = TrainConfig(l2=0.0, epochs=300)
        config1 = TrainConfig(l2=0.01, epochs=300)
        w0 = train(self.separable_examples(), ["a", "b", UNKNOWN_TYPE_ID], config0)
        w1 = train(self.separable_examples(), ["a", "b", UNKNOWN_TYPE_ID], config1)
        assert np.sum(w1.weights**2) < np.sum(w0.weights**2)

    def test_empty_examples_error(self):
        with pytest.raises(TrainingError):
            train([], ["a", UNKNOWN_TYPE_ID])

    def test_missing_label_examples_error(self):
        with pytest.raises(TrainingError):
            train([example([1.0], "a")], ["a", "b", UNKNOWN_TYPE_ID])

    def test_unknown_may_be_empty(self):
        params = train([example([1.0], "a")], ["a", UNKNOWN_TYPE_ID])
        assert UNKNOWN_TYPE_ID in params.labels

    def test_label_list_must_include_unknown(self):
        with pytest.raises(TrainingError):
            train([example([1.0], "a")], ["a"])

    def test_weight_out_of_range_rejected(self):
        with pytest.raises(ValidationError):
            example([1.0], "a", weight=0.0)


class TestBackground:
    def corpus(self, tiny_ontology):
        t1 = Table(
            "t1",
            "t1",
            ["salary", "qqzz", "city"],
            [
                make_column("salary", ["100", "200", "300"]),
                make_column("qqzz", ["foo", "bar", "baz"]),
                make_column("city", ["NY", "SF", "LA"]),
            ],
        )
        return [t1]

    def test_count_zero_empty(self, tiny_ontology):
        assert make_background_examples([], tiny_ontology, 0, 1, small_store()) == []

    def test_deterministic(self, tiny_ontology):
        corpus = self.corpus(tiny_ontology)
        a = make_background_examples(corpus, tiny_ontology, 6, 5, small_store())
        b = make_background_examples(corpus, tiny_ontology, 6, 5, small_store())
        assert len(a) == len(b) == 6
        for ex_a, ex_b in zip(a, b):
            assert np.array_equal(ex_a.features, ex_b.features)
            assert ex_a.type_id == UNKNOWN_TYPE_ID

    def test_chimera_mixes_source_ranges(self, tiny_ontology):
        # three numeric sources with disjoint ranges; a chimera profile must
        # span more than any single source (verified via the profiler)
        cols = [
            make_column("a", [str(v) for v in range(0, 10)]),
            make_column("b", [str(v) for v in range(100, 110)]),
            make_column("c", [str(v) for v in range(1000, 1010)]),
        ]
        table = Table("t", "t", ["a", "b", "c"], cols)
        examples = make_background_examples([table], tiny_ontology, 8, 3, small_store())
        assert all(ex.type_id == UNKNOWN_TYPE_ID for ex in examples)

    def test_empty_corpus_error(self, tiny_ontology):
        with pytest.raises(TrainingError):
            make_background_examples([], tiny_ontology, 3, 1, small_store())
