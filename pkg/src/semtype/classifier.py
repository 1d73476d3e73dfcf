"""Multiclass linear softmax classifier over column features.

Trained from scratch by seeded mini-batch gradient descent on weighted
cross-entropy with L2. The label list always includes ``unknown``, and
background examples (out-of-ontology and chimera columns) teach that class
to absorb out-of-distribution columns.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .embeddings import EmbeddingStore
from .errors import DivergenceError, TrainingError, ValidationError
from .features import extract_features
from .ontology import UNKNOWN_TYPE_ID, Ontology
from .stages import STAGE_CLASSIFIER, StagePrediction
from .tables import Table, make_column, profile_column

ORIGIN_SEED_CORPUS = "seed-corpus"
ORIGIN_FEEDBACK_TABLE = "feedback-table"
ORIGIN_GENERATED = "dpbd-generated"
ORIGIN_BACKGROUND = "background"

CHIMERA_ROWS = 30
CHIMERA_MIN_SOURCES = 3


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.1
    epochs: int = 200
    batch_size: int = 32
    l2: float = 1e-4
    seed: int = 7


@dataclass
class LabeledExample:
    features: np.ndarray
    type_id: str
    weight: float = 1.0
    origin: str = ORIGIN_SEED_CORPUS

    def __post_init__(self):
        if not (0.0 < self.weight <= 1.0):
            raise ValidationError(f"example weight must be in (0, 1], got {self.weight}")


@dataclass
class ClassifierParams:
    labels: tuple[str, ...]  # sorted type ids, always includes `unknown`
    weights: np.ndarray  # (n_labels, n_features)
    bias: np.ndarray  # (n_labels,)
    train_config: TrainConfig
    loss_history: list[float] = field(default_factory=list, repr=False)

    @property
    def n_features(self) -> int:
        return self.weights.shape[1]


def softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - np.max(logits, axis=-1, keepdims=True)
    exp = np.exp(shifted)
    return exp / np.sum(exp, axis=-1, keepdims=True)


def loss_and_gradients(
    weights: np.ndarray,
    bias: np.ndarray,
    X: np.ndarray,
    y: np.ndarray,
    sample_weights: np.ndarray,
    l2: float,
) -> tuple[float, np.ndarray, np.ndarray]:
    """Weighted cross-entropy plus 0.5*l2*||W||^2, with analytic gradients.

    Loss is normalized by the total sample weight, so scaling all example
    weights together changes nothing.
    """
    n = X.shape[0]
    probs = softmax(X @ weights.T + bias)
    w_total = float(np.sum(sample_weights))
    log_likelihood = -np.log(np.clip(probs[np.arange(n), y], 1e-300, None))
    loss = float(np.dot(sample_weights, log_likelihood) / w_total)
    loss += 0.5 * l2 * float(np.sum(weights * weights))

    grad_logits = probs
    grad_logits[np.arange(n), y] -= 1.0
    grad_logits *= (sample_weights / w_total)[:, None]
    grad_w = grad_logits.T @ X + l2 * weights
    grad_b = grad_logits.sum(axis=0)
    return loss, grad_w, grad_b


def train(
    examples: list[LabeledExample],
    labels: list[str],
    config: TrainConfig | None = None,
    *,
    allow_empty: tuple[str, ...] = (UNKNOWN_TYPE_ID,),
) -> ClassifierParams:
    """Fit softmax parameters; deterministic given the config seed."""
    config = config or TrainConfig()
    if not examples:
        raise TrainingError("cannot train on an empty example list")
    if UNKNOWN_TYPE_ID not in labels:
        raise TrainingError(f"label list must include {UNKNOWN_TYPE_ID!r}")
    label_order = tuple(sorted(set(labels)))
    label_index = {t: i for i, t in enumerate(label_order)}
    seen = {ex.type_id for ex in examples}
    for label in label_order:
        if label not in seen and label not in allow_empty:
            raise TrainingError(f"label {label!r} has no examples")
    for ex in examples:
        if ex.type_id not in label_index:
            raise TrainingError(f"example labeled {ex.type_id!r} not in label list")

    X = np.stack([np.asarray(ex.features, dtype=np.float64) for ex in examples])
    y = np.array([label_index[ex.type_id] for ex in examples], dtype=np.int64)
    sw = np.array([ex.weight for ex in examples], dtype=np.float64)
    n, n_features = X.shape
    n_labels = len(label_order)

    weights = np.zeros((n_labels, n_features), dtype=np.float64)
    bias = np.zeros(n_labels, dtype=np.float64)
    rng = np.random.Generator(np.random.PCG64(config.seed))
    history: list[float] = []

    for epoch in range(config.epochs):
        order = rng.permutation(n)
        for start in range(0, n, config.batch_size):
            batch = order[start : start + config.batch_size]
            _, grad_w, grad_b = loss_and_gradients(
                weights, bias, X[batch], y[batch], sw[batch], config.l2
            )
            weights -= config.learning_rate * grad_w
            bias -= config.learning_rate * grad_b
        loss, _, _ = loss_and_gradients(weights, bias, X, y, sw, config.l2)
        if not np.isfinite(loss):
            raise DivergenceError(f"training loss diverged at epoch {epoch}", epoch=epoch)
        history.append(loss)

    return ClassifierParams(
        labels=label_order,
        weights=weights,
        bias=bias,
        train_config=config,
        loss_history=history,
    )


def predict(features: np.ndarray, params: ClassifierParams) -> StagePrediction:
    """Softmax probabilities over the trained label list."""
    x = np.asarray(features, dtype=np.float64)
    if x.shape != (params.n_features,):
        raise ValidationError(
            f"feature dimension mismatch: got {x.shape}, expected ({params.n_features},)"
        )
    probs = softmax(params.weights @ x + params.bias)
    return StagePrediction(
        STAGE_CLASSIFIER,
        {label: float(p) for label, p in zip(params.labels, probs)},
    )


def params_to_dict(params: ClassifierParams) -> dict:
    return {
        "labels": list(params.labels),
        "weights": params.weights.tolist(),
        "bias": params.bias.tolist(),
        "train_config": {
            "learning_rate": params.train_config.learning_rate,
            "epochs": params.train_config.epochs,
            "batch_size": params.train_config.batch_size,
            "l2": params.train_config.l2,
            "seed": params.train_config.seed,
        },
    }


def params_from_dict(d: dict) -> ClassifierParams:
    return ClassifierParams(
        labels=tuple(d["labels"]),
        weights=np.array(d["weights"], dtype=np.float64),
        bias=np.array(d["bias"], dtype=np.float64),
        train_config=TrainConfig(**d["train_config"]),
    )


def make_background_examples(
    corpus: list[Table],
    ontology: Ontology,
    count: int,
    seed: int,
    store: EmbeddingStore,
) -> list[LabeledExample]:
    """Build ``unknown``-labeled training examples from a corpus.

    Two sources alternate: (a) columns whose header resolves to nothing in
    the ontology, and (b) chimera columns stitched from values of at least
    three different source columns.
    """
    if count <= 0:
        return []
    usable = [
        col
        for table in corpus
        for col in table.columns
        if col.non_missing()
    ]
    if not usable:
        raise TrainingError("corpus has zero usable columns for background examples")
    out_of_ontology = [
        col
        for col in usable
        if col.header.strip() and ontology.resolve_name(col.header) is None
    ]
    can_chimera = len(usable) >= CHIMERA_MIN_SOURCES
    if not out_of_ontology and not can_chimera:
        raise TrainingError(
            "corpus has no out-of-ontology columns and too few columns for chimeras"
        )
    rng = np.random.Generator(np.random.PCG64(seed))
    examples: list[LabeledExample] = []
    ooo_cursor = 0
    for i in range(count):
        if out_of_ontology and (i % 2 == 0 or not can_chimera):
            column = out_of_ontology[ooo_cursor % len(out_of_ontology)]
            ooo_cursor += 1
        else:
            column = _chimera_column(usable, rng)
        profile = profile_column(column)
        examples.append(
            LabeledExample(
                features=extract_features(column, profile, store),
                type_id=UNKNOWN_TYPE_ID,
                weight=1.0,
                origin=ORIGIN_BACKGROUND,
            )
        )
    return examples


def _chimera_column(usable: list, rng: np.random.Generator):
    n_sources = min(len(usable), int(rng.integers(CHIMERA_MIN_SOURCES, 6)))
    source_idx = rng.choice(len(usable), size=n_sources, replace=False)
    values = []
    for _ in range(CHIMERA_ROWS):
        src = usable[int(source_idx[int(rng.integers(0, n_sources))])]
        pool = src.non_missing()
        values.append(pool[int(rng.integers(0, len(pool)))])
    return make_column("", values)
