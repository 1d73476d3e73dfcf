"""Staged pipeline orchestration and score blending.

Stages run cheapest-first (header, lookup, classifier); a column whose
blended top confidence reaches the stage gate is frozen and skips the rest.
Global and local variants of each stage run together, are averaged per side,
then blended per type by the local/global weight split. Predictions whose
top confidence falls below the abstention threshold come back as ``unknown``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .classifier import ClassifierParams, predict
from .embeddings import EmbeddingStore
from .errors import StateError, ValidationError
from .features import extract_features
from .headers import match_header
from .labeling import LabelingFunction
from .lookup import LookupRule, apply_lookup, sample_values, table_seed
from .ontology import UNKNOWN_TYPE_ID, Ontology
from .stages import (
    SIDE_GLOBAL,
    SIDE_LOCAL,
    STAGE_CLASSIFIER,
    STAGE_HEADER,
    STAGE_LOOKUP,
    StagePrediction,
)
from .tables import Table, profile_column

OUTCOME_LOCAL_CONFIRMED = "local_confirmed"
OUTCOME_CORRECTION = "correction_recorded"

DEFAULT_PRIOR_STRENGTH = 5
TAU_GRID = [round(i / 100, 2) for i in range(101)]


@dataclass
class ModelWeights:
    """Per-type convex split between the global and local models.

    The local share is ``n / (n + prior_strength)`` where ``n`` counts
    feedback outcomes for the type, so local influence starts at zero and
    grows monotonically with confirmations.
    """

    feedback_counts: dict[str, int] = field(default_factory=dict)
    prior_strength: int = DEFAULT_PRIOR_STRENGTH

    def w_local(self, type_id: str) -> float:
        n = self.feedback_counts.get(type_id, 0)
        return n / (n + self.prior_strength)

    def w_global(self, type_id: str) -> float:
        return 1.0 - self.w_local(type_id)


def update_weights(weights: ModelWeights, type_id: str, outcome: str) -> ModelWeights:
    """Record one feedback outcome for a type; returns a new weight value."""
    if outcome not in (OUTCOME_LOCAL_CONFIRMED, OUTCOME_CORRECTION):
        raise ValidationError(f"unknown weight outcome: {outcome!r}")
    counts = dict(weights.feedback_counts)
    counts[type_id] = counts.get(type_id, 0) + 1
    return ModelWeights(feedback_counts=counts, prior_strength=weights.prior_strength)


@dataclass
class PipelineConfig:
    stage_gate: float = 0.95  # confidence at which earlier stages short-circuit
    abstain_threshold: float = 0.5
    top_k: int = 3
    sample_cap: int = 100
    fuzzy_floor: float = 0.6

    def __post_init__(self):
        for name in ("stage_gate", "abstain_threshold", "fuzzy_floor"):
            v = getattr(self, name)
            if not (0.0 <= v <= 1.0):
                raise ValidationError(f"{name} must be in [0, 1], got {v}")
        if self.top_k < 1:
            raise ValidationError(f"top_k must be >= 1, got {self.top_k}")
        if self.sample_cap < 1:
            raise ValidationError(f"sample_cap must be >= 1, got {self.sample_cap}")


@dataclass
class StageTrace:
    stage: str
    side: str  # global | local
    scores: dict[str, float]


@dataclass
class FinalPrediction:
    column_index: int
    header: str
    ranked: list[tuple[str, float]]  # strictly descending, ties by type id
    abstained: bool
    stage_trace: list[StageTrace]

    @property
    def top(self) -> tuple[str, float] | None:
        return self.ranked[0] if self.ranked else None

    def to_json_dict(self) -> dict:
        return {
            "column_index": self.column_index,
            "header": self.header,
            "ranked": [{"type": t, "confidence": c} for t, c in self.ranked],
            "abstained": self.abstained,
            "stages": [
                {"stage": tr.stage, "side": tr.side, "scores": tr.scores}
                for tr in self.stage_trace
            ],
        }


@dataclass
class ModelState:
    """Everything a pipeline run reads; immutable for the duration of a run."""

    ontology: Ontology
    embeddings: EmbeddingStore
    global_rules: list[LookupRule] = field(default_factory=list)
    global_params: ClassifierParams | None = None
    local_ontology: Ontology | None = None  # tenant user types only
    local_rules: list[LookupRule] = field(default_factory=list)
    local_params: ClassifierParams | None = None
    lf_registry: dict[str, LabelingFunction] = field(default_factory=dict)
    weights: ModelWeights = field(default_factory=ModelWeights)


def combine_scores(
    global_traces: list[StagePrediction],
    local_traces: list[StagePrediction],
    weights: ModelWeights,
    abstain_threshold: float,
    top_k: int,
    *,
    column_index: int = 0,
    header: str = "",
    stage_trace: list[StageTrace] | None = None,
) -> FinalPrediction:
    """Blend executed stage scores into one ranked prediction.

    Per side, a type's score is the mean over that side's executed stages
    (types a stage did not mention count as zero); the sides are then mixed
    by the per-type weight split. The reserved ``unknown`` type never ranks:
    it appears only when the column abstains.
    """
    candidates: set[str] = set()
    for trace in (*global_traces, *local_traces):
        candidates.update(trace.scores)
    candidates.discard(UNKNOWN_TYPE_ID)

    n_global = len(global_traces)
    n_local = len(local_traces)
    blended: dict[str, float] = {}
    for type_id in candidates:
        g = (
            sum(tr.scores.get(type_id, 0.0) for tr in global_traces) / n_global
            if n_global
            else 0.0
        )
        l = (
            sum(tr.scores.get(type_id, 0.0) for tr in local_traces) / n_local
            if n_local
            else 0.0
        )
        score = weights.w_global(type_id) * g + weights.w_local(type_id) * l
        if score > 0.0:
            blended[type_id] = score

    ranked = sorted(blended.items(), key=lambda kv: (-kv[1], kv[0]))[:top_k]
    top_score = ranked[0][1] if ranked else 0.0
    abstained = top_score < abstain_threshold
    if abstained:
        ranked = [(UNKNOWN_TYPE_ID, 1.0 - top_score)]
    return FinalPrediction(
        column_index=column_index,
        header=header,
        ranked=ranked,
        abstained=abstained,
        stage_trace=stage_trace if stage_trace is not None else [],
    )


def _stage_outputs(
    stage: str,
    table: Table,
    column_index: int,
    profiles,
    features_cache,
    state: ModelState,
    config: PipelineConfig,
) -> list[StageTrace]:
    """Run one stage's global and local variants for a column.

    The global variant is always recorded when its machinery exists (header
    matching always does); a local variant is recorded only when it produced
    scores, so absent local machinery does not dilute the local average.
    """
    column = table.columns[column_index]
    out: list[StageTrace] = []
    if stage == STAGE_HEADER:
        g = match_header(
            column.header, state.ontology, state.embeddings, fuzzy_floor=config.fuzzy_floor
        )
        out.append(StageTrace(STAGE_HEADER, SIDE_GLOBAL, g.scores))
        if state.local_ontology is not None and state.local_ontology.real_types():
            loc = match_header(
                column.header,
                state.local_ontology,
                state.embeddings,
                fuzzy_floor=config.fuzzy_floor,
            )
            if loc.scores:
                out.append(StageTrace(STAGE_HEADER, SIDE_LOCAL, loc.scores))
        return out
    if stage == STAGE_LOOKUP:
        sample = sample_values(
            column, config.sample_cap, table_seed(table.table_id, column_index)
        )
        if state.global_rules:
            g = apply_lookup(sample, state.global_rules, state.lf_registry)
            out.append(StageTrace(STAGE_LOOKUP, SIDE_GLOBAL, g.scores))
        if state.local_rules:
            loc = apply_lookup(sample, state.local_rules, state.lf_registry)
            if loc.scores:
                out.append(StageTrace(STAGE_LOOKUP, SIDE_LOCAL, loc.scores))
        return out
    if stage == STAGE_CLASSIFIER:
        feats = features_cache.get(column_index)
        if feats is None:
            feats = extract_features(column, profiles[column_index], state.embeddings)
            features_cache[column_index] = feats
        for params, side in ((state.global_params, SIDE_GLOBAL), (state.local_params, SIDE_LOCAL)):
            if params is None:
                continue
            try:
                pred = predict(feats, params)
            except ValidationError as exc:
                raise StateError(f"classifier state inconsistent: {exc.message}")
            out.append(StageTrace(STAGE_CLASSIFIER, side, pred.scores))
        return out
    raise ValueError(f"unknown stage: {stage!r}")


def run_pipeline(
    table: Table, state: ModelState, config: PipelineConfig | None = None
) -> list[FinalPrediction]:
    """Predict semantic types for every column of a table."""
    config = config or PipelineConfig()
    profiles = [profile_column(col) for col in table.columns]
    features_cache: dict[int, object] = {}
    traces: list[list[StageTrace]] = [[] for _ in table.columns]
    active = set(range(len(table.columns)))

    for stage in (STAGE_HEADER, STAGE_LOOKUP, STAGE_CLASSIFIER):
        if not active:
            break
        for idx in sorted(active):
            traces[idx].extend(
                _stage_outputs(stage, table, idx, profiles, features_cache, state, config)
            )
        # freeze columns that already cleared the gate
        for idx in sorted(active):
            if _top_blended(traces[idx], state.weights) >= config.stage_gate:
                active.discard(idx)

    return [
        _combine_for_column(idx, table, traces[idx], state.weights, config)
        for idx in range(len(table.columns))
    ]


def _top_blended(stage_trace: list[StageTrace], weights: ModelWeights) -> float:
    g = [StagePrediction(t.stage, t.scores) for t in stage_trace if t.side == SIDE_GLOBAL]
    l = [StagePrediction(t.stage, t.scores) for t in stage_trace if t.side == SIDE_LOCAL]
    partial = combine_scores(g, l, weights, abstain_threshold=0.0, top_k=1)
    if partial.ranked and not partial.abstained:
        return partial.ranked[0][1]
    return 0.0


def _combine_for_column(
    idx: int,
    table: Table,
    stage_trace: list[StageTrace],
    weights: ModelWeights,
    config: PipelineConfig,
) -> FinalPrediction:
    g = [StagePrediction(t.stage, t.scores) for t in stage_trace if t.side == SIDE_GLOBAL]
    l = [StagePrediction(t.stage, t.scores) for t in stage_trace if t.side == SIDE_LOCAL]
    return combine_scores(
        g,
        l,
        weights,
        config.abstain_threshold,
        config.top_k,
        column_index=idx,
        header=table.columns[idx].header,
        stage_trace=stage_trace,
    )


@dataclass
class CalibrationResult:
    tau: float
    warning: bool  # True when the target precision is unattainable
    curve: list[dict] = field(default_factory=list)  # per grid point


def calibrate_tau(
    validation: list[tuple[Table, dict[int, str]]],
    state: ModelState,
    config: PipelineConfig,
    target_precision: float,
) -> CalibrationResult:
    """Smallest grid threshold whose surviving predictions hit the target.

    Scans tau over {0, 0.01, ..., 1}; precision is computed over
    non-abstained predictions only. If no grid point qualifies the result is
    tau = 1 (abstain on everything) with the warning flag set.
    """
    if not validation:
        raise ValidationError("validation set must be non-empty")
    if not (0.0 < target_precision <= 1.0):
        raise ValidationError("target precision must be in (0, 1]")
    scored = scored_validation_columns(validation, state, config)
    curve = []
    chosen = None
    for tau in TAU_GRID:
        predicted = [(t, s, gold) for (t, s, gold) in scored if t is not None and s >= tau]
        n_correct = sum(1 for t, _, gold in predicted if t == gold)
        precision = n_correct / len(predicted) if predicted else None
        coverage = len(predicted) / len(scored) if scored else 0.0
        curve.append({"tau": tau, "precision": precision, "coverage": coverage})
        if chosen is None and precision is not None and precision >= target_precision:
            chosen = tau
    if chosen is None:
        return CalibrationResult(tau=1.0, warning=True, curve=curve)
    return CalibrationResult(tau=chosen, warning=False, curve=curve)


def scored_validation_columns(
    validation: list[tuple[Table, dict[int, str]]],
    state: ModelState,
    config: PipelineConfig,
) -> list[tuple[str | None, float, str]]:
    """(top type or None, top blended score, gold label) per labeled column.

    The abstention threshold does not affect blended scores, so one pipeline
    pass supports the whole tau sweep.
    """
    sweep_config = replace(config, abstain_threshold=0.0)
    out = []
    for table, labels in validation:
        predictions = run_pipeline(table, state, sweep_config)
        for idx, gold in sorted(labels.items()):
            pred = predictions[idx]
            if pred.ranked and not pred.abstained:
                out.append((pred.ranked[0][0], pred.ranked[0][1], gold))
            else:
                out.append((None, 0.0, gold))
    return out
