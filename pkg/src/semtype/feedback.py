"""The demonstration-driven adaptation loop.

One corrected (or approved) column is a demonstration: labeling functions
are read off its profile and context, swept over the source corpus to mint
weakly labeled training data, and the tenant's local model is retrained.
Local influence on final predictions grows with each confirmation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING

from .classifier import ORIGIN_GENERATED, LabeledExample, TrainConfig
from .embeddings import EmbeddingStore
from .errors import NotFoundError, ValidationError
from .features import extract_features
from .labeling import (
    DIRECTION_LEFT,
    DIRECTION_RIGHT,
    CoOccurrence,
    HeaderToken,
    LabelingFunction,
    LfVote,
    NumericRange,
    TableContext,
    UniqueRatioBand,
    ValueSet,
    evaluate_lf,
)
from .ontology import UNKNOWN_TYPE_ID, Ontology
from .pipeline import OUTCOME_CORRECTION, OUTCOME_LOCAL_CONFIRMED, update_weights
from .tables import PRIMITIVE_EMPTY, PRIMITIVE_NUMERIC, Column, ColumnProfile, Table, profile_column
from .textnorm import normalize_name, tokenize

if TYPE_CHECKING:  # pragma: no cover
    from .state import GlobalState, TenantState

KIND_EXPLICIT_CORRECTION = "explicit_correction"
KIND_EXPLICIT_APPROVAL = "explicit_approval"
KIND_IMPLICIT_APPROVAL = "implicit_approval"
FEEDBACK_KINDS = (KIND_EXPLICIT_CORRECTION, KIND_EXPLICIT_APPROVAL, KIND_IMPLICIT_APPROVAL)

DEFAULT_STD_BAND = 1.0  # half-width of the mean +/- std range, in stds
DEFAULT_MIN_VOTES = 2
DEFAULT_GENERATION_CAP = 200
WEAK_EXAMPLE_WEIGHT = 0.5
RETRAIN_EVERY_EXAMPLES = 10


@dataclass(frozen=True)
class FeedbackEvent:
    event_id: str
    tenant_id: str
    table_id: str
    column_index: int
    predicted_type: str
    asserted_type: str
    kind: str
    timestamp: float = 0.0

    def __post_init__(self):
        if self.kind not in FEEDBACK_KINDS:
            raise ValidationError(f"unknown feedback kind: {self.kind!r}")
        if self.kind == KIND_EXPLICIT_CORRECTION and self.asserted_type == self.predicted_type:
            raise ValidationError("a correction must assert a different type")
        if self.kind != KIND_EXPLICIT_CORRECTION and self.asserted_type != self.predicted_type:
            raise ValidationError("an approval must assert the predicted type")

    def to_json_dict(self) -> dict:
        return {
            "event_id": self.event_id,
            "tenant_id": self.tenant_id,
            "table_id": self.table_id,
            "column_index": self.column_index,
            "predicted_type": self.predicted_type,
            "asserted_type": self.asserted_type,
            "kind": self.kind,
            "timestamp": self.timestamp,
        }


def event_from_dict(d: dict) -> FeedbackEvent:
    return FeedbackEvent(
        event_id=d["event_id"],
        tenant_id=d.get("tenant_id", ""),
        table_id=d["table_id"],
        column_index=int(d["column_index"]),
        predicted_type=d["predicted_type"],
        asserted_type=d["asserted_type"],
        kind=d["kind"],
        timestamp=float(d.get("timestamp", 0.0)),
    )


@dataclass
class AdaptationReport:
    """What one feedback event changed."""

    event_id: str
    new_lfs: list[LabelingFunction] = field(default_factory=list)
    n_generated: int = 0
    retrained: bool = False
    weight_updates: dict[str, float] = field(default_factory=dict)  # type -> new w_local

    def to_json_dict(self) -> dict:
        from .labeling import lf_to_dict

        return {
            "event_id": self.event_id,
            "new_lfs": [lf_to_dict(lf) for lf in self.new_lfs],
            "n_generated": self.n_generated,
            "retrained": self.retrained,
            "weight_updates": dict(sorted(self.weight_updates.items())),
        }


def infer_labeling_functions(
    column: Column,
    profile: ColumnProfile,
    context: TableContext,
    asserted_type: str,
    *,
    std_band: float = DEFAULT_STD_BAND,
    provenance: str = "",
) -> list[LabelingFunction]:
    """Read weak rules off a demonstrated column.

    Numeric columns yield two range functions (mean +/- std and observed
    min..max); other non-empty columns yield a frequent-value set and a
    unique-ratio band. Header tokens and confidently typed neighbors always
    become functions when available.
    """
    lfs: list[LabelingFunction] = []
    counter = 0

    def add(body) -> None:
        nonlocal counter
        lfs.append(
            LabelingFunction(
                lf_id=f"lf:{provenance or asserted_type}:{counter}",
                type_id=asserted_type,
                body=body,
                provenance=provenance,
            )
        )
        counter += 1

    if column.primitive == PRIMITIVE_NUMERIC and profile.numeric_stats is not None:
        ns = profile.numeric_stats
        add(NumericRange(ns.mean - std_band * ns.std, ns.mean + std_band * ns.std))
        add(NumericRange(ns.min, ns.max))
    elif column.primitive != PRIMITIVE_EMPTY and profile.top_values:
        add(ValueSet(frozenset(v for v, _ in profile.top_values), 0.5))
        r = profile.unique_ratio
        add(UniqueRatioBand(0.5 * r, min(1.0, 1.5 * r)))

    tokens = tokenize(context.header)
    if tokens:
        add(HeaderToken(frozenset(tokens)))
    if context.left_type and context.left_type != UNKNOWN_TYPE_ID:
        add(CoOccurrence(context.left_type, DIRECTION_LEFT))
    if context.right_type and context.right_type != UNKNOWN_TYPE_ID:
        add(CoOccurrence(context.right_type, DIRECTION_RIGHT))
    return lfs


def corpus_context(table: Table, column_index: int, ontology: Ontology) -> TableContext:
    """Context for a corpus column: neighbor types from resolvable headers."""

    def resolve(idx: int) -> str | None:
        if 0 <= idx < len(table.columns):
            found = ontology.resolve_name(table.columns[idx].header)
            return found.id if found else None
        return None

    return TableContext(
        header=table.columns[column_index].header,
        left_type=resolve(column_index - 1),
        right_type=resolve(column_index + 1),
    )


def generate_training_data(
    corpus: list[Table],
    lfs: list[LabelingFunction],
    min_votes: int = DEFAULT_MIN_VOTES,
    cap: int = DEFAULT_GENERATION_CAP,
    *,
    store: EmbeddingStore,
    ontology: Ontology,
    skip: set[tuple[str, int]] | None = None,
) -> list[LabeledExample]:
    """Corpus columns matched by at least ``min_votes`` functions become
    weakly labeled examples for the functions' target type.

    Scan order is deterministic (table order, then column order); ``skip``
    excludes columns (e.g. the demonstration itself).
    """
    if min_votes < 1:
        raise ValidationError(f"min_votes must be >= 1, got {min_votes}")
    if not lfs:
        return []
    targets = {lf.type_id for lf in lfs}
    if len(targets) != 1:
        raise ValidationError("all labeling functions must target the same type")
    (target,) = targets
    skip = skip or set()
    out: list[LabeledExample] = []
    for table in corpus:
        for idx, column in enumerate(table.columns):
            if len(out) >= cap:
                return out
            if (table.table_id, idx) in skip:
                continue
            profile = profile_column(column)
            context = corpus_context(table, idx, ontology)
            votes = sum(
                1 for lf in lfs if evaluate_lf(lf, column, profile, context) is LfVote.MATCH
            )
            if votes >= min_votes:
                out.append(
                    LabeledExample(
                        features=extract_features(column, profile, store),
                        type_id=target,
                        weight=WEAK_EXAMPLE_WEIGHT,
                        origin=ORIGIN_GENERATED,
                    )
                )
    return out


def process_feedback(
    tenant: "TenantState",
    global_state: "GlobalState",
    event: FeedbackEvent,
    table: Table,
    corpus: list[Table],
    *,
    context: TableContext | None = None,
    min_votes: int = DEFAULT_MIN_VOTES,
    generation_cap: int = DEFAULT_GENERATION_CAP,
    train_config: TrainConfig | None = None,
) -> AdaptationReport:
    """Apply one feedback event to a tenant's state.

    Corrections register the asserted type (growing the tenant's type
    overlay if needed), infer and register labeling functions, generate weak
    training data from the corpus, and retrain the local classifier.
    Approvals record the label and bump weight counters; retraining then
    happens every few accumulated examples. Duplicate event ids return the
    original report without re-applying.
    """
    if event.event_id in tenant.reports:
        return tenant.reports[event.event_id]
    if not (0 <= event.column_index < len(table.columns)):
        raise NotFoundError(
            f"table {table.table_id!r} has no column {event.column_index}"
        )
    if not normalize_name(event.asserted_type):
        raise ValidationError("asserted type normalizes to empty")

    column = table.columns[event.column_index]
    profile = profile_column(column)
    effective = tenant.effective_ontology(global_state.ontology)

    report = AdaptationReport(event_id=event.event_id)

    if event.kind == KIND_EXPLICIT_CORRECTION:
        resolved = effective.resolve_name(event.asserted_type)
        if resolved is None:
            stype = tenant.add_user_type(event.asserted_type, global_state.ontology)
        else:
            stype = resolved
        asserted_id = stype.id

        if context is None:
            context = TableContext(header=column.header)
        lfs = infer_labeling_functions(
            column, profile, context, asserted_id, provenance=event.event_id
        )
        for lf in lfs:
            tenant.register_lf(lf)
        report.new_lfs = lfs

        generated = generate_training_data(
            corpus,
            lfs,
            min_votes,
            generation_cap,
            store=global_state.embeddings,
            ontology=tenant.effective_ontology(global_state.ontology),
            skip={(event.table_id, event.column_index)},
        )
        tenant.weak_examples.extend(generated)
        report.n_generated = len(generated)

        tenant.record_label(event.table_id, event.column_index, asserted_id, column, profile,
                            global_state.embeddings)
        tenant.weights = update_weights(tenant.weights, asserted_id, OUTCOME_CORRECTION)
        tenant.retrain_local(train_config)
        report.retrained = True
        report.weight_updates = {asserted_id: tenant.weights.w_local(asserted_id)}
    else:
        resolved = effective.resolve_name(event.asserted_type) or effective.get(
            event.asserted_type
        )
        if resolved is None:
            raise ValidationError(
                f"approved type {event.asserted_type!r} is not in the ontology"
            )
        asserted_id = resolved.id
        tenant.record_label(event.table_id, event.column_index, asserted_id, column, profile,
                            global_state.embeddings)
        tenant.weights = update_weights(tenant.weights, asserted_id, OUTCOME_LOCAL_CONFIRMED)
        if tenant.examples_since_retrain >= RETRAIN_EVERY_EXAMPLES:
            tenant.retrain_local(train_config)
            report.retrained = True
        report.weight_updates = {asserted_id: tenant.weights.w_local(asserted_id)}

    tenant.reports[event.event_id] = report
    return report
