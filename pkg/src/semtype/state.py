"""In-memory model state: one shared global model, one overlay per tenant.

Tenant state is fully reconstructible from its feedback event log (the
store owns persistence); everything here is deterministic so replay gives
byte-identical snapshots.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .classifier import (
    ORIGIN_FEEDBACK_TABLE,
    ClassifierParams,
    LabeledExample,
    TrainConfig,
    params_from_dict,
    params_to_dict,
    train,
)
from .embeddings import EmbeddingStore
from .errors import ValidationError
from .labeling import LabelingFunction, lf_from_dict, lf_to_dict
from .lookup import (
    ORIGIN_FEEDBACK_LOCAL,
    Dictionary,
    LabelingFunctionRef,
    LookupRule,
    Regex,
    RuleRegistry,
)
from .ontology import UNKNOWN_TYPE_ID, Ontology, SemanticType
from .pipeline import ModelState, ModelWeights, PipelineConfig
from .tables import Column, ColumnProfile
from .features import extract_features

SNAPSHOT_FORMAT = 1


def canonical_json(obj) -> bytes:
    """Stable byte serialization used for snapshots and golden comparisons."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=True).encode(
        "utf-8"
    )


@dataclass
class GlobalState:
    """Shared, read-only model state; swapped atomically on admin reload."""

    ontology: Ontology
    embeddings: EmbeddingStore
    rules: RuleRegistry = field(default_factory=RuleRegistry)
    params: ClassifierParams | None = None
    config: PipelineConfig = field(default_factory=PipelineConfig)
    revision: int = 1


def clone_with_user_types(base: Ontology, user_names: list[str]) -> Ontology:
    """Effective tenant ontology: the global types plus the user overlay."""
    out = Ontology()
    for stype in base.types.values():
        if stype.id == UNKNOWN_TYPE_ID:
            continue
        out._register(stype)
    out.version = base.version
    for name in user_names:
        out.add_user_type(name)
    return out


class TenantState:
    """Everything one tenant has taught the system."""

    def __init__(self, tenant_id: str):
        self.tenant_id = tenant_id
        self.user_type_names: list[str] = []
        self.lf_registry: dict[str, LabelingFunction] = {}
        self.local_rules = RuleRegistry()
        self.weights = ModelWeights()
        # (table_id, column_index) -> asserted/approved type id
        self.column_labels: dict[tuple[str, int], str] = {}
        # same key -> feedback-table example; insertion order is training order
        self.feedback_examples: dict[tuple[str, int], LabeledExample] = {}
        self.weak_examples: list[LabeledExample] = []
        self.examples_since_retrain = 0
        self.classifier_params: ClassifierParams | None = None
        self.reports: dict[str, object] = {}  # event_id -> AdaptationReport

    # -- feedback plumbing -------------------------------------------------

    def effective_ontology(self, global_ontology: Ontology) -> Ontology:
        return clone_with_user_types(global_ontology, self.user_type_names)

    def add_user_type(self, name: str, global_ontology: Ontology) -> SemanticType:
        effective = self.effective_ontology(global_ontology)
        existing = effective.resolve_name(name)
        if existing is not None:
            return existing
        self.user_type_names.append(name)
        effective = self.effective_ontology(global_ontology)
        resolved = effective.resolve_name(name)
        assert resolved is not None
        return resolved

    def local_ontology(self) -> Ontology | None:
        """Mini-ontology of just the tenant's user types, for local matching."""
        if not self.user_type_names:
            return None
        out = Ontology()
        for name in self.user_type_names:
            out.add_user_type(name)
        return out

    def register_lf(self, lf: LabelingFunction) -> None:
        if lf.lf_id in self.lf_registry:
            raise ValidationError(f"duplicate labeling function id: {lf.lf_id!r}")
        self.lf_registry[lf.lf_id] = lf
        self.local_rules.register(
            LookupRule(
                rule_id=f"rule:{lf.lf_id}",
                type_id=lf.type_id,
                body=LabelingFunctionRef(lf.lf_id),
                origin=ORIGIN_FEEDBACK_LOCAL,
            )
        )

    def record_label(
        self,
        table_id: str,
        column_index: int,
        type_id: str,
        column: Column,
        profile: ColumnProfile,
        store: EmbeddingStore,
    ) -> None:
        key = (table_id, column_index)
        self.column_labels[key] = type_id
        self.feedback_examples[key] = LabeledExample(
            features=extract_features(column, profile, store),
            type_id=type_id,
            weight=1.0,
            origin=ORIGIN_FEEDBACK_TABLE,
        )
        self.examples_since_retrain += 1

    def accumulated_examples(self) -> list[LabeledExample]:
        return list(self.feedback_examples.values()) + list(self.weak_examples)

    def retrain_local(self, config: TrainConfig | None = None) -> None:
        examples = self.accumulated_examples()
        self.examples_since_retrain = 0
        if not examples:
            self.classifier_params = None
            return
        labels = sorted({ex.type_id for ex in examples} | {UNKNOWN_TYPE_ID})
        self.classifier_params = train(examples, labels, config or TrainConfig())

    def n_events(self) -> int:
        return len(self.reports)

    # -- pipeline view -----------------------------------------------------

    def model_state(self, global_state: GlobalState) -> ModelState:
        return ModelState(
            ontology=global_state.ontology,
            embeddings=global_state.embeddings,
            global_rules=global_state.rules.as_list(),
            global_params=global_state.params,
            local_ontology=self.local_ontology(),
            local_rules=self.local_rules.as_list(),
            local_params=self.classifier_params,
            lf_registry=self.lf_registry,
            weights=self.weights,
        )

    # -- snapshots ----------------------------------------------------------

    def to_snapshot(self) -> bytes:
        payload = {
            "format": SNAPSHOT_FORMAT,
            "tenant_id": self.tenant_id,
            "user_types": list(self.user_type_names),
            "lfs": [lf_to_dict(lf) for lf in self.lf_registry.values()],
            "local_rules": [_rule_to_dict(r) for r in self.local_rules.as_list()],
            "weights": {
                "counts": dict(sorted(self.weights.feedback_counts.items())),
                "prior_strength": self.weights.prior_strength,
            },
            "column_labels": [
                [tid, idx, label] for (tid, idx), label in self.column_labels.items()
            ],
            "feedback_examples": [
                [tid, idx, _example_to_dict(ex)]
                for (tid, idx), ex in self.feedback_examples.items()
            ],
            "weak_examples": [_example_to_dict(ex) for ex in self.weak_examples],
            "examples_since_retrain": self.examples_since_retrain,
            "classifier": params_to_dict(self.classifier_params)
            if self.classifier_params
            else None,
            "reports": [
                [event_id, report.to_json_dict()]
                for event_id, report in self.reports.items()
            ],
        }
        return canonical_json(payload)

    @classmethod
    def from_snapshot(cls, data: bytes) -> "TenantState":
        from .feedback import AdaptationReport

        payload = json.loads(data.decode("utf-8"))
        if payload.get("format") != SNAPSHOT_FORMAT:
            raise ValidationError(f"unsupported snapshot format: {payload.get('format')!r}")
        state = cls(payload["tenant_id"])
        state.user_type_names = list(payload["user_types"])
        for lf_payload in payload["lfs"]:
            state.lf_registry[lf_payload["lf_id"]] = lf_from_dict(lf_payload)
        for rule_payload in payload["local_rules"]:
            state.local_rules.register(_rule_from_dict(rule_payload))
        state.weights = ModelWeights(
            feedback_counts={k: int(v) for k, v in payload["weights"]["counts"].items()},
            prior_strength=int(payload["weights"]["prior_strength"]),
        )
        for tid, idx, label in payload["column_labels"]:
            state.column_labels[(tid, int(idx))] = label
        for tid, idx, ex in payload["feedback_examples"]:
            state.feedback_examples[(tid, int(idx))] = _example_from_dict(ex)
        state.weak_examples = [_example_from_dict(ex) for ex in payload["weak_examples"]]
        state.examples_since_retrain = int(payload["examples_since_retrain"])
        if payload["classifier"] is not None:
            state.classifier_params = params_from_dict(payload["classifier"])
        for event_id, report_payload in payload["reports"]:
            state.reports[event_id] = AdaptationReport(
                event_id=report_payload["event_id"],
                new_lfs=[lf_from_dict(d) for d in report_payload["new_lfs"]],
                n_generated=report_payload["n_generated"],
                retrained=report_payload["retrained"],
                weight_updates=dict(report_payload["weight_updates"]),
            )
        return state


def _example_to_dict(ex: LabeledExample) -> dict:
    return {
        "features": np.asarray(ex.features, dtype=np.float64).tolist(),
        "type_id": ex.type_id,
        "weight": ex.weight,
        "origin": ex.origin,
    }


def _example_from_dict(d: dict) -> LabeledExample:
    return LabeledExample(
        features=np.array(d["features"], dtype=np.float64),
        type_id=d["type_id"],
        weight=float(d["weight"]),
        origin=d["origin"],
    )


def _rule_to_dict(rule: LookupRule) -> dict:
    body = rule.body
    if isinstance(body, Regex):
        payload = {"kind": "regex", "pattern": body.pattern}
    elif isinstance(body, Dictionary):
        payload = {
            "kind": "dictionary",
            "values": sorted(body.values),
            "case_fold": body.case_fold,
        }
    elif isinstance(body, LabelingFunctionRef):
        payload = {"kind": "lf_ref", "lf_id": body.lf_id}
    else:
        raise TypeError(f"unknown rule body: {type(body).__name__}")
    return {
        "rule_id": rule.rule_id,
        "type_id": rule.type_id,
        "origin": rule.origin,
        "body": payload,
    }


def _rule_from_dict(d: dict) -> LookupRule:
    payload = d["body"]
    kind = payload["kind"]
    if kind == "regex":
        body = Regex(payload["pattern"])
    elif kind == "dictionary":
        body = Dictionary(frozenset(payload["values"]), payload["case_fold"])
    elif kind == "lf_ref":
        body = LabelingFunctionRef(payload["lf_id"])
    else:
        raise ValidationError(f"unknown rule body kind: {kind!r}")
    return LookupRule(d["rule_id"], d["type_id"], body, origin=d["origin"])
