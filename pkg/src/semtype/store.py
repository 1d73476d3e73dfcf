"""Persistence and multi-tenant coordination.

On-disk layout::

    <data_dir>/global/{ontology.tsv, embeddings.txt, rules/, params.snap, config.txt}
    <data_dir>/tenants/<id>/{feedback.jsonl, snapshot.snap, tables/}

Tenant state is event-sourced: the feedback log is fsynced before any state
mutation is acknowledged, and replaying it from an empty state reproduces
the snapshot byte for byte.
"""

from __future__ import annotations

import json
import os
import threading
import uuid
from dataclasses import replace
from pathlib import Path

from .classifier import params_from_dict, params_to_dict
from .embeddings import load_embeddings
from .errors import NotFoundError, ParseError, StateError, ValidationError
from .feedback import FeedbackEvent, event_from_dict, process_feedback
from .labeling import TableContext
from .lookup import RuleRegistry, load_dictionary, load_regex_pack
from .ontology import load_ontology
from .pipeline import PipelineConfig, run_pipeline
from .state import GlobalState, TenantState, canonical_json
from .tables import DEFAULT_MAX_ROWS, Table, parse_table

GLOBAL_DIR = "global"
TENANTS_DIR = "tenants"
ONTOLOGY_FILE = "ontology.tsv"
EMBEDDINGS_FILE = "embeddings.txt"
RULES_DIR = "rules"
PARAMS_FILE = "params.snap"
CONFIG_FILE = "config.txt"
FEEDBACK_LOG = "feedback.jsonl"
SNAPSHOT_FILE = "snapshot.snap"
TABLES_DIR = "tables"

DEFAULT_MAX_UPLOAD_BYTES = 8 * 1024 * 1024
SAMPLE_ROW_CAP = 20


def parse_config_text(text: str, base: PipelineConfig | None = None) -> PipelineConfig:
    """Flat ``key=value`` config format mirroring PipelineConfig."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ParseError(f"line {lineno}: expected key=value", line=lineno)
        key, _, value = line.partition("=")
        values[key.strip()] = value.strip()
    base = base or PipelineConfig()
    kwargs = {}
    for key in ("stage_gate", "abstain_threshold", "fuzzy_floor"):
        if key in values:
            kwargs[key] = float(values.pop(key))
    for key in ("top_k", "sample_cap"):
        if key in values:
            kwargs[key] = int(values.pop(key))
    if values:
        raise ValidationError(f"unknown config keys: {sorted(values)}")
    return replace(base, **kwargs)


def load_global_dir(path: Path) -> GlobalState:
    """Load global model state from its directory layout."""
    path = Path(path)
    ontology_path = path / ONTOLOGY_FILE
    if not ontology_path.exists():
        raise StateError(f"missing {ontology_path}")
    ontology = load_ontology(ontology_path.read_bytes())
    embeddings_path = path / EMBEDDINGS_FILE
    if not embeddings_path.exists():
        raise StateError(f"missing {embeddings_path}")
    embeddings = load_embeddings(embeddings_path.read_bytes())

    registry = RuleRegistry()
    rules_dir = path / RULES_DIR
    if rules_dir.is_dir():
        for rule_file in sorted(rules_dir.iterdir()):
            if rule_file.name.endswith(".rules.tsv"):
                for rule in load_regex_pack(rule_file.read_bytes()):
                    registry.register(rule, ontology)
            elif rule_file.name.endswith(".dict.txt"):
                stem = rule_file.name[: -len(".dict.txt")]
                if "--" not in stem:
                    raise StateError(
                        f"dictionary file {rule_file.name!r} must be named "
                        "<rule_id>--<type_id>.dict.txt"
                    )
                rule_id, _, type_id = stem.partition("--")
                registry.register(
                    load_dictionary(rule_file.read_bytes(), rule_id, type_id), ontology
                )

    params = None
    params_path = path / PARAMS_FILE
    if params_path.exists():
        params = params_from_dict(json.loads(params_path.read_text()))

    config = PipelineConfig()
    config_path = path / CONFIG_FILE
    if config_path.exists():
        config = parse_config_text(config_path.read_text())

    return GlobalState(
        ontology=ontology, embeddings=embeddings, rules=registry, params=params, config=config
    )


def init_global_dir(
    path: Path,
    *,
    ontology_bytes: bytes,
    embeddings_bytes: bytes,
    include_builtin_rules: bool = True,
    params=None,
    config_text: str | None = None,
) -> Path:
    """Materialize a global state directory (used by fixtures and demos)."""
    path = Path(path)
    (path / RULES_DIR).mkdir(parents=True, exist_ok=True)
    (path / ONTOLOGY_FILE).write_bytes(ontology_bytes)
    (path / EMBEDDINGS_FILE).write_bytes(embeddings_bytes)
    if include_builtin_rules:
        from importlib import resources

        pkg = resources.files("semtype.data")
        (path / RULES_DIR / "builtin.rules.tsv").write_bytes((pkg / "rules.tsv").read_bytes())
        (path / RULES_DIR / "kb:countries--country.dict.txt").write_bytes(
            (pkg / "countries.txt").read_bytes()
        )
        (path / RULES_DIR / "kb:us_states--us_state.dict.txt").write_bytes(
            (pkg / "us_states.txt").read_bytes()
        )
    if params is not None:
        (path / PARAMS_FILE).write_text(json.dumps(params_to_dict(params)))
    if config_text is not None:
        (path / CONFIG_FILE).write_text(config_text)
    return path


class Store:
    """Event-sourced multi-tenant store over one shared global model."""

    def __init__(self, data_dir: str | Path, *, max_upload_bytes: int = DEFAULT_MAX_UPLOAD_BYTES):
        self.data_dir = Path(data_dir)
        self.max_upload_bytes = max_upload_bytes
        self.global_state = load_global_dir(self.data_dir / GLOBAL_DIR)
        self._tenants: dict[str, TenantState] = {}
        self._tables: dict[tuple[str, str], Table] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()

    # -- tenants -------------------------------------------------------------

    def _tenant_dir(self, tenant_id: str) -> Path:
        if not tenant_id or "/" in tenant_id or tenant_id.startswith("."):
            raise ValidationError(f"bad tenant id: {tenant_id!r}")
        return self.data_dir / TENANTS_DIR / tenant_id

    def _tenant_lock(self, tenant_id: str) -> threading.Lock:
        with self._registry_lock:
            return self._locks.setdefault(tenant_id, threading.Lock())

    def tenant(self, tenant_id: str) -> TenantState:
        state = self._tenants.get(tenant_id)
        if state is not None:
            return state
        snapshot_path = self._tenant_dir(tenant_id) / SNAPSHOT_FILE
        if snapshot_path.exists():
            state = TenantState.from_snapshot(snapshot_path.read_bytes())
        else:
            state = TenantState(tenant_id)
        self._tenants[tenant_id] = state
        return state

    # -- tables ----------------------------------------------------------------

    def upload_table(
        self,
        tenant_id: str,
        data: bytes,
        *,
        delimiter: str = ",",
        has_header: bool = True,
        max_rows: int = DEFAULT_MAX_ROWS,
        name: str = "",
    ) -> Table:
        if len(data) > self.max_upload_bytes:
            raise ValidationError(
                f"upload exceeds {self.max_upload_bytes} bytes", {"oversize": True}
            )
        table_id = uuid.uuid4().hex
        table = parse_table(
            data,
            delimiter=delimiter,
            has_header=has_header,
            max_rows=max_rows,
            table_id=table_id,
            name=name or table_id,
        )
        tables_dir = self._tenant_dir(tenant_id) / TABLES_DIR
        tables_dir.mkdir(parents=True, exist_ok=True)
        (tables_dir / f"{table_id}.csv").write_bytes(data)
        meta = {
            "table_id": table_id,
            "name": table.name,
            "delimiter": delimiter,
            "has_header": has_header,
            "max_rows": max_rows,
            "seq": self._next_table_seq(tenant_id),
        }
        (tables_dir / f"{table_id}.meta.json").write_bytes(canonical_json(meta))
        self._tables[(tenant_id, table_id)] = table
        return table

    def _next_table_seq(self, tenant_id: str) -> int:
        tables_dir = self._tenant_dir(tenant_id) / TABLES_DIR
        if not tables_dir.is_dir():
            return 0
        return sum(1 for p in tables_dir.iterdir() if p.name.endswith(".meta.json"))

    def get_table(self, tenant_id: str, table_id: str) -> Table:
        cached = self._tables.get((tenant_id, table_id))
        if cached is not None:
            return cached
        tables_dir = self._tenant_dir(tenant_id) / TABLES_DIR
        meta_path = tables_dir / f"{table_id}.meta.json"
        csv_path = tables_dir / f"{table_id}.csv"
        if not meta_path.exists() or not csv_path.exists():
            raise NotFoundError(f"no such table: {table_id!r}")
        meta = json.loads(meta_path.read_text())
        table = parse_table(
            csv_path.read_bytes(),
            delimiter=meta["delimiter"],
            has_header=meta["has_header"],
            max_rows=meta["max_rows"],
            table_id=table_id,
            name=meta["name"],
        )
        self._tables[(tenant_id, table_id)] = table
        return table

    def corpus(self, tenant_id: str) -> list[Table]:
        """The tenant's stored tables in upload order: the source corpus that
        weak training data is generated from."""
        tables_dir = self._tenant_dir(tenant_id) / TABLES_DIR
        if not tables_dir.is_dir():
            return []
        metas = []
        for meta_path in tables_dir.iterdir():
            if meta_path.name.endswith(".meta.json"):
                metas.append(json.loads(meta_path.read_text()))
        metas.sort(key=lambda m: (m["seq"], m["table_id"]))
        return [self.get_table(tenant_id, m["table_id"]) for m in metas]

    # -- predictions -----------------------------------------------------------

    def effective_ontology_version(self, tenant_id: str) -> int:
        tenant = self.tenant(tenant_id)
        return self.global_state.ontology.version + len(tenant.user_type_names)

    def model_revision(self, tenant_id: str) -> str:
        tenant = self.tenant(tenant_id)
        return f"g{self.global_state.revision}.e{tenant.n_events()}"

    def predict_table(
        self, tenant_id: str, table_id: str, config: PipelineConfig | None = None
    ) -> dict:
        global_state = self.global_state  # one snapshot for the whole request
        version_before = self.effective_ontology_version(tenant_id)
        table = self.get_table(tenant_id, table_id)
        tenant = self.tenant(tenant_id)
        state = tenant.model_state(global_state)
        predictions = run_pipeline(table, state, config or global_state.config)
        doc = {
            "columns": [p.to_json_dict() for p in predictions],
            "ontology_version": version_before,
            "model_revision": self.model_revision(tenant_id),
        }
        if self.effective_ontology_version(tenant_id) != version_before:
            raise StateError("ontology version changed mid-request", {"retry": True})
        sample_rows = [
            [col.values[i] for col in table.columns]
            for i in range(min(table.n_rows, SAMPLE_ROW_CAP))
        ]
        return {
            "table_id": table_id,
            "headers": table.headers,
            "prediction": doc,
            "sample_rows": sample_rows,
        }

    # -- feedback ---------------------------------------------------------------

    def post_feedback(self, tenant_id: str, event: FeedbackEvent) -> tuple[dict, bool]:
        """Apply one event; returns (report json, created flag).

        The log line is fsynced before state mutation, so an acknowledged
        event survives a crash and replays into the same state.
        """
        with self._tenant_lock(tenant_id):
            tenant = self.tenant(tenant_id)
            if event.event_id in tenant.reports:
                return tenant.reports[event.event_id].to_json_dict(), False
            table = self.get_table(tenant_id, event.table_id)
            if not (0 <= event.column_index < len(table.columns)):
                raise NotFoundError(
                    f"table {event.table_id!r} has no column {event.column_index}"
                )
            # rejected events must never reach the log: replay assumes every
            # logged line applies cleanly
            self._validate_event(tenant, event)
            corpus = self.corpus(tenant_id)
            self._append_log(tenant_id, event, corpus_seq=len(corpus))
            context = self._event_context(tenant, event, table)
            report = process_feedback(
                tenant, self.global_state, event, table, corpus, context=context
            )
            self._write_snapshot(tenant)
            return report.to_json_dict(), True

    def _validate_event(self, tenant: TenantState, event: FeedbackEvent) -> None:
        from .textnorm import normalize_name

        if not normalize_name(event.asserted_type):
            raise ValidationError("asserted type normalizes to empty")
        if event.kind != "explicit_correction":
            effective = tenant.effective_ontology(self.global_state.ontology)
            resolved = effective.resolve_name(event.asserted_type) or effective.get(
                event.asserted_type
            )
            if resolved is None:
                raise ValidationError(
                    f"approved type {event.asserted_type!r} is not in the ontology"
                )

    def _event_context(
        self, tenant: TenantState, event: FeedbackEvent, table: Table
    ) -> TableContext:
        """Neighbor types for LF inference come from current predictions."""
        state = tenant.model_state(self.global_state)
        predictions = run_pipeline(table, state, self.global_state.config)

        def confident(idx: int) -> str | None:
            if 0 <= idx < len(predictions):
                p = predictions[idx]
                if not p.abstained and p.ranked:
                    return p.ranked[0][0]
            return None

        return TableContext(
            header=table.columns[event.column_index].header,
            left_type=confident(event.column_index - 1),
            right_type=confident(event.column_index + 1),
        )

    def _append_log(self, tenant_id: str, event: FeedbackEvent, *, corpus_seq: int) -> None:
        tenant_dir = self._tenant_dir(tenant_id)
        tenant_dir.mkdir(parents=True, exist_ok=True)
        payload = event.to_json_dict()
        # how many tables the corpus held at apply time, so replay sees the
        # same corpus even if tables were uploaded later
        payload["corpus_seq"] = corpus_seq
        line = canonical_json(payload) + b"\n"
        with open(tenant_dir / FEEDBACK_LOG, "ab") as f:
            f.write(line)
            f.flush()
            os.fsync(f.fileno())

    def _write_snapshot(self, tenant: TenantState) -> None:
        tenant_dir = self._tenant_dir(tenant.tenant_id)
        tenant_dir.mkdir(parents=True, exist_ok=True)
        tmp = tenant_dir / (SNAPSHOT_FILE + ".tmp")
        tmp.write_bytes(tenant.to_snapshot())
        os.replace(tmp, tenant_dir / SNAPSHOT_FILE)

    def replay_tenant(self, tenant_id: str, log_path: Path | None = None) -> TenantState:
        """Rebuild tenant state from its feedback log alone (fresh start)."""
        path = log_path or (self._tenant_dir(tenant_id) / FEEDBACK_LOG)
        fresh = TenantState(tenant_id)
        if not Path(path).exists():
            return fresh
        full_corpus = self.corpus(tenant_id)
        with open(path, "rb") as f:
            for lineno, raw in enumerate(f, start=1):
                raw = raw.strip()
                if not raw:
                    continue
                try:
                    payload = json.loads(raw.decode("utf-8"))
                    event = event_from_dict(payload)
                except (json.JSONDecodeError, KeyError, ValidationError) as exc:
                    raise ParseError(f"line {lineno}: bad feedback event: {exc}", line=lineno)
                if event.event_id in fresh.reports:
                    continue
                corpus = full_corpus
                if "corpus_seq" in payload:
                    corpus = full_corpus[: int(payload["corpus_seq"])]
                table = self.get_table(tenant_id, event.table_id)
                context = self._event_context(fresh, event, table)
                process_feedback(
                    fresh, self.global_state, event, table, corpus, context=context
                )
        return fresh

    # -- summaries and admin -----------------------------------------------------

    def state_summary(self, tenant_id: str) -> dict:
        from .labeling import lf_to_dict

        tenant = self.tenant(tenant_id)
        config = self.global_state.config
        weights = {
            type_id: {"count": n, "w_local": tenant.weights.w_local(type_id)}
            for type_id, n in sorted(tenant.weights.feedback_counts.items())
        }
        example_counts: dict[str, int] = {}
        for ex in tenant.accumulated_examples():
            example_counts[ex.origin] = example_counts.get(ex.origin, 0) + 1
        return {
            "tenant_id": tenant_id,
            "weights": weights,
            "prior_strength": tenant.weights.prior_strength,
            "labeling_functions": [lf_to_dict(lf) for lf in tenant.lf_registry.values()],
            "example_counts": dict(sorted(example_counts.items())),
            "user_types": list(tenant.user_type_names),
            "n_events": tenant.n_events(),
            "abstain_threshold": config.abstain_threshold,
            "stage_gate": config.stage_gate,
            "ontology_version": self.effective_ontology_version(tenant_id),
            "model_revision": self.model_revision(tenant_id),
        }

    def ontology_summary(self, tenant_id: str) -> dict:
        tenant = self.tenant(tenant_id)
        effective = tenant.effective_ontology(self.global_state.ontology)
        return {
            "version": effective.version,
            "types": [
                {
                    "id": t.id,
                    "canonical_name": t.canonical_name,
                    "synonyms": list(t.synonyms),
                    "parent_id": t.parent_id,
                    "source": t.source,
                }
                for t in effective.types.values()
            ],
        }

    def reload_global(self, path: str | Path | None = None) -> int:
        """Atomically swap in a freshly loaded global state.

        On any load error the old state keeps serving and the error is
        raised to the caller.
        """
        new_state = load_global_dir(Path(path) if path else self.data_dir / GLOBAL_DIR)
        new_state.revision = self.global_state.revision + 1
        self.global_state = new_state
        return new_state.revision
