"""Precision/coverage measurement over labeled corpora.

A labeled corpus is a directory of CSVs, each with a sidecar
``<name>.labels.tsv`` mapping column indexes to gold type ids. Precision is
computed over non-abstained predictions; coverage is the fraction of labeled
columns that received a prediction at all.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .errors import ParseError, ValidationError
from .pipeline import (
    TAU_GRID,
    ModelState,
    PipelineConfig,
    scored_validation_columns,
)
from .tables import Table, parse_table

LabeledTable = tuple[Table, dict[int, str]]


@dataclass
class EvalReport:
    precision: float | None  # None when nothing was predicted
    coverage: float
    n_columns: int
    n_predicted: int
    n_correct: int
    per_type: dict[str, dict] = field(default_factory=dict)
    confusion: list[dict] = field(default_factory=list)
    abstain_threshold: float = 0.5
    stage_gate: float = 0.95

    def to_json_dict(self) -> dict:
        return {
            "precision": self.precision,
            "coverage": self.coverage,
            "n_columns": self.n_columns,
            "n_predicted": self.n_predicted,
            "n_correct": self.n_correct,
            "per_type": self.per_type,
            "confusion": self.confusion,
            "abstain_threshold": self.abstain_threshold,
            "stage_gate": self.stage_gate,
        }


def load_labeled_corpus(corpus_dir: str | Path) -> list[LabeledTable]:
    """Read every ``*.csv`` with its ``*.labels.tsv`` sidecar."""
    corpus_dir = Path(corpus_dir)
    if not corpus_dir.is_dir():
        raise ValidationError(f"not a corpus directory: {corpus_dir}")
    out: list[LabeledTable] = []
    for csv_path in sorted(corpus_dir.glob("*.csv")):
        labels_path = csv_path.parent / (csv_path.stem + ".labels.tsv")
        table = parse_table(
            csv_path.read_bytes(), table_id=csv_path.stem, name=csv_path.stem
        )
        labels: dict[int, str] = {}
        if labels_path.exists():
            for lineno, raw in enumerate(labels_path.read_text().splitlines(), start=1):
                line = raw.strip()
                if not line or line.startswith("#"):
                    continue
                parts = line.split("\t")
                if len(parts) != 2:
                    raise ParseError(
                        f"{labels_path.name} line {lineno}: expected "
                        "'column_index<TAB>type_id'",
                        line=lineno,
                    )
                labels[int(parts[0])] = parts[1]
        out.append((table, labels))
    return out


def evaluate(
    corpus: list[LabeledTable], state: ModelState, config: PipelineConfig
) -> EvalReport:
    """Score the pipeline against gold labels at the configured threshold."""
    if not any(labels for _, labels in corpus):
        raise ValidationError("corpus has no labeled columns")
    scored = scored_validation_columns(corpus, state, config)
    tau = config.abstain_threshold
    n_total = len(scored)
    n_predicted = 0
    n_correct = 0
    per_type: dict[str, dict] = {}
    confusion: dict[tuple[str, str], int] = {}
    for top_type, top_score, gold in scored:
        stats = per_type.setdefault(
            gold, {"support": 0, "predicted": 0, "correct": 0, "precision": None}
        )
        stats["support"] += 1
        predicted = top_type is not None and top_score >= tau
        if not predicted:
            continue
        n_predicted += 1
        pred_stats = per_type.setdefault(
            top_type, {"support": 0, "predicted": 0, "correct": 0, "precision": None}
        )
        pred_stats["predicted"] += 1
        if top_type == gold:
            n_correct += 1
            pred_stats["correct"] += 1
        else:
            confusion[(gold, top_type)] = confusion.get((gold, top_type), 0) + 1
    for stats in per_type.values():
        if stats["predicted"]:
            stats["precision"] = stats["correct"] / stats["predicted"]
    return EvalReport(
        precision=n_correct / n_predicted if n_predicted else None,
        coverage=n_predicted / n_total if n_total else 0.0,
        n_columns=n_total,
        n_predicted=n_predicted,
        n_correct=n_correct,
        per_type=dict(sorted(per_type.items())),
        confusion=[
            {"gold": gold, "predicted": pred, "count": count}
            for (gold, pred), count in sorted(confusion.items())
        ],
        abstain_threshold=tau,
        stage_gate=config.stage_gate,
    )


def sweep_tau(
    corpus: list[LabeledTable], state: ModelState, config: PipelineConfig
) -> list[dict]:
    """Full precision/coverage curve over the calibration grid."""
    scored = scored_validation_columns(corpus, state, config)
    curve = []
    for tau in TAU_GRID:
        predicted = [(t, s, g) for (t, s, g) in scored if t is not None and s >= tau]
        n_correct = sum(1 for t, _, g in predicted if t == g)
        curve.append(
            {
                "tau": tau,
                "precision": n_correct / len(predicted) if predicted else None,
                "coverage": len(predicted) / len(scored) if scored else 0.0,
            }
        )
    return curve
