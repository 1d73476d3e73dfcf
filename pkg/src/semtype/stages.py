"""Shared vocabulary for pipeline stage outputs."""

from __future__ import annotations

from dataclasses import dataclass, field

STAGE_HEADER = "header"
STAGE_LOOKUP = "lookup"
STAGE_CLASSIFIER = "classifier"
STAGES = (STAGE_HEADER, STAGE_LOOKUP, STAGE_CLASSIFIER)

SIDE_GLOBAL = "global"
SIDE_LOCAL = "local"


@dataclass
class StagePrediction:
    """Per-type confidence scores emitted by one pipeline stage.

    ``scores`` maps type id to a confidence in [0, 1]; an empty map means the
    stage found nothing for this column.
    """

    stage: str
    scores: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        for type_id, conf in self.scores.items():
            if not (0.0 <= conf <= 1.0):
                raise ValueError(f"confidence for {type_id!r} out of [0,1]: {conf}")
