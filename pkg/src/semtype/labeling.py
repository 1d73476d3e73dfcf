"""Labeling functions: one-sided weak rules targeting a single type.

An LF looks at a column (and a little table context) and either matches or
abstains; it never votes against. Five body kinds cover what can be read off
a demonstration: numeric ranges, value sets, unique-ratio bands, header
tokens and neighbor-type co-occurrence.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .errors import ValidationError
from .tables import PRIMITIVE_NUMERIC, Column, ColumnProfile, parse_number
from .textnorm import tokenize

# Fraction of non-missing values that must fall inside a numeric range.
NUMERIC_RANGE_COVERAGE = 0.80
HEADER_TOKEN_JACCARD = 0.5

DIRECTION_LEFT = "left"
DIRECTION_RIGHT = "right"
DIRECTION_ANY = "any"


class LfVote(enum.Enum):
    MATCH = "match"
    ABSTAIN = "abstain"


@dataclass(frozen=True)
class NumericRange:
    lo: float
    hi: float

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValidationError(f"numeric range lo > hi: {self.lo} > {self.hi}")


@dataclass(frozen=True)
class ValueSet:
    values: frozenset[str]
    min_overlap_fraction: float = 0.5

    def __post_init__(self):
        if not self.values:
            raise ValidationError("value set must be non-empty")
        if not (0.0 < self.min_overlap_fraction <= 1.0):
            raise ValidationError("min_overlap_fraction must be in (0, 1]")


@dataclass(frozen=True)
class UniqueRatioBand:
    lo: float
    hi: float

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValidationError(f"unique ratio band lo > hi: {self.lo} > {self.hi}")


@dataclass(frozen=True)
class HeaderToken:
    tokens: frozenset[str]

    def __post_init__(self):
        if not self.tokens:
            raise ValidationError("header token set must be non-empty")


@dataclass(frozen=True)
class CoOccurrence:
    neighbor_type_id: str
    direction: str = DIRECTION_ANY

    def __post_init__(self):
        if self.direction not in (DIRECTION_LEFT, DIRECTION_RIGHT, DIRECTION_ANY):
            raise ValidationError(f"bad direction: {self.direction!r}")


LfBody = NumericRange | ValueSet | UniqueRatioBand | HeaderToken | CoOccurrence


@dataclass(frozen=True)
class LabelingFunction:
    lf_id: str
    type_id: str
    body: LfBody
    provenance: str = ""  # feedback event id that produced this LF


@dataclass(frozen=True)
class TableContext:
    """What an LF may see beyond the column itself."""

    header: str = ""
    left_type: str | None = None
    right_type: str | None = None

    def neighbor_present(self, type_id: str, direction: str) -> bool:
        if direction == DIRECTION_LEFT:
            return self.left_type == type_id
        if direction == DIRECTION_RIGHT:
            return self.right_type == type_id
        return type_id in (self.left_type, self.right_type)


def evaluate_lf(
    lf: LabelingFunction,
    column: Column,
    profile: ColumnProfile,
    context: TableContext,
) -> LfVote:
    """Pure column-level evaluation: same inputs, same vote."""
    body = lf.body
    if isinstance(body, NumericRange):
        if column.primitive != PRIMITIVE_NUMERIC:
            return LfVote.ABSTAIN
        present = column.non_missing()
        if not present:
            return LfVote.ABSTAIN
        inside = 0
        for v in present:
            x = parse_number(v)
            if x is not None and body.lo <= x <= body.hi:
                inside += 1
        return LfVote.MATCH if inside / len(present) >= NUMERIC_RANGE_COVERAGE else LfVote.ABSTAIN
    if isinstance(body, ValueSet):
        present = column.non_missing()
        if not present:
            return LfVote.ABSTAIN
        overlap = sum(1 for v in present if v in body.values) / len(present)
        return LfVote.MATCH if overlap >= body.min_overlap_fraction else LfVote.ABSTAIN
    if isinstance(body, UniqueRatioBand):
        if profile.n_rows == profile.n_missing:
            return LfVote.ABSTAIN
        r = profile.unique_ratio
        return LfVote.MATCH if body.lo <= r <= body.hi else LfVote.ABSTAIN
    if isinstance(body, HeaderToken):
        tokens = set(tokenize(context.header))
        if not tokens:
            return LfVote.ABSTAIN
        union = tokens | body.tokens
        jaccard = len(tokens & body.tokens) / len(union)
        return LfVote.MATCH if jaccard >= HEADER_TOKEN_JACCARD else LfVote.ABSTAIN
    if isinstance(body, CoOccurrence):
        present = context.neighbor_present(body.neighbor_type_id, body.direction)
        return LfVote.MATCH if present else LfVote.ABSTAIN
    raise TypeError(f"unknown LF body: {type(body).__name__}")


def value_matches_lf(lf: LabelingFunction, value: str) -> bool:
    """Single-value view of an LF, used by the lookup stage.

    Only range and value-set bodies are meaningful per value; the
    column-level kinds (unique ratio, header, co-occurrence) abstain here and
    contribute through training-data generation instead.
    """
    body = lf.body
    if isinstance(body, NumericRange):
        x = parse_number(value)
        return x is not None and body.lo <= x <= body.hi
    if isinstance(body, ValueSet):
        return value in body.values
    return False


def lf_to_dict(lf: LabelingFunction) -> dict:
    body = lf.body
    if isinstance(body, NumericRange):
        payload = {"kind": "numeric_range", "lo": body.lo, "hi": body.hi}
    elif isinstance(body, ValueSet):
        payload = {
            "kind": "value_set",
            "values": sorted(body.values),
            "min_overlap_fraction": body.min_overlap_fraction,
        }
    elif isinstance(body, UniqueRatioBand):
        payload = {"kind": "unique_ratio_band", "lo": body.lo, "hi": body.hi}
    elif isinstance(body, HeaderToken):
        payload = {"kind": "header_token", "tokens": sorted(body.tokens)}
    elif isinstance(body, CoOccurrence):
        payload = {
            "kind": "co_occurrence",
            "neighbor_type_id": body.neighbor_type_id,
            "direction": body.direction,
        }
    else:
        raise TypeError(f"unknown LF body: {type(body).__name__}")
    return {
        "lf_id": lf.lf_id,
        "type_id": lf.type_id,
        "provenance": lf.provenance,
        "body": payload,
    }


def lf_from_dict(d: dict) -> LabelingFunction:
    payload = d["body"]
    kind = payload["kind"]
    if kind == "numeric_range":
        body: LfBody = NumericRange(payload["lo"], payload["hi"])
    elif kind == "value_set":
        body = ValueSet(frozenset(payload["values"]), payload["min_overlap_fraction"])
    elif kind == "unique_ratio_band":
        body = UniqueRatioBand(payload["lo"], payload["hi"])
    elif kind == "header_token":
        body = HeaderToken(frozenset(payload["tokens"]))
    elif kind == "co_occurrence":
        body = CoOccurrence(payload["neighbor_type_id"], payload["direction"])
    else:
        raise ValidationError(f"unknown LF body kind: {kind!r}")
    return LabelingFunction(
        lf_id=d["lf_id"], type_id=d["type_id"], body=body, provenance=d.get("provenance", "")
    )
