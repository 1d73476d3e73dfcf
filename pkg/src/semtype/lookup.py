"""Pipeline stage 2: score types by matching sampled values against rules.

Three rule sources share one contract: regex packs, dictionary value sets
(the knowledge-base stand-in) and labeling functions registered from
feedback. A type's confidence is the fraction of sampled values matched by
any rule targeting it.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field
from importlib import resources

from .errors import ConfigurationError, ConflictError, NotFoundError, ValidationError
from .labeling import LabelingFunction, value_matches_lf
from .ontology import Ontology
from .stages import STAGE_LOOKUP, StagePrediction
from .tables import Column

ORIGIN_BUILTIN = "builtin"
ORIGIN_KB = "kb"
ORIGIN_USER = "user"
ORIGIN_FEEDBACK_GLOBAL = "dpbd-global"
ORIGIN_FEEDBACK_LOCAL = "dpbd-local"

DEFAULT_SAMPLE_CAP = 100

# Numerical Recipes LCG; drives the reproducible sampling shuffle.
_LCG_A = 1664525
_LCG_C = 1013904223
_LCG_M = 2**32


@dataclass(frozen=True)
class Regex:
    pattern: str

    def __post_init__(self):
        try:
            compiled = re.compile(self.pattern)
        except re.error as exc:
            raise ValidationError(
                f"invalid regex at position {exc.pos}: {exc.msg}",
                {"pattern": self.pattern, "position": exc.pos},
            )
        object.__setattr__(self, "_compiled", compiled)

    def search(self, value: str):
        return self._compiled.search(value)


@dataclass(frozen=True)
class Dictionary:
    values: frozenset[str]
    case_fold: bool = True

    def __post_init__(self):
        if not self.values:
            raise ValidationError("dictionary value set must be non-empty")
        if self.case_fold:
            object.__setattr__(self, "values", frozenset(v.casefold() for v in self.values))

    def contains(self, value: str) -> bool:
        return (value.casefold() if self.case_fold else value) in self.values


@dataclass(frozen=True)
class LabelingFunctionRef:
    lf_id: str


RuleBody = Regex | Dictionary | LabelingFunctionRef


@dataclass(frozen=True)
class LookupRule:
    rule_id: str
    type_id: str
    body: RuleBody
    origin: str = ORIGIN_BUILTIN


@dataclass
class ValueSample:
    """Reproducible sample of a column's non-missing values."""

    values: list[str]
    seed: int
    source_size: int


def table_seed(table_id: str, column_index: int = 0) -> int:
    """Stable sampling seed derived from the table identity."""
    digest = hashlib.sha256(f"{table_id}:{column_index}".encode("utf-8")).digest()
    return int.from_bytes(digest[:4], "big")


def _lcg_shuffle(items: list[str], seed: int) -> list[str]:
    out = list(items)
    state = seed & 0xFFFFFFFF
    for i in range(len(out) - 1, 0, -1):
        state = (_LCG_A * state + _LCG_C) % _LCG_M
        j = state % (i + 1)
        out[i], out[j] = out[j], out[i]
    return out


def sample_values(column: Column, cap: int = DEFAULT_SAMPLE_CAP, seed: int = 0) -> ValueSample:
    """Uniform sample without replacement via a seeded LCG shuffle.

    When the column has at most ``cap`` non-missing values they are all
    returned in original order.
    """
    if cap < 1:
        raise ValidationError(f"sample cap must be >= 1, got {cap}")
    present = column.non_missing()
    if len(present) <= cap:
        return ValueSample(values=present, seed=seed, source_size=len(present))
    shuffled = _lcg_shuffle(present, seed)
    return ValueSample(values=shuffled[:cap], seed=seed, source_size=len(present))


def _rule_matches_value(
    rule: LookupRule, value: str, lf_registry: dict[str, LabelingFunction]
) -> bool:
    body = rule.body
    if isinstance(body, Regex):
        return body.search(value) is not None
    if isinstance(body, Dictionary):
        return body.contains(value)
    if isinstance(body, LabelingFunctionRef):
        lf = lf_registry.get(body.lf_id)
        if lf is None:
            raise ConfigurationError(
                f"rule {rule.rule_id!r} references unknown labeling function {body.lf_id!r}"
            )
        return value_matches_lf(lf, value)
    raise TypeError(f"unknown rule body: {type(body).__name__}")


def apply_lookup(
    sample: ValueSample,
    rules: list[LookupRule],
    lf_registry: dict[str, LabelingFunction] | None = None,
) -> StagePrediction:
    """Per type: fraction of sampled values matched by any rule for it."""
    lf_registry = lf_registry or {}
    scores: dict[str, float] = {}
    if not sample.values:
        return StagePrediction(STAGE_LOOKUP, scores)
    by_type: dict[str, list[LookupRule]] = {}
    for rule in rules:
        by_type.setdefault(rule.type_id, []).append(rule)
    n = len(sample.values)
    for type_id, type_rules in by_type.items():
        matched = sum(
            1
            for v in sample.values
            if any(_rule_matches_value(r, v, lf_registry) for r in type_rules)
        )
        if matched:
            scores[type_id] = matched / n
    return StagePrediction(STAGE_LOOKUP, scores)


@dataclass
class RuleRegistry:
    """Rule set with unique ids; tenant-scoped or global."""

    rules: dict[str, LookupRule] = field(default_factory=dict)

    def register(self, rule: LookupRule, ontology: Ontology | None = None) -> str:
        if rule.rule_id in self.rules:
            raise ConflictError(f"duplicate rule id: {rule.rule_id!r}")
        if ontology is not None and rule.type_id not in ontology:
            raise ValidationError(
                f"rule {rule.rule_id!r} targets unknown type {rule.type_id!r}"
            )
        self.rules[rule.rule_id] = rule
        return rule.rule_id

    def remove(self, rule_id: str) -> None:
        if rule_id not in self.rules:
            raise NotFoundError(f"no such rule: {rule_id!r}")
        del self.rules[rule_id]

    def as_list(self) -> list[LookupRule]:
        return list(self.rules.values())


def load_regex_pack(data: bytes, *, origin: str = ORIGIN_BUILTIN) -> list[LookupRule]:
    """Parse a regex pack: ``rule_id<TAB>type_id<TAB>pattern`` per line."""
    rules = []
    for lineno, raw in enumerate(data.decode("utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise ValidationError(f"line {lineno}: expected 3 tab-separated fields")
        rule_id, type_id, pattern = parts
        rules.append(LookupRule(rule_id, type_id, Regex(pattern), origin=origin))
    return rules


def load_dictionary(
    data: bytes,
    rule_id: str,
    type_id: str,
    *,
    case_fold: bool = True,
    origin: str = ORIGIN_KB,
) -> LookupRule:
    """Parse a dictionary file: one value per line, ``#`` comments."""
    values = set()
    for raw in data.decode("utf-8").splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        values.add(line)
    return LookupRule(rule_id, type_id, Dictionary(frozenset(values), case_fold), origin=origin)


def builtin_rules() -> list[LookupRule]:
    """The bundled rule pack: regexes plus dictionary stand-ins."""
    pkg = resources.files("semtype.data")
    rules = load_regex_pack((pkg / "rules.tsv").read_bytes())
    rules.append(
        load_dictionary((pkg / "countries.txt").read_bytes(), "kb:countries", "country")
    )
    rules.append(
        load_dictionary((pkg / "us_states.txt").read_bytes(), "kb:us_states", "us_state")
    )
    return rules
