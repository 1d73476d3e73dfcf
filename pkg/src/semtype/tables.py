"""Table parsing, primitive type inference and column profiling.

The profiler output drives everything downstream: lookup sampling,
classifier features and the statistics that labeling functions are built
from, so all thresholds here are pinned constants.
"""

from __future__ import annotations

import math
import re
import string
from collections import Counter
from dataclasses import dataclass

from .errors import ParseError

PRIMITIVE_NUMERIC = "numeric"
PRIMITIVE_TEXT = "text"
PRIMITIVE_DATE = "date"
PRIMITIVE_BOOLEAN = "boolean"
PRIMITIVE_EMPTY = "empty"

# Fraction of non-missing values that must parse for a primitive to win.
NUMERIC_THRESHOLD = 0.80
DATE_THRESHOLD = 0.80
BOOLEAN_THRESHOLD = 0.95

DEFAULT_MAX_ROWS = 10_000
TOP_VALUES_CAP = 10

_NUMBER_RE = re.compile(
    r"[+-]?(?:(?:\d{1,3}(?:,\d{3})+|\d+)(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?"
)
_DATE_RES = [
    re.compile(p)
    for p in (
        r"\d{4}-\d{2}-\d{2}(?:[T ]\d{2}:\d{2}(?::\d{2})?)?",  # ISO date / datetime
        r"\d{4}/\d{2}/\d{2}",
        r"\d{1,2}/\d{1,2}/\d{4}",
        r"\d{1,2}/\d{1,2}/\d{2}",
    )
]
_BOOLEAN_VALUES = {"true", "false", "0", "1", "yes", "no"}

_PUNCT = set(string.punctuation)


def parse_number(value: str) -> float | None:
    """Parse a decimal number, accepting comma thousands separators."""
    s = value.strip()
    if not s or not _NUMBER_RE.fullmatch(s):
        return None
    return float(s.replace(",", ""))


def is_date_like(value: str) -> bool:
    s = value.strip()
    return any(rx.fullmatch(s) for rx in _DATE_RES)


def is_boolean_like(value: str) -> bool:
    return value.strip().lower() in _BOOLEAN_VALUES


@dataclass
class Column:
    """One parsed column; empty string cells are missing values."""

    header: str
    values: list[str]
    primitive: str

    def non_missing(self) -> list[str]:
        return [v for v in self.values if v != ""]


@dataclass
class Table:
    table_id: str
    name: str
    headers: list[str]
    columns: list[Column]

    def __post_init__(self):
        if len(self.headers) != len(self.columns):
            raise ValueError("headers and columns must have the same arity")
        row_counts = {len(c.values) for c in self.columns}
        if len(row_counts) > 1:
            raise ValueError("all columns must have equal row count")

    @property
    def n_rows(self) -> int:
        return len(self.columns[0].values) if self.columns else 0


@dataclass
class NumericStats:
    min: float
    max: float
    mean: float
    std: float  # population
    fraction_integer: float


@dataclass
class TextStats:
    mean_length: float
    char_class_histogram: dict[str, int]  # keys: digit, alpha, punct, space, other


@dataclass
class ColumnProfile:
    n_rows: int
    n_missing: int
    n_unique: int
    top_values: list[tuple[str, int]]
    numeric_stats: NumericStats | None
    text_stats: TextStats | None

    @property
    def unique_ratio(self) -> float:
        present = self.n_rows - self.n_missing
        return self.n_unique / present if present else 0.0


def _classify_values(values: list[str]) -> str:
    present = [v for v in values if v != ""]
    if not present:
        return PRIMITIVE_EMPTY
    n = len(present)
    if sum(1 for v in present if is_boolean_like(v)) / n >= BOOLEAN_THRESHOLD:
        return PRIMITIVE_BOOLEAN
    if sum(1 for v in present if is_date_like(v)) / n >= DATE_THRESHOLD:
        return PRIMITIVE_DATE
    if sum(1 for v in present if parse_number(v) is not None) / n >= NUMERIC_THRESHOLD:
        return PRIMITIVE_NUMERIC
    return PRIMITIVE_TEXT


def make_column(header: str, values: list[str]) -> Column:
    return Column(header=header, values=values, primitive=_classify_values(values))


def infer_primitive(column: Column) -> str:
    """Re-derive the primitive class of a column from its values."""
    return _classify_values(column.values)


def _tokenize_csv(text: str, delimiter: str) -> list[list[str]]:
    """RFC-4180 style record tokenizer with quote tracking.

    Raises ParseError with the byte offset of the opening quote when a
    quoted field is still open at end of input.
    """
    records: list[list[str]] = []
    row: list[str] = []
    buf: list[str] = []
    in_quotes = False
    quote_open_at: int | None = None
    pending = False  # anything consumed since last record boundary
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if in_quotes:
            if ch == '"':
                if i + 1 < n and text[i + 1] == '"':
                    buf.append('"')
                    i += 2
                    continue
                in_quotes = False
                quote_open_at = None
                i += 1
                continue
            buf.append(ch)
            i += 1
            continue
        if ch == '"' and not buf:
            in_quotes = True
            quote_open_at = i
            pending = True
            i += 1
            continue
        if ch == delimiter:
            row.append("".join(buf))
            buf = []
            pending = True
            i += 1
            continue
        if ch == "\n" or ch == "\r":
            if ch == "\r" and i + 1 < n and text[i + 1] == "\n":
                i += 1
            row.append("".join(buf))
            records.append(row)
            row, buf, pending = [], [], False
            i += 1
            continue
        buf.append(ch)
        pending = True
        i += 1
    if in_quotes:
        offset = len(text[:quote_open_at].encode("utf-8"))
        raise ParseError(
            f"unclosed quote at end of input (opened at byte {offset})", offset=offset
        )
    if pending or buf or row:
        row.append("".join(buf))
        records.append(row)
    return records


def parse_table(
    data: bytes,
    *,
    delimiter: str = ",",
    has_header: bool = True,
    max_rows: int = DEFAULT_MAX_ROWS,
    table_id: str = "",
    name: str = "",
) -> Table:
    """Parse CSV bytes into a Table.

    Ragged rows are padded with missing values to the widest row; at most
    ``max_rows`` data rows are kept.
    """
    if len(delimiter) != 1:
        raise ParseError(f"delimiter must be a single character, got {delimiter!r}")
    text = data.decode("utf-8", errors="replace")
    records = _tokenize_csv(text, delimiter)
    if not records:
        raise ParseError("empty table: no columns after parse")
    width = max(len(r) for r in records)
    if width == 0:
        raise ParseError("empty table: no columns after parse")
    if has_header:
        headers = records[0] + [""] * (width - len(records[0]))
        data_rows = records[1:]
    else:
        headers = [""] * width
        data_rows = records
    data_rows = data_rows[:max_rows]
    columns = []
    for idx in range(width):
        values = [row[idx] if idx < len(row) else "" for row in data_rows]
        columns.append(make_column(headers[idx], values))
    return Table(table_id=table_id, name=name, headers=headers, columns=columns)


def _char_class(ch: str) -> str:
    if ch.isdigit():
        return "digit"
    if ch.isalpha():
        return "alpha"
    if ch in _PUNCT:
        return "punct"
    if ch.isspace():
        return "space"
    return "other"


def profile_column(column: Column) -> ColumnProfile:
    """Distribution statistics over the non-missing values of a column."""
    values = column.values
    present = [v for v in values if v != ""]
    n_rows = len(values)
    n_missing = n_rows - len(present)

    counts = Counter(present)
    # ties broken lexicographically so profiles are permutation invariant
    top = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))[:TOP_VALUES_CAP]

    numeric_stats = None
    if column.primitive == PRIMITIVE_NUMERIC:
        nums = [x for x in (parse_number(v) for v in present) if x is not None]
        # summation over sorted values keeps the stats bitwise
        # permutation-invariant
        nums.sort()
        if nums:
            mean = sum(nums) / len(nums)
            var = sum((x - mean) ** 2 for x in nums) / len(nums)
            numeric_stats = NumericStats(
                min=min(nums),
                max=max(nums),
                mean=mean,
                std=math.sqrt(var),
                fraction_integer=sum(1 for x in nums if x == int(x)) / len(nums),
            )

    text_stats = None
    if present:
        histogram = {"digit": 0, "alpha": 0, "punct": 0, "space": 0, "other": 0}
        total_len = 0
        for v in present:
            total_len += len(v)
            for ch in v:
                histogram[_char_class(ch)] += 1
        text_stats = TextStats(
            mean_length=total_len / len(present), char_class_histogram=histogram
        )

    return ColumnProfile(
        n_rows=n_rows,
        n_missing=n_missing,
        n_unique=len(counts),
        top_values=top,
        numeric_stats=numeric_stats,
        text_stats=text_stats,
    )
