"""Column feature engineering for the classifier stage.

A column becomes a fixed-length vector: 22 profile/character features plus
the mean embedding of up to 50 distinct values. Unbounded magnitudes pass
through a signed log squash so every component stays O(1) regardless of the
underlying scale; the constants are pinned here and nowhere else.
"""

from __future__ import annotations

import math

import numpy as np

from .embeddings import EmbeddingStore
from .tables import Column, ColumnProfile, is_boolean_like, is_date_like
from .textnorm import tokenize

N_PROFILE_FEATURES = 22
EMBED_VALUE_CAP = 50

# squash(x) = sign(x) * log1p(|x|) / SQUASH_SCALE
SQUASH_SCALE = 10.0
# entropy of <= 10 top values is bounded by ln(10) ~ 2.30; kept raw

FEATURE_NAMES = [
    "rows_log",
    "missing_fraction",
    "unique_ratio",
    "mean_length_log",
    "char_digit_fraction",
    "char_alpha_fraction",
    "char_punct_fraction",
    "char_space_fraction",
    "char_other_fraction",
    "numeric_presence",
    "numeric_min_log",
    "numeric_max_log",
    "numeric_mean_log",
    "numeric_std_log",
    "fraction_integer",
    "top_value_dominance",
    "top_values_entropy",
    "boolean_likeness",
    "date_likeness",
    "digit_start_fraction",
    "reserved_0",
    "reserved_1",
]

assert len(FEATURE_NAMES) == N_PROFILE_FEATURES


def squash(x: float) -> float:
    return math.copysign(math.log1p(abs(x)), x) / SQUASH_SCALE


def feature_dimension(store: EmbeddingStore) -> int:
    return N_PROFILE_FEATURES + store.dimension


def extract_features(
    column: Column, profile: ColumnProfile, store: EmbeddingStore
) -> np.ndarray:
    """Deterministic feature vector of length ``22 + store.dimension``."""
    present = column.non_missing()
    n_present = len(present)
    feats = np.zeros(N_PROFILE_FEATURES, dtype=np.float64)

    feats[0] = squash(profile.n_rows)
    feats[1] = profile.n_missing / profile.n_rows if profile.n_rows else 0.0
    feats[2] = profile.unique_ratio

    if profile.text_stats is not None:
        ts = profile.text_stats
        feats[3] = squash(ts.mean_length)
        total_chars = sum(ts.char_class_histogram.values())
        if total_chars:
            for i, key in enumerate(("digit", "alpha", "punct", "space", "other")):
                feats[4 + i] = ts.char_class_histogram[key] / total_chars

    if profile.numeric_stats is not None:
        ns = profile.numeric_stats
        feats[9] = 1.0
        feats[10] = squash(ns.min)
        feats[11] = squash(ns.max)
        feats[12] = squash(ns.mean)
        feats[13] = squash(ns.std)
        feats[14] = ns.fraction_integer

    if n_present:
        top_counts = [c for _, c in profile.top_values]
        feats[15] = top_counts[0] / n_present if top_counts else 0.0
        total = sum(top_counts)
        if total:
            feats[16] = -sum(
                (c / total) * math.log(c / total) for c in top_counts if c > 0
            )
        feats[17] = sum(1 for v in present if is_boolean_like(v)) / n_present
        feats[18] = sum(1 for v in present if is_date_like(v)) / n_present
        feats[19] = sum(1 for v in present if v[:1].isdigit()) / n_present

    # value embedding: distinct values in sorted order, so the vector is
    # invariant to row permutation
    embedding = np.zeros(store.dimension, dtype=np.float64)
    if n_present:
        tokens: list[str] = []
        for value in sorted(set(present))[:EMBED_VALUE_CAP]:
            tokens.extend(tokenize(value))
        mean = store.embed_tokens(tokens)
        if mean is not None:
            embedding = mean

    return np.concatenate([feats, embedding])
