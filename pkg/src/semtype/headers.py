"""Pipeline stage 1: match column headers against the type ontology.

Two matchers run per header: syntactic (exact after normalization, else
normalized edit-distance similarity) and semantic (cosine between mean word
vectors). An exact syntactic match is worth confidence 1.0 and skips the
semantic matcher entirely.
"""

from __future__ import annotations

from .embeddings import EmbeddingStore, cosine
from .ontology import UNKNOWN_TYPE_ID, Ontology
from .stages import STAGE_HEADER, StagePrediction
from .textnorm import normalize_name, similarity, tokenize

DEFAULT_FUZZY_FLOOR = 0.6


def syntactic_match(
    header: str, ontology: Ontology, *, fuzzy_floor: float = DEFAULT_FUZZY_FLOOR
) -> StagePrediction:
    """Exact match at 1.0, otherwise graded edit-distance similarity.

    Fuzzy scores below ``fuzzy_floor`` are dropped; on short headers they are
    noise. The reserved ``unknown`` type never matches.
    """
    norm = normalize_name(header)
    scores: dict[str, float] = {}
    if not norm:
        return StagePrediction(STAGE_HEADER, scores)
    for stype in ontology.types.values():
        if stype.id == UNKNOWN_TYPE_ID:
            continue
        names = [normalize_name(stype.canonical_name)]
        names.extend(normalize_name(s) for s in stype.synonyms)
        names = [n for n in names if n]
        if norm in names:
            scores[stype.id] = 1.0
            continue
        best = max((similarity(norm, n) for n in names), default=0.0)
        if best >= fuzzy_floor:
            scores[stype.id] = best
    return StagePrediction(STAGE_HEADER, scores)


def semantic_match(
    header: str, ontology: Ontology, store: EmbeddingStore
) -> StagePrediction:
    """Cosine similarity between header and canonical type name embeddings.

    Both sides embed as the mean of known-token vectors; negative cosines
    clamp to 0. Headers or types with no known tokens produce no score.
    """
    scores: dict[str, float] = {}
    header_vec = store.embed_tokens(tokenize(header))
    if header_vec is None:
        return StagePrediction(STAGE_HEADER, scores)
    for stype in ontology.types.values():
        if stype.id == UNKNOWN_TYPE_ID:
            continue
        type_vec = store.embed_tokens(tokenize(stype.canonical_name))
        if type_vec is None:
            continue
        score = max(0.0, cosine(header_vec, type_vec))
        if score > 0.0:
            scores[stype.id] = score
    return StagePrediction(STAGE_HEADER, scores)


def match_header(
    header: str,
    ontology: Ontology,
    store: EmbeddingStore,
    *,
    fuzzy_floor: float = DEFAULT_FUZZY_FLOOR,
) -> StagePrediction:
    """Combined header matcher: per type, the max of both signals.

    An exact syntactic match short-circuits: the semantic matcher is not
    consulted for that header at all.
    """
    syntactic = syntactic_match(header, ontology, fuzzy_floor=fuzzy_floor)
    if any(conf == 1.0 for conf in syntactic.scores.values()):
        return syntactic
    semantic = semantic_match(header, ontology, store)
    merged = dict(syntactic.scores)
    for type_id, conf in semantic.scores.items():
        merged[type_id] = max(merged.get(type_id, 0.0), conf)
    return StagePrediction(STAGE_HEADER, merged)
