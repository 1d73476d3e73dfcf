#!/usr/bin/env python3
"""Header matching: the cheap first stage.

Exact matches (after normalization) are worth confidence 1.0 and skip the
semantic matcher. Everything else is graded: normalized edit-distance
similarity against canonical names and synonyms, and cosine similarity of
mean word vectors.
"""

from pathlib import Path

from semtype import load_embeddings, load_ontology, match_header, semantic_match, syntactic_match

ROOT = Path(__file__).resolve().parent.parent


def main() -> None:
    ontology = load_ontology((ROOT / "fixtures" / "global" / "ontology.tsv").read_bytes())
    store = load_embeddings((ROOT / "fixtures" / "global" / "embeddings.txt").read_bytes())

    headers = ["Date", "start_date", "Income", "salaries", "E-Mail", "qq_zz_42"]
    for header in headers:
        syn = syntactic_match(header, ontology)
        sem = semantic_match(header, ontology, store)
        combined = match_header(header, ontology, store)
        top = sorted(combined.scores.items(), key=lambda kv: -kv[1])[:3]
        print(f"\nheader {header!r}")
        print(f"  syntactic: { {t: round(c, 3) for t, c in syn.scores.items()} }")
        print(f"  semantic:  { {t: round(c, 3) for t, c in sem.scores.items()} }")
        print(f"  combined top: {[(t, round(c, 3)) for t, c in top] or 'nothing'}")


if __name__ == "__main__":
    main()
