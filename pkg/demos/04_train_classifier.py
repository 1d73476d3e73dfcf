#!/usr/bin/env python3
"""The learned stage: a softmax classifier over engineered column features.

Trained from scratch on a synthetic corpus; background examples built from
out-of-ontology and chimera columns teach the reserved unknown class to
absorb out-of-distribution columns.
"""

from pathlib import Path

import numpy as np

from semtype import extract_features, load_embeddings, load_ontology, predict, profile_column
from semtype.synth import train_demo_global
from semtype.tables import make_column

ROOT = Path(__file__).resolve().parent.parent


def main() -> None:
    ontology = load_ontology((ROOT / "fixtures" / "global" / "ontology.tsv").read_bytes())
    embeddings = load_embeddings((ROOT / "fixtures" / "global" / "embeddings.txt").read_bytes())

    params = train_demo_global(ontology, embeddings)
    history = params.loss_history
    print(f"trained {len(params.labels)} classes, {params.n_features} features")
    print("loss:", "  ".join(f"{history[i]:.3f}" for i in (0, 9, 49, 99, len(history) - 1)))

    probes = {
        "email-like": ["alice@acme.com", "bob@initech.com", "carol@umbra.com"],
        "year-like": ["1997", "2004", "2021", "1988"],
        "ood gibberish": ["qz!7", "##xx@@", "zz-41-qq", "!!!!"],
    }
    for label, values in probes.items():
        column = make_column("probe", values)
        features = extract_features(column, profile_column(column), embeddings)
        scores = predict(features, params).scores
        top3 = sorted(scores.items(), key=lambda kv: -kv[1])[:3]
        print(f"{label:14s} -> {[(t, round(p, 3)) for t, p in top3]}")


if __name__ == "__main__":
    main()
