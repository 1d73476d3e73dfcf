#!/usr/bin/env python3
"""Assemble a ready-to-serve state directory under demo_state/.

Combines the fixture ontology and embeddings with the bundled rule pack and
a classifier trained on a synthetic corpus. Every later demo (and the CLI
and HTTP service) points at this directory.
"""

from pathlib import Path

from semtype import load_embeddings, load_ontology
from semtype.store import init_global_dir
from semtype.synth import train_demo_global

ROOT = Path(__file__).resolve().parent.parent
STATE_DIR = ROOT / "demo_state"


def main() -> None:
    ontology_bytes = (ROOT / "fixtures" / "global" / "ontology.tsv").read_bytes()
    embeddings_bytes = (ROOT / "fixtures" / "global" / "embeddings.txt").read_bytes()
    ontology = load_ontology(ontology_bytes)
    embeddings = load_embeddings(embeddings_bytes)

    print(f"ontology: {len(ontology)} types (incl. the reserved abstention type)")
    print(f"embeddings: {len(embeddings.vectors)} tokens, dimension {embeddings.dimension}")

    print("training the global classifier on the synthetic corpus ...")
    params = train_demo_global(ontology, embeddings)
    print(f"  labels: {len(params.labels)}  final loss: {params.loss_history[-1]:.4f}")

    init_global_dir(
        STATE_DIR / "global",
        ontology_bytes=ontology_bytes,
        embeddings_bytes=embeddings_bytes,
        params=params,
        # the abstention threshold ships pre-calibrated for the demo corpus;
        # the library default (0.5) applies until a state dir overrides it
        config_text="abstain_threshold=0.1\n",
    )
    print(f"state written to {STATE_DIR}")
    print("try:  semtype detect fixtures/tables/employees.csv --state-dir demo_state")
    print("or:   semtype serve --state-dir demo_state --port 8787")


if __name__ == "__main__":
    main()
