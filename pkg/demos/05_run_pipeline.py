#!/usr/bin/env python3
"""The full staged pipeline with gating and abstention.

Stages run cheapest-first; a column whose blended confidence clears the
stage gate never reaches the slower stages. Columns nothing can explain
abstain with the reserved unknown type instead of guessing.

Run demos/00_build_demo_state.py first.
"""

from pathlib import Path

from semtype import parse_table, run_pipeline
from semtype.state import TenantState
from semtype.store import load_global_dir

ROOT = Path(__file__).resolve().parent.parent


def main() -> None:
    global_state = load_global_dir(ROOT / "demo_state" / "global")
    tenant = TenantState("demo")
    state = tenant.model_state(global_state)

    table = parse_table(
        (ROOT / "fixtures" / "tables" / "employees.csv").read_bytes(),
        table_id="employees",
        name="employees",
    )
    predictions = run_pipeline(table, state, global_state.config)
    for pred in predictions:
        stages = " -> ".join(f"{t.stage}/{t.side}" for t in pred.stage_trace)
        print(f"\n[{pred.column_index}] {pred.header!r}   stages: {stages}")
        if pred.abstained:
            print(f"    ABSTAINED ({pred.ranked[0][0]}, {pred.ranked[0][1]:.3f})")
        else:
            for type_id, conf in pred.ranked:
                print(f"    {type_id:12s} {conf:.3f}")


if __name__ == "__main__":
    main()
