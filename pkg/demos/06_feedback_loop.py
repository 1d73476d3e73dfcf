#!/usr/bin/env python3
"""The adaptation loop end to end, on a temporary copy of the demo state.

A tenant uploads tables whose income columns the global model cannot name,
corrects one of them to the fresh type `salary`, and the system infers
labeling functions, generates weak training data from the tenant's corpus,
retrains the local model and shifts prediction weight toward it.

Run demos/00_build_demo_state.py first.
"""

import shutil
import tempfile
from pathlib import Path

from semtype import FeedbackEvent, Store
from semtype.synth import make_table, table_to_csv

ROOT = Path(__file__).resolve().parent.parent
TENANT = "demo-tenant"


def main() -> None:
    work = Path(tempfile.mkdtemp(prefix="semtype-demo-"))
    shutil.copytree(ROOT / "demo_state" / "global", work / "global")
    store = Store(work)

    corpus_specs = [
        ("payroll_q1", [("Name", "name"), ("Income", "salary"), ("City", "city")]),
        ("payroll_q2", [("Name", "name"), ("income", "salary"), ("City", "city")]),
        ("payroll_q3", [("Name", "name"), ("wage", "salary"), ("City", "city")]),
        ("misc", [("City", "city"), ("StartDate", "date")]),
    ]
    ids = []
    for i, (name, spec) in enumerate(corpus_specs):
        table, _ = make_table(name, spec, 25, 5000 + i)
        ids.append(store.upload_table(TENANT, table_to_csv(table), name=name).table_id)

    def income_prediction(table_id):
        doc = store.predict_table(TENANT, table_id)
        col = doc["prediction"]["columns"][1]
        return col["ranked"][0], col["abstained"]

    top, abstained = income_prediction(ids[0])
    print(f"before: Income column -> {top} abstained={abstained}")

    event = FeedbackEvent(
        event_id="demo-correction-1",
        tenant_id=TENANT,
        table_id=ids[0],
        column_index=1,
        predicted_type=top["type"],
        asserted_type="salary",
        kind="explicit_correction",
        timestamp=0.0,
    )
    report, _ = store.post_feedback(TENANT, event)
    print(f"\ncorrection applied: {len(report['new_lfs'])} labeling functions inferred")
    for lf in report["new_lfs"]:
        print(f"  {lf['body']}")
    print(f"weak examples generated from the corpus: {report['n_generated']}")
    print(f"local model retrained: {report['retrained']}")
    print(f"local weight for salary: {report['weight_updates']['salary']:.3f}")

    print("\nafter one correction:")
    for table_id, (name, _) in zip(ids[:3], corpus_specs[:3]):
        top, abstained = income_prediction(table_id)
        print(f"  {name:12s} -> {top} abstained={abstained}")

    summary = store.state_summary(TENANT)
    print(f"\ntenant state: {summary['example_counts']} examples, "
          f"{len(summary['labeling_functions'])} LFs, {summary['n_events']} events")
    shutil.rmtree(work)


if __name__ == "__main__":
    main()
