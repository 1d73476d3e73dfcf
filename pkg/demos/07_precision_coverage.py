#!/usr/bin/env python3
"""Precision versus coverage, and picking the abstention threshold.

Raising the threshold trades coverage for precision. The calibrator scans
the grid for the smallest threshold whose surviving predictions hit a
precision target.

Run demos/00_build_demo_state.py first.
"""

from pathlib import Path

from semtype import PipelineConfig, calibrate_tau
from semtype.evaluation import evaluate
from semtype.state import TenantState
from semtype.store import load_global_dir
from semtype.synth import make_table

ROOT = Path(__file__).resolve().parent.parent


def build_validation():
    specs = [
        [("City", "city"), ("when", "date")],
        [("email", "email"), ("Age", "age")],
        [("Country", "country"), ("qq_zz", "name")],
        [("phone", "phone"), ("year", "year")],
    ]
    validation = []
    for i in range(8):
        table, labels = make_table(f"val{i}", specs[i % len(specs)], 20, 9000 + i)
        validation.append((table, labels))
    return validation


def main() -> None:
    global_state = load_global_dir(ROOT / "demo_state" / "global")
    state = TenantState("demo").model_state(global_state)
    validation = build_validation()
    config = PipelineConfig()

    result = calibrate_tau(validation, state, config, target_precision=0.95)
    print(f"calibrated threshold: {result.tau}  (unattainable: {result.warning})")

    print("\nthreshold  precision  coverage")
    for point in result.curve[::10]:
        precision = "-" if point["precision"] is None else f"{point['precision']:.3f}"
        print(f"  {point['tau']:.2f}     {precision:>9s}  {point['coverage']:.3f}")

    report = evaluate(validation, state, config)
    print(f"\nat threshold {report.abstain_threshold}: precision="
          f"{report.precision if report.precision is not None else '-'} "
          f"coverage={report.coverage:.3f} "
          f"({report.n_correct}/{report.n_predicted} correct of {report.n_columns} columns)")


if __name__ == "__main__":
    main()
