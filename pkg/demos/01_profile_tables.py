#!/usr/bin/env python3
"""Parse CSVs and inspect column profiles.

The profile is the substrate everything else reads: primitive class,
distribution statistics, frequent values. Note the population (not sample)
standard deviation; rule inference depends on that convention.
"""

from pathlib import Path

from semtype import parse_table, profile_column

ROOT = Path(__file__).resolve().parent.parent


def show(path: Path) -> None:
    table = parse_table(path.read_bytes(), table_id=path.stem, name=path.stem)
    print(f"\n=== {path.name}: {len(table.columns)} columns x {table.n_rows} rows")
    for idx, column in enumerate(table.columns):
        profile = profile_column(column)
        line = f"[{idx}] {column.header!r:14s} {column.primitive:8s}"
        line += f" unique={profile.n_unique:<3d} missing={profile.n_missing}"
        if profile.numeric_stats:
            ns = profile.numeric_stats
            line += f" range=[{ns.min:g}, {ns.max:g}] mean={ns.mean:g} std={ns.std:g}"
        else:
            top = ", ".join(f"{v}x{c}" for v, c in profile.top_values[:3])
            line += f" top: {top}"
        print(line)


def main() -> None:
    show(ROOT / "fixtures" / "tables" / "employees.csv")
    show(ROOT / "fixtures" / "tables" / "invoices.csv")


if __name__ == "__main__":
    main()
