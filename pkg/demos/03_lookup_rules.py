#!/usr/bin/env python3
"""Value lookup: score types by the fraction of sampled values matched.

Rules come from three sources sharing one contract: regex packs,
dictionaries (the knowledge-base stand-in) and labeling functions learned
from feedback. Confidence is always an exact fraction k/n over the sample.
"""

from pathlib import Path

from semtype import apply_lookup, builtin_rules, parse_table, sample_values
from semtype.lookup import table_seed

ROOT = Path(__file__).resolve().parent.parent


def main() -> None:
    rules = builtin_rules()
    print(f"builtin rule pack: {len(rules)} rules")
    for rule in rules[:6]:
        print(f"  {rule.rule_id:18s} -> {rule.type_id}")
    print("  ...")

    table = parse_table(
        (ROOT / "fixtures" / "tables" / "invoices.csv").read_bytes(),
        table_id="invoices",
        name="invoices",
    )
    for idx, column in enumerate(table.columns):
        sample = sample_values(column, cap=100, seed=table_seed("invoices", idx))
        scores = apply_lookup(sample, rules).scores
        pretty = {t: f"{c:.2f}" for t, c in sorted(scores.items(), key=lambda kv: -kv[1])}
        print(f"[{idx}] {column.header!r:16s} sample={len(sample.values):2d}  {pretty or 'no match'}")


if __name__ == "__main__":
    main()
