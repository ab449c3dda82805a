"""Rebuild the EFGA, grouping and Mann-Whitney tables from the reference
per-participant (Mo, MAPE) summaries and compare with the reported values.

    python scripts/reproduce_tables.py [--display round]
"""

import argparse

from biovit.cohort import DECLINED_TEST, REFERENCE_COHORT, RETAINED_TEST, VALIDATION, reference_records
from biovit.efga import format_efga, retention_rate, split_groups, validate_scale
from biovit.stats import Direction, mann_whitney


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--display", choices=("truncate", "round"), default="truncate")
    args = ap.parse_args()

    records = {r.participant_id: r for r in reference_records()}
    reported = {r.participant_id: r.efga_reported for r in REFERENCE_COHORT}
    retained, declined = split_groups(list(records.values()))

    hits = 0
    print(f"{'id':8} {'Mo':>4} {'MAPE':>6} {'ratio':>8} {'shown':>6} {'reported':>8}")
    for grp in (retained, declined):
        for r in grp:
            shown = format_efga(r.efga, 2, args.display)
            ok = shown == f"{reported[r.participant_id]:.2f}"
            hits += ok
            print(f"{r.participant_id:8} {r.mo:4.0f} {r.mape:6.2f} {r.efga:8.4f} {shown:>6} "
                  f"{reported[r.participant_id]:8.2f}{'' if ok else '  <- differs'}")
    print(f"\n{args.display}: {hits}/18 EFGA values match; retention {retention_rate(list(records.values()))}%")

    for name, grp, direction, ref in (
        ("retained", retained, Direction.GREATER, RETAINED_TEST),
        ("declined", declined, Direction.LESS, DECLINED_TEST),
    ):
        res = mann_whitney([r.mo for r in grp], [r.mape for r in grp], direction)
        print(
            f"{name:8} n={len(grp):2d} {direction.value:7} p={res.p_value:.3g} ({res.method}) "
            f"HL={res.median_diff_point:.2f} bound={res.ci_bound:.2f} at {res.confidence:.2f}% | "
            f"reported bound={ref['bound']} at {ref['confidence']}%, p={ref['p_value']}"
        )

    v = validate_scale(list(records.values()))
    print(f"\nvalidation {v.item_names}: r={v.pearson_r:.3f} alpha={v.cronbach_alpha:.3f} | "
          f"reported r={VALIDATION['pearson_r']} alpha={VALIDATION['cronbach_alpha']}")


if __name__ == "__main__":
    main()
