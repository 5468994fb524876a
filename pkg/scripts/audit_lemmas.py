#!/usr/bin/env python3
"""Run every estimate check over the built-in corpus and summarize constants.

Prints one line per check id with the row count, worst fitted constant and
its profile, plus any skipped or failed rows.  Exit code 2 on failures.
"""

import argparse
from collections import defaultdict

from ostrovsky_lab.lemmas import LEMMA_IDS, LemmaConfig, run_corpus


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--only", nargs="+", choices=LEMMA_IDS, default=None)
    ap.add_argument("--threads", type=int, default=None)
    ap.add_argument("--sign", choices="+-", default="+")
    args = ap.parse_args()

    reports = run_corpus(config=LemmaConfig(sign=args.sign),
                         only=args.only, threads=args.threads)

    by_id = defaultdict(list)
    for r in reports:
        by_id[r.lemma_id].append(r)
    for lemma_id in (args.only or LEMMA_IDS):
        rows = by_id.get(lemma_id, [])
        live = [r for r in rows if "skip" not in r.params]
        if not live:
            print(f"{lemma_id:<11} {len(rows):>3} rows, all skipped")
            continue
        worst = max(live, key=lambda r: r.fitted_c)
        print(f"{lemma_id:<11} {len(rows):>3} rows  "
              f"worst C = {worst.fitted_c:.6g} ({worst.profile_id})  "
              f"skipped = {len(rows) - len(live)}")

    failed = [r for r in reports if not r.passed]
    for r in failed:
        print(f"FAILED {r.lemma_id} on {r.profile_id}: "
              f"{r.measured_lhs:.6g} > {r.bound_rhs:.6g} ({r.params})")
    print(f"{len(reports)} rows, {len(failed)} failed")
    return 2 if failed else 0


if __name__ == "__main__":
    raise SystemExit(main())
