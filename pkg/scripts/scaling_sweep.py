#!/usr/bin/env python3
"""Sweep the rough-data family across dyadic scales and fit the growth rate.

For each requested regularity s, prints R_k = ||sup_t U(t) f_k||_L4 / ||f_k||_{H^s}
over k = k_min..k_max together with the fitted log2 slope (0.25 - s expected).
"""

import argparse

from ostrovsky_lab.rough import CounterexampleSpec, counterexample_ratio, scaling_fit


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--s", type=float, nargs="+", default=[0.0, 0.125, 0.25])
    ap.add_argument("--k-min", type=int, default=3)
    ap.add_argument("--k-max", type=int, default=8)
    ap.add_argument("--nt", type=int, default=256, help="time samples per scale")
    ap.add_argument("--sign", choices="+-", default="+")
    args = ap.parse_args()

    for s in args.s:
        points = []
        for k in range(args.k_min, args.k_max + 1):
            ratio = counterexample_ratio(CounterexampleSpec(k=k, s=s),
                                         n_t=args.nt, sign=args.sign)
            points.append((k, ratio))
            print(f"s={s:<6g} k={k:<3d} R_k={ratio:.6f}")
        if len(points) >= 3:
            fit = scaling_fit(points)
            print(f"s={s:<6g} slope={fit.slope:+.6f} (expected {0.25 - s:+.3f}) "
                  f"intercept={fit.intercept:+.4f} residual={fit.residual:.2e}")
        print()
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
