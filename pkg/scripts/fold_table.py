"""Fold angle against fold length for the default 3 in lay-flat tube."""

import argparse
import math

from tubeweave.tube import fold_angle, inflated_diameter


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--d-flat-mm", type=float, default=76.2)
    ap.add_argument("--lengths", type=float, nargs="+", default=[10, 20, 30, 40, 50, 60, 70, 80])
    args = ap.parse_args()

    d = inflated_diameter(args.d_flat_mm)
    print(f"D_infl = {d:.3f} mm")
    print(f"{'L_fold':>8} {'x':>10} {'theta rad':>10} {'theta deg':>10}")
    for l_fold in args.lengths:
        g = fold_angle(l_fold, d)
        print(f"{l_fold:8.1f} {g.x:10.4f} {g.theta:10.6f} {math.degrees(g.theta):10.2f}")


if __name__ == "__main__":
    main()
