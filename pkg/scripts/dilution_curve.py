#!/usr/bin/env python3
"""Sweep the self-dilution overhead of the one-parameter pure family.

For cos(a)|00> + sin(a)|11> the forward rate is set by the log-negativity
and the reverse rate by the entropy of entanglement, so the round-trip
product e_n/e_c measures how lossy a distill-then-dilute cycle is.  The
ratio is 1 only at the maximally entangled point and diverges as the
state approaches a product state.

Usage:
  python3 scripts/dilution_curve.py
  python3 scripts/dilution_curve.py --steps 400 --alpha-min 0.005 --out curve.csv
"""

import argparse
from pathlib import Path

from entbat.dilution import ALPHA_MAX, curve_to_csv, self_dilution_curve


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--alpha-min", type=float, default=0.01)
    parser.add_argument("--alpha-max", type=float, default=ALPHA_MAX)
    parser.add_argument("--steps", type=int, default=200)
    parser.add_argument("--out", type=Path, default=Path("dilution_curve.csv"))
    args = parser.parse_args(argv)

    points = self_dilution_curve(
        alpha_min=args.alpha_min, alpha_max=args.alpha_max, steps=args.steps
    )
    args.out.write_text(curve_to_csv(points), encoding="utf-8")

    first, last = points[0], points[-1]
    print(f"wrote {len(points)} points to {args.out}")
    print(
        f"alpha={first.alpha:.4f}  e_n={first.e_n:.6f}  "
        f"e_c={first.e_c:.6f}  ratio={first.ratio:.4f}"
    )
    print(
        f"alpha={last.alpha:.4f}  e_n={last.e_n:.6f}  "
        f"e_c={last.e_c:.6f}  ratio={last.ratio:.4f}"
    )


if __name__ == "__main__":
    main()
