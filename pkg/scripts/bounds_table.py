#!/usr/bin/env python3
"""Side-by-side code-length requirements: one-bit map vs linear random projection.

Tabulates, for a range of point counts, the union-bound code length for the
one-bit delta-band isometry next to the classical linear-projection bound at
the same distortion, plus the injectivity requirement.

Usage:
    python scripts/bounds_table.py [--delta 0.2] [--eps 0.01]
"""

import argparse
import sys

from onebit.bounds import m_injective_orthogonal, m_linear_jl, m_rip_union


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--delta", type=float, default=0.2)
    ap.add_argument("--eps", type=float, default=0.01)
    ap.add_argument("--n", type=int, nargs="*", default=[100, 800, 10_000, 1_000_000])
    args = ap.parse_args()

    print(f"delta = {args.delta}, eps = {args.eps}")
    print(f"{'n':>9} {'one-bit band':>13} {'linear':>9} {'ratio':>6} {'injective':>10}")
    for n in args.n:
        one_bit = m_rip_union(n, args.eps, args.delta)
        linear = m_linear_jl(n, args.delta)
        inj = m_injective_orthogonal(n, args.eps)
        print(f"{n:>9} {one_bit.m_int:>13} {linear.m_int:>9} "
              f"{one_bit.m_value / linear.m_value:>6.3f} {inj.m_int:>10}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
