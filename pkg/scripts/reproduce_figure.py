#!/usr/bin/env python3
"""Reproduce the delta = 0.2 phase-transition figure for the band-isometry property.

Runs the n=800 Monte Carlo sweep over the default m grid, prints one line per
grid point (estimate, confidence interval, analytic window), and writes the
sweep CSV plus an SVG with the two closed-form vertical rules.

Usage:
    python scripts/reproduce_figure.py [--n 800] [--delta 0.2] [--trials 200]
                                       [--seed 7] [--out phase_figure]
"""

import argparse
import sys
from pathlib import Path

from onebit.bounds import rip_m_window
from onebit.cli import render_phase_svg
from onebit.montecarlo import TrialConfig, default_phase_grid, first_upward_crossing, sweep


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=800)
    ap.add_argument("--delta", type=float, default=0.2)
    ap.add_argument("--eps1", type=float, default=0.5)
    ap.add_argument("--eps2", type=float, default=0.1)
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--threads", type=int, default=2)
    ap.add_argument("--force", action="store_true", help="allow n below the proven threshold")
    ap.add_argument("--out", default="phase_figure")
    args = ap.parse_args()

    transition = rip_m_window(args.n, args.delta, args.eps1, args.eps2, force=args.force)
    grid = default_phase_grid(transition.m_eps1, transition.m_eps2)
    print(f"closed-form m values: {transition.m_eps1:.2f} (eps1={args.eps1}), "
          f"{transition.m_eps2:.2f} (eps2={args.eps2}); q = {transition.q:.4f}")
    print(f"m grid: {grid[0]}..{grid[-1]} ({len(grid)} points), {args.trials} trials each")

    config = TrialConfig(n=args.n, m=grid[0], mode="rip", delta=args.delta,
                         trials=args.trials, base_seed=args.seed)
    result = sweep(config, grid, threads=args.threads)

    print(f"{'m':>5} {'p_hat':>8} {'ci':>19} {'window':>19} {'secs':>6}")
    for r in result.rows:
        print(f"{r.m:>5} {r.p_hat:>8.4f} [{r.ci_lo:.4f}, {r.ci_hi:.4f}] "
              f"[{r.window_lo:.4f}, {r.window_hi:.4f}] {r.wall_time:>6.2f}")

    crossing = first_upward_crossing(result.rows)
    print(f"empirical 0.5-crossing: m ~ {crossing:.2f}")

    csv_path = Path(args.out + ".csv")
    svg_path = Path(args.out + ".svg")
    csv_path.write_text(result.to_csv(), encoding="utf-8")
    title = f"band-isometry probability, n={args.n}, delta={args.delta}, {args.trials} trials/m"
    svg_path.write_text(render_phase_svg(result.rows, transition.m_eps1, transition.m_eps2, title),
                        encoding="utf-8")
    print(f"wrote {csv_path} and {svg_path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
