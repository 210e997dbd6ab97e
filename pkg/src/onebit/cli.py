"""Command-line surface: bound tables, embeddings, property checks, simulations, the phase figure.

Exit codes: 0 success / property holds, 1 usage error, 2 property-check
failure, 3 validity-range error (point count below a formula's proven
range without --force).
"""

from __future__ import annotations

import argparse
import math
import os
import secrets
import sys
from pathlib import Path
from xml.sax.saxutils import escape

from . import bounds as bnd
from .bounds import ValidityRangeError
from .embedding import (
    check_one_to_one,
    check_rip,
    code_set_hexdump,
    embed_points,
    hamming_distance,
    read_code_set,
    sample_map,
    write_code_set,
)
from .geometry import geodesic_distance, read_point_set
from .montecarlo import (
    TrialConfig,
    default_phase_grid,
    first_upward_crossing,
    rows_csv,
    run_trials,
    sweep,
)
from .oracles import birthday_exact, eta_comparison, rip_exact_three

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CHECK_FAILED = 2
EXIT_VALIDITY = 3

SEED_ENV_VAR = "ONEBIT_SEED"


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2; usage errors are 1 here
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _default_threads() -> int:
    return max(1, os.cpu_count() or 1)


def _default_trials(n: int) -> int:
    return 100_000 if n <= 100 else 200


def _resolve_seed(args) -> int:
    """--seed wins, then ONEBIT_SEED, then system entropy; always echoed on stderr."""
    if args.seed is not None:
        seed = args.seed
    else:
        env = os.environ.get(SEED_ENV_VAR)
        if env is not None:
            try:
                seed = int(env)
            except ValueError:
                raise ValueError(f"{SEED_ENV_VAR}={env!r} is not an integer") from None
        else:
            seed = secrets.randbits(62)
    if seed < 0:
        raise ValueError(f"--seed must be non-negative, got {seed}")
    print(f"effective seed: {seed}", file=sys.stderr)
    return seed


def _parse_m_grid(text: str) -> list[int]:
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"--m-grid must look like lo:hi:step, got {text!r}")
    try:
        lo, hi, step = (int(p) for p in parts)
    except ValueError:
        raise ValueError(f"--m-grid parts must be integers, got {text!r}") from None
    if lo < 1 or hi < lo or step < 1:
        raise ValueError(f"--m-grid needs 1 <= lo <= hi and step >= 1, got {text!r}")
    return list(range(lo, hi + 1, step))


def _write_text(path_or_dash, text: str) -> None:
    if path_or_dash is None or path_or_dash == "-":
        sys.stdout.write(text)
    else:
        Path(path_or_dash).write_text(text, encoding="utf-8")


# ---------------------------------------------------------------- bounds

def _cmd_bounds(args) -> int:
    n = args.n
    reports: list[bnd.BoundsReport] = []
    trailer: list[str] = []

    if args.eps is not None and args.delta is not None:
        reports.append(bnd.m_injective(n, args.eps, args.delta))
    if args.eps is not None:
        reports.append(bnd.m_injective_orthogonal(n, args.eps))
    if args.eps is not None and args.delta is not None and 0 < args.delta < 0.5:
        reports.append(bnd.m_rip_union(n, args.eps, args.delta))
    if args.delta is not None:
        reports.append(bnd.m_linear_jl(n, args.delta))

    if args.eps1 is not None and args.eps2 is not None:
        t11 = bnd.one_to_one_m_window(n, args.eps1, args.eps2, force=args.force)
        reports.append(bnd.BoundsReport("one_to_one_m_lower", n, t11.m_lower, max(1, math.ceil(t11.m_lower)),
                                        eps1=args.eps1, eps2=args.eps2, validity_note=t11.validity_note))
        reports.append(bnd.BoundsReport("one_to_one_m_upper", n, t11.m_upper, max(1, math.ceil(t11.m_upper)),
                                        eps1=args.eps1, eps2=args.eps2, validity_note=t11.validity_note))
        if args.delta is not None and 0 < args.delta < 0.5:
            rt = bnd.rip_m_window(n, args.delta, args.eps1, args.eps2, force=args.force)
            for fid, val in (("rip_m_eps1", rt.m_eps1), ("rip_m_eps2", rt.m_eps2),
                             ("rip_crossing_eps1", rt.crossing_eps1), ("rip_crossing_eps2", rt.crossing_eps2)):
                reports.append(bnd.BoundsReport(fid, n, val, max(1, math.ceil(val)) if math.isfinite(val) else 0,
                                                delta=args.delta, eps1=args.eps1, eps2=args.eps2,
                                                validity_note=rt.validity_note))
            trailer.append(f"q (rate constant) = {rt.q:.10g}   [1/(2 delta^2) = {1.0 / (2 * args.delta**2):.10g}]")

    if not reports and args.m is None:
        raise ValueError("nothing to evaluate: pass --eps and/or --delta (and --eps1/--eps2 for transition windows)")

    if reports:
        width = max(len(r.formula_id) for r in reports)
        lines = []
        for r in reports:
            note = f"  ({r.validity_note})" if r.validity_note else ""
            lines.append(f"{r.formula_id:<{width}}  m_value = {r.m_value:<16.10g} m_int = {r.m_int}{note}")
        print("\n".join(lines + trailer))

    if args.out:
        _write_text(args.out, bnd.bounds_reports_csv(reports))
    if args.m is not None:
        mode = "rip" if args.delta is not None and 0 < args.delta < 0.5 else "injectivity"
        if reports:
            print()
        print(bnd.window_csv(mode, n, [args.m], args.delta if mode == "rip" else None), end="")
    return EXIT_OK


# ---------------------------------------------------------------- embed

def _cmd_embed(args) -> int:
    seed = _resolve_seed(args)
    points = read_point_set(args.points, normalize=args.normalize)
    emap = sample_map(args.m, points.dim, seed)
    codes = embed_points(emap, points)
    write_code_set(codes, args.codes)

    out = args.out if args.out else str(args.codes) + ".pairs.csv"
    lines = ["i,j,hamming,geodesic,deviation"]
    pts = [points.point(i) for i in range(points.n)]
    for i in range(points.n):
        for j in range(i + 1, points.n):
            dh = hamming_distance(codes[i], codes[j])
            dg = geodesic_distance(pts[i], pts[j])
            lines.append(f"{i},{j},{dh:.10g},{dg:.10g},{dh - dg:.10g}")
    _write_text(out, "\n".join(lines) + "\n")
    print(f"wrote {codes.n} codes of length {codes.m} to {args.codes}; pair table to {out}", file=sys.stderr)
    if args.hexdump:
        sys.stdout.write(code_set_hexdump(codes))
    return EXIT_OK


# ---------------------------------------------------------------- check

def _cmd_check(args) -> int:
    points = read_point_set(args.points, normalize=args.normalize)
    codes = read_code_set(args.codes)
    if codes.n != points.n:
        raise ValueError(f"--codes has {codes.n} codes but --points has {points.n} points")

    if args.delta is not None:
        report = check_rip(codes, points, args.delta, boundary=args.boundary)
        print(f"delta = {report.delta}, boundary = {args.boundary}")
        print(f"max deviation = {report.max_deviation:.10g}")
        if report.passed:
            print("RIP check: PASS")
            return EXIT_OK
        print(f"RIP check: FAIL ({len(report.violations)} violating pairs)")
        for v in report.violations:
            print(f"  pair {v.pair}: hamming={v.hamming:.10g} geodesic={v.geodesic:.10g} deviation={v.deviation:.10g}")
        return EXIT_CHECK_FAILED

    ok, collisions = check_one_to_one(codes)
    if ok:
        print("one-to-one check: PASS")
        return EXIT_OK
    print(f"one-to-one check: FAIL ({len(collisions)} colliding pairs)")
    for i, j in collisions:
        print(f"  codes {i} and {j} are equal")
    return EXIT_CHECK_FAILED


# ---------------------------------------------------------------- simulate / sweep

def _build_config(args, m: int, seed: int) -> TrialConfig:
    mode = "rip" if args.delta is not None else "injectivity"
    points = None
    source = "orthogonal_fast"
    n = args.n
    if getattr(args, "points", None):
        points = read_point_set(args.points, normalize=args.normalize)
        source = "explicit"
        if n is not None and n != points.n:
            raise ValueError(f"--n {n} contradicts --points with {points.n} rows")
        n = points.n
    if n is None:
        raise ValueError("--n is required (or pass --points)")
    trials = args.trials if args.trials is not None else _default_trials(n)
    return TrialConfig(
        n=n,
        m=m,
        mode=mode,
        trials=trials,
        base_seed=seed,
        delta=args.delta,
        boundary=args.boundary,
        point_source=source,
        points=points,
    )


def _cmd_simulate(args) -> int:
    seed = _resolve_seed(args)
    config = _build_config(args, args.m, seed)
    row = run_trials(config, threads=args.threads)
    _write_text(args.out, rows_csv((row,)))
    print(f"p_hat = {row.p_hat:.6g} [{row.ci_lo:.6g}, {row.ci_hi:.6g}] in {row.wall_time:.2f}s", file=sys.stderr)
    return EXIT_OK


def _cmd_sweep(args) -> int:
    seed = _resolve_seed(args)
    grid = _parse_m_grid(args.m_grid)
    config = _build_config(args, grid[0], seed)
    result = sweep(config, grid, threads=args.threads, eta_form=args.eta_form)
    _write_text(args.out, result.to_csv())
    return EXIT_OK


# ---------------------------------------------------------------- figure

def _svg_x(m, m_lo, m_hi, left, right):
    return left + (m - m_lo) / (m_hi - m_lo) * (right - left)


def _svg_y(p, top, bottom):
    return bottom - p * (bottom - top)


def render_phase_svg(rows, vline_red: float, vline_green: float, title: str) -> str:
    """Empirical curve as a single polyline, plus two labeled vertical rules.

    The red rule marks the closed-form m for the eps1 threshold, the green
    rule the closed-form m for eps2, matching the simulation figure layout.
    """
    width, height = 720, 480
    left, right, top, bottom = 70, width - 30, 56, height - 56
    ms = [r.m for r in rows]
    m_lo = min(ms + [vline_red, vline_green])
    m_hi = max(ms + [vline_red, vline_green])
    span = m_hi - m_lo
    m_lo -= 0.02 * span
    m_hi += 0.02 * span

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="13">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2:.1f}" y="24" text-anchor="middle" font-size="15">{escape(title)}</text>',
    ]
    for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
        y = _svg_y(frac, top, bottom)
        parts.append(f'<line x1="{left}" y1="{y:.1f}" x2="{right}" y2="{y:.1f}" stroke="#dddddd"/>')
        parts.append(f'<text x="{left - 8}" y="{y + 4:.1f}" text-anchor="end">{frac:g}</text>')
    n_ticks = 6
    for k in range(n_ticks + 1):
        m = m_lo + k / n_ticks * (m_hi - m_lo)
        x = _svg_x(m, m_lo, m_hi, left, right)
        parts.append(f'<line x1="{x:.1f}" y1="{bottom}" x2="{x:.1f}" y2="{bottom + 5}" stroke="black"/>')
        parts.append(f'<text x="{x:.1f}" y="{bottom + 20}" text-anchor="middle">{m:.0f}</text>')
    parts.append(f'<line x1="{left}" y1="{top}" x2="{left}" y2="{bottom}" stroke="black"/>')
    parts.append(f'<line x1="{left}" y1="{bottom}" x2="{right}" y2="{bottom}" stroke="black"/>')
    parts.append(f'<text x="{(left + right) / 2:.1f}" y="{height - 14}" text-anchor="middle">m</text>')
    parts.append(f'<text x="18" y="{(top + bottom) / 2:.1f}" text-anchor="middle" '
                 f'transform="rotate(-90 18 {(top + bottom) / 2:.1f})">estimated probability</text>')

    for value, color, tag in ((vline_red, "red", "eps1 closed form"), (vline_green, "green", "eps2 closed form")):
        x = _svg_x(value, m_lo, m_hi, left, right)
        parts.append(f'<line class="rule" x1="{x:.1f}" y1="{top}" x2="{x:.1f}" y2="{bottom}" '
                     f'stroke="{color}" stroke-width="1.5"/>')
        parts.append(f'<text class="rule-label" x="{x + 4:.1f}" y="{top + 14}" fill="{color}">'
                     f'{escape(tag)}: m={value:.1f}</text>')

    pts = " ".join(
        f"{_svg_x(r.m, m_lo, m_hi, left, right):.2f},{_svg_y(r.p_hat, top, bottom):.2f}" for r in rows
    )
    parts.append(f'<polyline points="{pts}" fill="none" stroke="#1f77b4" stroke-width="1.8"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _cmd_figure(args) -> int:
    seed = _resolve_seed(args)
    transition = bnd.rip_m_window(args.n, args.delta, args.eps1, args.eps2, force=args.force)
    if args.m_grid:
        grid = _parse_m_grid(args.m_grid)
    else:
        grid = default_phase_grid(transition.m_eps1, transition.m_eps2)
    trials = args.trials if args.trials is not None else 200
    config = TrialConfig(
        n=args.n,
        m=grid[0],
        mode="rip",
        trials=trials,
        base_seed=seed,
        delta=args.delta,
        boundary=args.boundary,
    )
    result = sweep(config, grid, threads=args.threads)

    base = str(args.out)
    for suffix in (".svg", ".csv"):
        if base.endswith(suffix):
            base = base[: -len(suffix)]
    csv_path = base + ".csv"
    svg_path = base + ".svg"
    Path(csv_path).write_text(result.to_csv(), encoding="utf-8")
    title = f"delta-band isometry probability, n={args.n}, delta={args.delta}, {trials} trials/m"
    Path(svg_path).write_text(
        render_phase_svg(result.rows, transition.m_eps1, transition.m_eps2, title), encoding="utf-8"
    )

    crossing = first_upward_crossing(result.rows)
    print(f"closed-form m: eps1={args.eps1} -> {transition.m_eps1:.4g}, eps2={args.eps2} -> {transition.m_eps2:.4g}")
    print(f"empirical 0.5-crossing: m ~ {crossing:.4g}")
    print(f"wrote {csv_path} and {svg_path}")
    return EXIT_OK


# ---------------------------------------------------------------- oracle

def _cmd_oracle(args) -> int:
    if args.which == "birthday":
        if args.n is None or args.m is None:
            raise ValueError("oracle birthday needs --n and --m")
        p = birthday_exact(args.n, args.m)
        print(f"{p.float_value:.10g} = {p.fraction_string()}")
    elif args.which == "rip_three":
        if args.m is None or args.delta is None:
            raise ValueError("oracle rip_three needs --m and --delta")
        p = rip_exact_three(args.m, args.delta, boundary=args.boundary)
        print(f"{p.float_value:.10g} = {p.fraction_string()}")
    elif args.which == "eta":
        if args.n is None or args.m is None:
            raise ValueError("oracle eta needs --n and --m")
        rep = eta_comparison(args.n, args.m)
        print(f"exact          = {rep.exact.float_value:.10g} = {rep.exact.fraction_string()}")
        print(f"poisson        = {rep.poisson_estimate:.10g}")
        print(f"deviation      = {rep.deviation:.10g}")
        print(f"eta (pairwise) = {rep.eta_pairwise:.10g}  contains deviation: {rep.within_pairwise}")
        print(f"eta (general)  = {rep.eta_general:.10g}  contains deviation: {rep.within_general}")
    return EXIT_OK


# ---------------------------------------------------------------- parser

def _add_common_sim_flags(p: _Parser) -> None:
    p.add_argument("--trials", type=int, default=None, help="trials per estimate (default: 100000 for n<=100, else 200)")
    p.add_argument("--seed", type=int, default=None, help=f"base seed (default: ${SEED_ENV_VAR} or system entropy)")
    p.add_argument("--threads", type=int, default=_default_threads(), help="worker threads (output is thread-count independent)")
    p.add_argument("--boundary", choices=["strict", "inclusive"], default="strict",
                   help="does a deviation exactly equal to delta pass (strict) or fail (inclusive)")
    p.add_argument("--out", default=None, help="output CSV path (default: stdout)")


def build_parser() -> _Parser:
    parser = _Parser(prog="onebit", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("bounds", parents=[], help="evaluate closed-form code-length bounds", add_help=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--eps", type=float, default=None)
    p.add_argument("--eps1", type=float, default=None)
    p.add_argument("--eps2", type=float, default=None)
    p.add_argument("--m", type=int, default=None, help="also print the probability window at this m")
    p.add_argument("--force", action="store_true", help="evaluate transition formulas below their proven n")
    p.add_argument("--out", default=None, help="also write the table as CSV")
    p.set_defaults(func=_cmd_bounds)

    p = sub.add_parser("embed", help="embed a points CSV through a seeded random map")
    p.add_argument("--points", required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--codes", required=True, help="output path for the binary code set")
    p.add_argument("--out", default=None, help="pairwise-distance CSV path (default: CODES.pairs.csv)")
    p.add_argument("--normalize", action="store_true", help="rescale input rows to unit norm")
    p.add_argument("--hexdump", action="store_true", help="also print codes as hex")
    p.set_defaults(func=_cmd_embed)

    p = sub.add_parser("check", help="check codes against points: band isometry (--delta) or one-to-one")
    p.add_argument("--points", required=True)
    p.add_argument("--codes", required=True)
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--boundary", choices=["strict", "inclusive"], default="strict")
    p.add_argument("--normalize", action="store_true")
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("simulate", help="one Monte Carlo estimate (mode: rip when --delta given, else injectivity)")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--points", default=None, help="explicit point set (default: orthogonal fast path)")
    p.add_argument("--normalize", action="store_true")
    _add_common_sim_flags(p)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("sweep", help="estimates over an m grid with analytic windows attached")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--m-grid", required=True, help="lo:hi:step, inclusive")
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--points", default=None)
    p.add_argument("--normalize", action="store_true")
    p.add_argument("--eta-form", choices=["pairwise", "general"], default=None,
                   help="window width form for injectivity sweeps (default pairwise)")
    _add_common_sim_flags(p)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("figure", help="phase-transition figure: sweep CSV + SVG with closed-form rules")
    p.add_argument("--n", type=int, default=800)
    p.add_argument("--delta", type=float, default=0.2)
    p.add_argument("--eps1", type=float, default=0.5)
    p.add_argument("--eps2", type=float, default=0.1)
    p.add_argument("--m-grid", default=None, help="override the default 20-point grid")
    p.add_argument("--trials", type=int, default=None, help="trials per m (default 200)")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--threads", type=int, default=_default_threads())
    p.add_argument("--boundary", choices=["strict", "inclusive"], default="strict")
    p.add_argument("--force", action="store_true")
    p.add_argument("--out", default="phase_figure", help="output base path (writes BASE.csv and BASE.svg)")
    p.set_defaults(func=_cmd_figure)

    p = sub.add_parser("oracle", help="exact probabilities as fractions and decimals")
    p.add_argument("which", choices=["birthday", "rip_three", "eta"])
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--boundary", choices=["strict", "inclusive"], default="strict")
    p.set_defaults(func=_cmd_oracle)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except ValidityRangeError as exc:
        print(f"onebit: validity range: {exc}", file=sys.stderr)
        return EXIT_VALIDITY
    except (ValueError, OSError) as exc:
        print(f"onebit: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
