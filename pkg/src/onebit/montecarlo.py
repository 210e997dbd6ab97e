"""Seeded, reproducible, parallelizable trial engine for injectivity and isometry probabilities.

Determinism contract: trials are processed in fixed-size chunks, and every
chunk draws from its own random stream derived from (base_seed, m, chunk
index).  Chunk results are combined by summation, so the output is
bit-identical no matter how chunks are scheduled across workers -- 1 thread
and 8 threads produce the same bytes.

Two point sources are supported.  ``orthogonal_fast`` draws the code bits as
fair coins directly (valid for pairwise orthogonal points, whose sign bits
are independent fair coins) and makes the boundary decision on integer
differing-bit counts via hamming_band_limit.  ``explicit`` embeds a concrete
PointSet through a fresh random map every trial and mirrors check_rip's
floating-point comparisons.
"""

from __future__ import annotations

import dataclasses
import math
import statistics
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .bounds import one_to_one_window, rip_window
from .embedding import hamming_band_limit, words_needed
from .geometry import PointSet

DEFAULT_PAIR_WORD_BUDGET = 10**10

#: Pair count below which the band check compares bit rows directly; above it
#: a per-trial Gram matrix (one BLAS matmul) is cheaper.
_GRAM_THRESHOLD_N = 8


class ResourceBudgetError(ValueError):
    """The requested simulation exceeds the configured work budget."""


@dataclass(frozen=True)
class TrialConfig:
    """Parameters of one Monte Carlo estimate.

    ``delta`` must be present exactly when mode == "rip".  ``points`` must be
    present exactly when point_source == "explicit" and must have n rows.
    """

    n: int
    m: int
    mode: str
    trials: int
    base_seed: int
    delta: Optional[float] = None
    boundary: str = "strict"
    point_source: str = "orthogonal_fast"
    points: Optional[PointSet] = None

    def __post_init__(self) -> None:
        if self.mode not in ("injectivity", "rip"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.n < 2:
            raise ValueError(f"need at least 2 points, got n={self.n}")
        if self.m < 1:
            raise ValueError(f"code length must be >= 1, got m={self.m}")
        if self.trials < 1:
            raise ValueError(f"need at least 1 trial, got {self.trials}")
        if self.base_seed < 0:
            raise ValueError(f"base_seed must be non-negative, got {self.base_seed}")
        if (self.delta is not None) != (self.mode == "rip"):
            raise ValueError("delta must be given exactly when mode is 'rip'")
        if self.delta is not None and not 0.0 < self.delta < 1.0:
            raise ValueError(f"delta must lie in (0, 1), got {self.delta}")
        if self.boundary not in ("strict", "inclusive"):
            raise ValueError(f"unknown boundary convention {self.boundary!r}")
        if self.point_source not in ("orthogonal_fast", "explicit"):
            raise ValueError(f"unknown point source {self.point_source!r}")
        if (self.points is not None) != (self.point_source == "explicit"):
            raise ValueError("points must be given exactly when point_source is 'explicit'")
        if self.points is not None and self.points.n != self.n:
            raise ValueError(f"points has {self.points.n} rows, config says n={self.n}")


@dataclass(frozen=True)
class EstimateRow:
    """One Monte Carlo estimate with its Wilson interval and (optionally) an analytic window."""

    m: int
    successes: int
    trials: int
    p_hat: float
    ci_lo: float
    ci_hi: float
    window_lo: float = math.nan
    window_hi: float = math.nan
    eta_form: str = ""
    wall_time: float = 0.0


CSV_HEADER = "m,trials,successes,p_hat,ci_lo,ci_hi,window_lo,window_hi,eta_form"


def rows_csv(rows: tuple[EstimateRow, ...]) -> str:
    """Estimate rows as CSV (10 significant digits; wall times are deliberately excluded)."""
    lines = [CSV_HEADER]
    for r in rows:
        lines.append(
            f"{r.m},{r.trials},{r.successes},{r.p_hat:.10g},{r.ci_lo:.10g},"
            f"{r.ci_hi:.10g},{r.window_lo:.10g},{r.window_hi:.10g},{r.eta_form}"
        )
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class SweepResult:
    """Estimates over a strictly increasing m grid, plus the config they came from."""

    config: TrialConfig
    rows: tuple[EstimateRow, ...]

    def to_csv(self) -> str:
        return rows_csv(self.rows)


def wilson_interval_z(successes: int, trials: int, z: float) -> tuple[float, float]:
    """Wilson score interval at critical value z."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if not 0 <= successes <= trials:
        raise ValueError(f"successes {successes} outside [0, {trials}]")
    if z <= 0:
        raise ValueError("z must be positive")
    p = successes / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    center = (p + z2 / (2.0 * trials)) / denom
    half = z * math.sqrt(p * (1.0 - p) / trials + z2 / (4.0 * trials * trials)) / denom
    return max(0.0, center - half), min(1.0, center + half)


def wilson_interval(successes: int, trials: int, confidence: float = 0.95) -> tuple[float, float]:
    """Wilson score interval at the given two-sided confidence level (default 95%)."""
    if not 0.0 < confidence < 1.0:
        raise ValueError(f"confidence must lie in (0, 1), got {confidence}")
    z = statistics.NormalDist().inv_cdf(0.5 * (1.0 + confidence))
    return wilson_interval_z(successes, trials, z)


def _chunk_stream(base_seed: int, m: int, chunk_index: int) -> np.random.Generator:
    seq = np.random.SeedSequence(entropy=base_seed, spawn_key=(m, chunk_index))
    return np.random.default_rng(seq)


def _chunk_size(config: TrialConfig) -> int:
    """Fixed chunk size per config -- part of the determinism contract, never tied to worker count."""
    if config.point_source == "explicit":
        per_trial = config.m * config.points.dim * 8
        cap = 4096
        budget = 1 << 24
    elif config.mode == "injectivity":
        per_trial = config.n * words_needed(config.m) * 8
        cap = 8192
        budget = 1 << 22
    else:
        per_trial = config.n * config.m
        cap = 4096
        budget = 1 << 24
    return max(1, min(cap, budget // per_trial))


def _count_all_distinct(words: np.ndarray) -> int:
    """Number of trials whose n codes are pairwise distinct; words is (T, n, w) uint64."""
    t, n, w = words.shape
    trial_idx = np.repeat(np.arange(t), n)
    flat = words.reshape(t * n, w)
    keys = tuple(flat[:, k] for k in range(w)) + (trial_idx,)
    order = np.lexsort(keys)
    sf = flat[order]
    ti = trial_idx[order]
    dup = (ti[1:] == ti[:-1]) & np.all(sf[1:] == sf[:-1], axis=1)
    bad = np.zeros(t, dtype=bool)
    bad[ti[1:][dup]] = True
    return int(t - bad.sum())


def _pack_words(bits: np.ndarray) -> np.ndarray:
    """Pack (T, n, m) 0/1 bits into (T, n, w) uint64 words, little-endian bit order."""
    t, n, m = bits.shape
    w = words_needed(m)
    packed = np.packbits(bits.reshape(t * n, m), axis=1, bitorder="little")
    pad = w * 8 - packed.shape[1]
    if pad:
        packed = np.hstack([packed, np.zeros((t * n, pad), dtype=np.uint8)])
    return np.ascontiguousarray(packed).view(np.uint64).reshape(t, n, w)


def _count_band_ok_direct(bits: np.ndarray, s_max: int) -> int:
    t, n, m = bits.shape
    ok = np.ones(t, dtype=bool)
    for i in range(n):
        for j in range(i + 1, n):
            h = np.count_nonzero(bits[:, i, :] != bits[:, j, :], axis=1)
            ok &= np.abs(2 * h.astype(np.int64) - m) <= s_max
    return int(ok.sum())


def _count_band_ok_gram(bits: np.ndarray, s_max: int) -> int:
    t, n, m = bits.shape
    iu = np.triu_indices(n, 1)
    succ = 0
    for k in range(t):
        d = bits[k].astype(np.float64)
        gram = d @ d.T
        r = d.sum(axis=1)
        h = r[:, None] + r[None, :] - 2.0 * gram  # differing-bit counts, exact in float64
        if np.all(np.abs(2.0 * h[iu] - m) <= s_max):
            succ += 1
    return succ


def _count_rip_ok_explicit(bits: np.ndarray, geo_pairs: np.ndarray, delta: float, boundary: str) -> int:
    """Band check against arbitrary geodesic distances, mirroring check_rip's float compares."""
    t, n, m = bits.shape
    iu = np.triu_indices(n, 1)
    if n <= _GRAM_THRESHOLD_N:
        devs = np.empty((t, len(geo_pairs)))
        col = 0
        for i in range(n):
            for j in range(i + 1, n):
                h = np.count_nonzero(bits[:, i, :] != bits[:, j, :], axis=1)
                devs[:, col] = h / m - geo_pairs[col]
                col += 1
        amax = np.abs(devs).max(axis=1)
        fails = amax > delta if boundary == "strict" else amax >= delta
        return int(t - fails.sum())
    succ = 0
    for k in range(t):
        d = bits[k].astype(np.float64)
        gram = d @ d.T
        r = d.sum(axis=1)
        h = r[:, None] + r[None, :] - 2.0 * gram
        dev = np.abs(h[iu] / m - geo_pairs)
        bad = np.any(dev > delta) if boundary == "strict" else np.any(dev >= delta)
        if not bad:
            succ += 1
    return succ


def _run_chunk(config: TrialConfig, chunk_index: int, count: int, geo_pairs: Optional[np.ndarray]) -> int:
    rng = _chunk_stream(config.base_seed, config.m, chunk_index)
    n, m = config.n, config.m

    if config.point_source == "orthogonal_fast":
        if config.mode == "injectivity":
            w = words_needed(m)
            raw = rng.integers(0, 2**64, size=(count, n, w), dtype=np.uint64)
            r = m % 64
            if r:
                raw[:, :, -1] &= np.uint64((1 << r) - 1)
            return _count_all_distinct(raw)
        bits = rng.integers(0, 2, size=(count, n, m), dtype=np.uint8)
        s_max = hamming_band_limit(m, config.delta, config.boundary)
        if s_max < 0:
            return 0
        if n <= _GRAM_THRESHOLD_N:
            return _count_band_ok_direct(bits, s_max)
        return _count_band_ok_gram(bits, s_max)

    # Explicit path: a fresh map per trial.  Only the signs of the projections
    # matter, so direction normalization is skipped (it cannot change a sign).
    dim = config.points.dim
    normals = rng.standard_normal((count, m, dim))
    bits = (np.einsum("tmd,nd->tnm", normals, config.points.matrix) >= 0.0).astype(np.uint8)
    if config.mode == "injectivity":
        return _count_all_distinct(_pack_words(bits))
    return _count_rip_ok_explicit(bits, geo_pairs, config.delta, config.boundary)


def run_trials(
    config: TrialConfig,
    threads: int = 1,
    pair_word_budget: int = DEFAULT_PAIR_WORD_BUDGET,
) -> EstimateRow:
    """Estimate the success probability for one (n, m) cell.

    Success means check_one_to_one passes (injectivity mode) or every pair
    stays inside the delta band (rip mode, boundary per config).  The result
    depends only on (config), never on ``threads``.
    """
    if threads < 1:
        raise ValueError("threads must be >= 1")
    cost = config.n * (config.n - 1) // 2 * config.trials * words_needed(config.m)
    if cost > pair_word_budget:
        raise ResourceBudgetError(
            f"pairs*trials*words = {cost} exceeds budget {pair_word_budget}; "
            "reduce trials or raise pair_word_budget"
        )

    geo_pairs = None
    if config.point_source == "explicit" and config.mode == "rip":
        mat = config.points.matrix
        gram = np.clip(mat @ mat.T, -1.0, 1.0)
        geo = np.arccos(gram) / math.pi
        geo_pairs = geo[np.triu_indices(config.n, 1)]

    size = _chunk_size(config)
    counts = [size] * (config.trials // size)
    if config.trials % size:
        counts.append(config.trials % size)

    start = time.perf_counter()
    if threads == 1:
        successes = sum(_run_chunk(config, i, c, geo_pairs) for i, c in enumerate(counts))
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = [pool.submit(_run_chunk, config, i, c, geo_pairs) for i, c in enumerate(counts)]
            successes = sum(f.result() for f in futures)
    elapsed = time.perf_counter() - start

    p_hat = successes / config.trials
    lo, hi = wilson_interval(successes, config.trials)
    return EstimateRow(
        m=config.m,
        successes=successes,
        trials=config.trials,
        p_hat=p_hat,
        ci_lo=lo,
        ci_hi=hi,
        wall_time=elapsed,
    )


def sweep(
    config: TrialConfig,
    m_grid: list[int],
    threads: int = 1,
    eta_form: Optional[str] = None,
    pair_word_budget: int = DEFAULT_PAIR_WORD_BUDGET,
) -> SweepResult:
    """One estimate per m in a strictly increasing grid, each with its analytic window.

    Injectivity rows carry the e^{-C(n,2)/2^m} +- eta window (pairwise width by
    default); rip rows carry the [e^{-lambda2} - eta, e^{-lambda1} + eta]
    window, which only exists in the general form.
    """
    if not m_grid:
        raise ValueError("m grid must be nonempty")
    if any(b <= a for a, b in zip(m_grid, m_grid[1:])):
        raise ValueError("m grid must be strictly increasing")
    if config.mode == "rip" and eta_form not in (None, "general"):
        raise ValueError("rip windows exist only in the general form")

    rows = []
    for m in m_grid:
        cfg = dataclasses.replace(config, m=int(m))
        row = run_trials(cfg, threads=threads, pair_word_budget=pair_word_budget)
        if config.mode == "injectivity":
            w = one_to_one_window(config.n, int(m), eta_form or "pairwise")
        else:
            w = rip_window(config.n, int(m), config.delta)
        rows.append(dataclasses.replace(row, window_lo=w.lo, window_hi=w.hi, eta_form=w.eta_form))
    return SweepResult(config=config, rows=tuple(rows))


def first_upward_crossing(rows: tuple[EstimateRow, ...], level: float = 0.5) -> float:
    """Linearly interpolated m where the estimated curve first rises through ``level``.

    Returns NaN when the curve never crosses.  With a jagged or noisy curve
    this picks the leftmost upward crossing.
    """
    for a, b in zip(rows, rows[1:]):
        if a.p_hat < level <= b.p_hat:
            frac = (level - a.p_hat) / (b.p_hat - a.p_hat)
            return a.m + frac * (b.m - a.m)
    return math.nan


def default_phase_grid(m_eps1: float, m_eps2: float, count: int = 20) -> list[int]:
    """Evenly spaced integer m grid spanning [0.8 * m_eps1, 1.1 * m_eps2]."""
    if count < 2:
        raise ValueError("grid needs at least 2 points")
    lo = 0.8 * m_eps1
    hi = 1.1 * m_eps2
    if not lo < hi:
        raise ValueError(f"degenerate grid span [{lo}, {hi}]")
    vals = sorted({max(1, int(round(v))) for v in np.linspace(lo, hi, count)})
    return vals
