"""Exact small-instance probabilities that ground-truth the closed-form bounds.

Everything here is computed in exact rational arithmetic over fair-coin
models, so all values are dyadic rationals: the birthday product for
injectivity of random codes, binomial tail sums, and an exact three-point
distance-preservation probability via a multinomial dynamic program.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .embedding import hamming_band_limit


@dataclass(frozen=True)
class ExactProbability:
    """An exactly known probability with the method that produced it."""

    value: Fraction
    method: str

    def __post_init__(self) -> None:
        if not 0 <= self.value <= 1:
            raise ValueError(f"probability {self.value} outside [0, 1]")

    @property
    def float_value(self) -> float:
        return float(self.value)

    def fraction_string(self) -> str:
        return f"{self.value.numerator}/{self.value.denominator}"


def birthday_exact(n: int, m: int) -> ExactProbability:
    """P(n iid uniform m-bit codes are all distinct) = prod_{k=1}^{n-1} (1 - k/2^m).

    This is the exact injectivity probability of the one-bit map on n pairwise
    orthogonal points, whose codes are iid uniform.  Zero when n > 2^m by
    pigeonhole.
    """
    if n < 2:
        raise ValueError(f"need at least 2 points, got {n}")
    if m < 1:
        raise ValueError(f"code length must be >= 1, got {m}")
    space = 1 << m
    if n > space:
        return ExactProbability(Fraction(0), "birthday_product")
    num = 1
    for k in range(1, n):
        num *= space - k
    return ExactProbability(Fraction(num, space ** (n - 1)), "birthday_product")


def binomial_tail(m: int, a: int) -> ExactProbability:
    """Exact P(Y >= a) for Y ~ Binomial(m, 1/2)."""
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    if not 0 <= a <= m + 1:
        raise ValueError(f"tail start {a} outside [0, {m + 1}]")
    total = sum(math.comb(m, k) for k in range(a, m + 1))
    return ExactProbability(Fraction(total, 1 << m), "binomial_tail")


def binomial_tail_complement(m: int, a: int) -> ExactProbability:
    """Exact P(Y < a) for Y ~ Binomial(m, 1/2); complements binomial_tail."""
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    if not 0 <= a <= m + 1:
        raise ValueError(f"tail start {a} outside [0, {m + 1}]")
    total = sum(math.comb(m, k) for k in range(0, a))
    return ExactProbability(Fraction(total, 1 << m), "binomial_tail")


def rip_exact_three(m: int, delta: float, boundary: str = "strict") -> ExactProbability:
    """Exact P(all three pairwise code distances lie within delta of 1/2) for 3 orthogonal points.

    Each of the m coordinates independently contributes one disagreement
    pattern over the three points: no disagreement with probability 1/4, or
    one of the three "one point differs" patterns with probability 1/4 each.
    Summing the multinomial pmf of the pattern counts (a, b, c) over the cells
    where all of H12 = a+b, H13 = a+c, H23 = b+c fall in the band around m/2
    gives the probability exactly, with denominator 4^m.

    The ``boundary`` tag selects whether a deviation exactly equal to delta
    passes (``strict``) or fails (``inclusive``); see hamming_band_limit.
    """
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    s_max = hamming_band_limit(m, delta, boundary)
    if s_max < 0:
        return ExactProbability(Fraction(0), "multinomial_dp")
    # Pass band on a differing-bit count H: |2H - m| <= s_max.
    h_lo = max(0, -((s_max - m) // 2))  # ceil((m - s_max) / 2)
    h_hi = min(m, (m + s_max) // 2)
    if h_lo > h_hi:
        return ExactProbability(Fraction(0), "multinomial_dp")

    count = 0
    for a in range(0, m + 1):
        b_lo = max(0, h_lo - a)
        b_hi = min(m - a, h_hi - a)
        ca = math.comb(m, a)
        for b in range(b_lo, b_hi + 1):
            c_lo = max(0, h_lo - a, h_lo - b)
            c_hi = min(m - a - b, h_hi - a, h_hi - b)
            if c_lo > c_hi:
                continue
            cb = ca * math.comb(m - a, b)
            rest = m - a - b
            for c in range(c_lo, c_hi + 1):
                count += cb * math.comb(rest, c)
    return ExactProbability(Fraction(count, 4**m), "multinomial_dp")


@dataclass(frozen=True)
class EtaComparison:
    """Exact injectivity probability vs its Poisson estimate, against both error widths."""

    n: int
    m: int
    exact: ExactProbability
    poisson_estimate: float
    deviation: float
    eta_pairwise: float
    eta_general: float
    within_pairwise: bool
    within_general: bool


def eta_comparison(n: int, m: int) -> EtaComparison:
    """How far is the exact birthday probability from exp(-expected collisions)?

    Compares the exact deviation D = |P_exact - e^{-C(n,2)/2^m}| against the
    two Poisson-approximation error widths: the pairwise-independence form
    C(n,2) * 2^{-2m} and the general neighborhood form C(n,2)(4n-7) * 2^{-2m}.
    Neither containment is assumed; both are reported as observed.
    """
    exact = birthday_exact(n, m)
    pairs = math.comb(n, 2)
    lam = pairs / 2.0**m
    poisson = math.exp(-lam)
    deviation = abs(exact.float_value - poisson)
    eta_pairwise = pairs * 4.0 ** (-m)
    eta_general = pairs * (4 * n - 7) * 4.0 ** (-m)
    return EtaComparison(
        n=n,
        m=m,
        exact=exact,
        poisson_estimate=poisson,
        deviation=deviation,
        eta_pairwise=eta_pairwise,
        eta_general=eta_general,
        within_pairwise=deviation <= eta_pairwise,
        within_general=deviation <= eta_general,
    )
