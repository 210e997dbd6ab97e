"""Closed-form sample-size bounds and phase-transition windows, evaluated carefully.

Quantities here span hundreds of orders of magnitude in m, so every
exponential-scale expression is assembled in log space and only exponentiated
at the end.  Binomial tail probabilities are exact dyadic rationals (see
p_delta_exact); the Stirling-style envelopes around them are floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

LOG_2PI = math.log(2.0 * math.pi)
LN2 = math.log(2.0)

#: Smallest point counts for which the two transition-window theorems are proven.
MIN_N_ONE_TO_ONE = 10
MIN_N_RIP = 800


class ValidityRangeError(ValueError):
    """Inputs are outside the proven range of a closed form (overridable with force)."""


class NoCrossingError(ValueError):
    """A threshold equation has no solution in the searched range."""


@dataclass(frozen=True)
class BoundsReport:
    """One evaluated sample-size formula: the raw real value and its ceiled integer."""

    formula_id: str
    n: int
    m_value: float
    m_int: int
    delta: Optional[float] = None
    eps: Optional[float] = None
    eps1: Optional[float] = None
    eps2: Optional[float] = None
    validity_note: str = ""


def _report(formula_id: str, n: int, m_value: float, **kw) -> BoundsReport:
    # Formulas can dip below 1 for tiny n or lax tolerances; one direction is
    # always needed, so the integer recommendation is clamped there.
    m_int = max(1, math.ceil(m_value))
    return BoundsReport(formula_id=formula_id, n=n, m_value=m_value, m_int=m_int, **kw)


def _check_n(n: int) -> None:
    if n < 2:
        raise ValueError(f"need at least 2 points, got {n}")


def _check_unit(name: str, value: float) -> None:
    if not 0.0 < value < 1.0:
        raise ValueError(f"{name} must lie in (0, 1), got {value}")


def m_injective(n: int, eps: float, delta_sep: float) -> BoundsReport:
    """Code length making the one-bit map injective with probability >= 1 - eps.

    Valid for point sets whose pairwise geodesic distances all exceed
    1 - delta_sep:  m >= ln(n^2 / (2 eps)) / ln(1 / delta_sep).
    """
    _check_n(n)
    _check_unit("eps", eps)
    if not 0.0 < delta_sep < 1.0:
        raise ValueError(f"delta_sep must lie in (0, 1), got {delta_sep} (the bound diverges at 1)")
    m_value = math.log(n * n / (2.0 * eps)) / math.log(1.0 / delta_sep)
    return _report("injective", n, m_value, eps=eps, delta=delta_sep)


def m_injective_orthogonal(n: int, eps: float) -> BoundsReport:
    """Injectivity code length for pairwise orthogonal points: 2 log2 n + log2(1/(2 eps))."""
    _check_n(n)
    _check_unit("eps", eps)
    m_value = 2.0 * math.log2(n) + math.log2(1.0 / (2.0 * eps))
    return _report("injective_orthogonal", n, m_value, eps=eps)


def m_rip_union(n: int, eps: float, delta: float) -> BoundsReport:
    """Code length for the delta-band isometry on orthogonal points, by union bound.

    m >= ln(n^2 / eps) / (2 delta^2); proven for delta < 1/2.
    """
    _check_n(n)
    _check_unit("eps", eps)
    if not 0.0 < delta < 0.5:
        raise ValidityRangeError(f"delta must lie in (0, 1/2) for this bound, got {delta}")
    m_value = math.log(n * n / eps) / (2.0 * delta * delta)
    return _report("rip_union", n, m_value, eps=eps, delta=delta)


def m_linear_jl(n: int, delta: float) -> BoundsReport:
    """Classical linear random-projection bound, for comparison tables only.

    m >= 4 ln n / (delta^2/2 - delta^3/3).
    """
    _check_n(n)
    _check_unit("delta", delta)
    m_value = 4.0 * math.log(n) / (delta * delta / 2.0 - delta**3 / 3.0)
    return _report("linear_jl", n, m_value, delta=delta)


def tail_start(m: int, delta: float) -> int:
    """The index A = ceil(m/2 + m*delta) where the deviation tail begins."""
    return math.ceil(m / 2.0 + m * delta)


def p_delta_exact(m: int, delta: float) -> Fraction:
    """Exact P(|Y - m/2| >= m*delta as realized by the tail sum), Y ~ Bin(m, 1/2).

    Computed as 2 * 2^{-m} * sum_{k=A}^{m} C(m, k) with A = ceil(m/2 + m*delta),
    in exact integer arithmetic.  Empty tails (A > m) give 0.
    """
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    if not 0.0 < delta < 0.5:
        raise ValueError(f"delta must lie in (0, 1/2), got {delta}")
    a = tail_start(m, delta)
    if a > m:
        return Fraction(0)
    total = sum(math.comb(m, k) for k in range(a, m + 1))
    return Fraction(2 * total, 1 << m)


def p_delta_float(m: int, delta: float) -> float:
    """Float view of p_delta_exact; switches to log-space summation for very large m."""
    if m <= 2000:
        return float(p_delta_exact(m, delta))
    return math.exp(log_p_delta(m, delta))


def log_p_delta(m: int, delta: float) -> float:
    """ln p_delta via log-gamma and stable log-sum-exp, for m too large for exact sums."""
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    if not 0.0 < delta < 0.5:
        raise ValueError(f"delta must lie in (0, 1/2), got {delta}")
    a = tail_start(m, delta)
    if a > m:
        return -math.inf
    lgm = math.lgamma(m + 1)
    logs = [lgm - math.lgamma(k + 1) - math.lgamma(m - k + 1) for k in range(a, m + 1)]
    peak = max(logs)
    s = sum(math.exp(v - peak) for v in logs)
    return LN2 + peak + math.log(s) - m * LN2


def exponent_rate(delta: float) -> float:
    """Per-unit-m exponential decay rate -1/2 ln(1-4d^2) + d ln((1-2d)/(1+2d)); negative."""
    if not 0.0 < delta < 0.5:
        raise ValueError(f"delta must lie in (0, 1/2), got {delta}")
    return -0.5 * math.log1p(-4.0 * delta * delta) - 2.0 * delta * math.atanh(2.0 * delta)


def taylor_rates(delta: float) -> tuple[float, float]:
    """Simplified (lower, upper) per-unit-m rates for delta < 1/4.

    Derived from the bracket -x/(1-x) <= ln(1-x) <= -x:
    lower = (-2 d^2 - 4 d^3)/(1 - 2d), upper = (-2 d^2 + 8 d^3)/(1 - 4 d^2).
    """
    if not 0.0 < delta < 0.25:
        raise ValueError(f"the simplified rates require delta in (0, 1/4), got {delta}")
    d2 = delta * delta
    d3 = d2 * delta
    lower = (-2.0 * d2 - 4.0 * d3) / (1.0 - 2.0 * delta)
    upper = (-2.0 * d2 + 8.0 * d3) / (1.0 - 4.0 * d2)
    return lower, upper


def _log_pairs(n: int) -> float:
    return math.log(n) + math.log(n - 1) - LN2


@dataclass(frozen=True)
class LambdaBounds:
    """Envelopes around the expected number of pairs whose distance leaves the delta band.

    lambda_exact = C(n,2) * p_delta_exact(m, delta) is the true expectation;
    lambda1 <= lambda_exact <= lambda2 are its closed-form Stirling envelopes,
    and big_lambda is the shared exponential factor C(n,2)/sqrt(2 pi) * e^{m*rate}.
    Log fields are kept because the plain floats under/overflow for large m.
    """

    lambda_exact: float
    lambda1: float
    lambda2: float
    big_lambda: float
    log_lambda1: float
    log_lambda2: float
    rate: float
    taylor: bool


def lambda_bounds(n: int, m: int, delta: float, taylor: bool = False) -> LambdaBounds:
    """Evaluate the expected-failing-pairs envelopes at (n, m, delta).

    With ``taylor`` the exponents use the simplified delta < 1/4 rates instead
    of the exact rate (the prefactors are unchanged).
    """
    _check_n(n)
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    rate = exponent_rate(delta)
    if taylor:
        lo_rate, hi_rate = taylor_rates(delta)
    else:
        lo_rate, hi_rate = rate, rate
    logc = _log_pairs(n)
    log_l1 = logc - 1.0 / 6.0 - 0.5 * (LOG_2PI + math.log(m)) + m * lo_rate
    log_l2 = logc + 1.0 / 12.0 + 0.5 * (math.log(m) - LOG_2PI) + m * hi_rate
    big = math.exp(logc - 0.5 * LOG_2PI + m * rate)
    lam_exact = float(math.comb(n, 2) * p_delta_exact(m, delta)) if m <= 2000 else math.exp(logc + log_p_delta(m, delta))
    return LambdaBounds(
        lambda_exact=lam_exact,
        lambda1=math.exp(log_l1),
        lambda2=math.exp(log_l2),
        big_lambda=big,
        log_lambda1=log_l1,
        log_lambda2=log_l2,
        rate=rate,
        taylor=taylor,
    )


def stein_chen_eta(n: int, p: float, form: str) -> float:
    """Poisson-approximation error width for C(n,2) indicators with success probability p.

    ``pairwise``: C(n,2) p^2 (pairwise-independent / positively-associated form).
    ``general``: C(n,2) (1 + 4(n-2)) p^2, counting the <= 2(n-2) neighbors of
    each pair that share a point.
    """
    _check_n(n)
    pairs = math.comb(n, 2)
    if form == "pairwise":
        return pairs * p * p
    if form == "general":
        return pairs * (4 * n - 7) * p * p
    raise ValueError(f"unknown eta form {form!r}")


@dataclass(frozen=True)
class PhaseWindow:
    """A probability interval [lo, hi] with its rate and error-width ingredients.

    lo = max(0, e^{-lambda_hi} - eta) and hi = min(1, e^{-lambda_lo} + eta).
    """

    lo: float
    hi: float
    lambda_lo: float
    lambda_hi: float
    eta: float
    eta_form: str


def _clamped_window(lambda_lo: float, lambda_hi: float, eta: float, eta_form: str) -> PhaseWindow:
    lo = max(0.0, math.exp(-lambda_hi) - eta)
    hi = min(1.0, math.exp(-lambda_lo) + eta)
    return PhaseWindow(lo=lo, hi=hi, lambda_lo=lambda_lo, lambda_hi=lambda_hi, eta=eta, eta_form=eta_form)


def one_to_one_window(n: int, m: int, eta_form: str = "pairwise") -> PhaseWindow:
    """Window containing P(injective) for n orthogonal points at code length m.

    The Poisson rate is lambda = C(n,2)/2^m; the window is e^{-lambda} +- eta
    with eta = C(n,2) 2^{-2m} (pairwise form) or C(n,2)(4n-7) 2^{-2m}
    (general form), clamped to [0, 1].
    """
    _check_n(n)
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    if m <= 1000:
        # Exact dyadic arithmetic while 2^-m is representable.
        pairs = math.comb(n, 2)
        lam = pairs * 2.0**-m
        p = 2.0**-m
    else:
        lam = math.exp(_log_pairs(n) - m * LN2)
        p = math.exp(-m * LN2)
    eta = stein_chen_eta(n, p, eta_form)
    return _clamped_window(lam, lam, eta, eta_form)


def rip_window(n: int, m: int, delta: float, use_p_bound: bool = False) -> PhaseWindow:
    """Window containing P(the map is a delta-isometry) for n orthogonal points.

    Uses the closed-form envelopes lambda1 <= lambda2 from lambda_bounds and
    the general error width eta = C(n,2)(4n-7) p^2.  By default p is the exact
    tail probability; with ``use_p_bound`` the printed upper envelope for p is
    substituted instead.
    """
    lb = lambda_bounds(n, m, delta)
    if use_p_bound:
        p = math.exp(1.0 / 12.0 + 0.5 * (math.log(m) - LOG_2PI) + m * lb.rate)
    else:
        p = p_delta_float(m, delta)
    eta = stein_chen_eta(n, p, "general")
    return _clamped_window(lb.lambda1, lb.lambda2, eta, "general")


@dataclass(frozen=True)
class OneToOneTransition:
    """Closed-form code lengths bracketing the injectivity phase transition."""

    n: int
    eps1: float
    eps2: float
    m_lower: float
    m_upper: float
    validity_note: str


def one_to_one_m_window(n: int, eps1: float, eps2: float, force: bool = False) -> OneToOneTransition:
    """Code lengths where P(injective) passes 1 - eps1 and 1 - eps2, for orthogonal points.

    m_lower = log2(n(n-1) / (2 ln(1/(1 - eps1/1.01)))),
    m_upper = log2(n(n-1) / (2 ln(1/(1 - eps2/0.99)))).
    Proven for n >= 10 (the error width is then below 1% of the Poisson term);
    pass ``force`` to evaluate outside that range anyway.
    """
    _check_n(n)
    _check_unit("eps1", eps1)
    _check_unit("eps2", eps2)
    if not eps2 < eps1:
        raise ValueError(f"need eps2 < eps1, got eps1={eps1}, eps2={eps2}")
    if n < MIN_N_ONE_TO_ONE and not force:
        raise ValidityRangeError(f"transition formulas proven for n >= {MIN_N_ONE_TO_ONE}, got n={n} (use force to evaluate anyway)")
    d1 = math.log(1.0 / (1.0 - eps1 / 1.01))
    d2 = math.log(1.0 / (1.0 - eps2 / 0.99))
    m_lower = math.log2(n * (n - 1) / (2.0 * d1))
    m_upper = math.log2(n * (n - 1) / (2.0 * d2))
    if not m_lower < m_upper:
        raise ValueError(f"eps1={eps1}, eps2={eps2} too close: thresholds cross (m_lower={m_lower}, m_upper={m_upper})")
    note = f"requires n >= {MIN_N_ONE_TO_ONE}" + (" (forced)" if n < MIN_N_ONE_TO_ONE else "")
    return OneToOneTransition(n=n, eps1=eps1, eps2=eps2, m_lower=m_lower, m_upper=m_upper, validity_note=note)


@dataclass(frozen=True)
class RipTransition:
    """Closed-form code lengths bracketing the isometry phase transition, plus crossings.

    m_eps1 and m_eps2 are the two printed closed forms; crossing_eps1 and
    crossing_eps2 are the numeric roots of lambda1(m) and lambda2(m) against
    the matching thresholds, found by bisection (NaN when no crossing exists
    in the searched range).  q is the rate constant, approximately 1/(2 delta^2).
    """

    n: int
    delta: float
    eps1: float
    eps2: float
    q: float
    m_eps1: float
    m_eps2: float
    crossing_eps1: float
    crossing_eps2: float
    validity_note: str


def rip_m_window(n: int, delta: float, eps1: float, eps2: float, force: bool = False) -> RipTransition:
    """Evaluate both printed closed forms for the isometry transition, verbatim.

    m_eps1 = q [ln A - ln ln A] with A = n(n-1) / (2 sqrt(2 pi) e^{1/6} ln(1/(1 - eps1/1.01)));
    m_eps2 = q [ln B + ln ln B] with B = n(n-1) e^{1/12} / (2 sqrt(2 pi) ln(1/(1 - eps2/0.99)));
    q = 1 / (1/2 ln(1-4 d^2) + d ln((1+2d)/(1-2d))).

    Proven for n >= 800.  As printed, the m_eps1 form is stated as an upper
    bound on m for high success probability even though the success
    probability improves with m; the numeric crossings are returned alongside
    so the simulation can settle the direction empirically.
    """
    _check_n(n)
    if not 0.0 < delta < 0.5:
        raise ValidityRangeError(f"delta must lie in (0, 1/2), got {delta}")
    _check_unit("eps1", eps1)
    _check_unit("eps2", eps2)
    if not eps2 < eps1 or not eps1 < 0.99:
        raise ValueError(f"need 0 < eps2 < eps1 < 0.99, got eps1={eps1}, eps2={eps2}")
    if n < MIN_N_RIP and not force:
        raise ValidityRangeError(f"transition formulas proven for n >= {MIN_N_RIP}, got n={n} (use force to evaluate anyway)")

    q = -1.0 / exponent_rate(delta)
    d1 = math.log(1.0 / (1.0 - eps1 / 1.01))
    d2 = math.log(1.0 / (1.0 - eps2 / 0.99))
    log_a = _log_pairs(n) - 0.5 * LOG_2PI - 1.0 / 6.0 - math.log(d1)
    log_b = _log_pairs(n) - 0.5 * LOG_2PI + 1.0 / 12.0 - math.log(d2)
    if log_a <= 0 or log_b <= 0:
        raise ValueError("closed forms undefined: inner logarithms are non-positive at these parameters")
    m1 = q * (log_a - math.log(log_a))
    m2 = q * (log_b + math.log(log_b))

    def _crossing(target: float, which: str) -> float:
        try:
            return solve_threshold(n, delta, target, which)
        except NoCrossingError:
            return math.nan

    note = f"requires n >= {MIN_N_RIP}" + (" (forced)" if n < MIN_N_RIP else "")
    return RipTransition(
        n=n,
        delta=delta,
        eps1=eps1,
        eps2=eps2,
        q=q,
        m_eps1=m1,
        m_eps2=m2,
        crossing_eps1=_crossing(d1, "lambda1"),
        crossing_eps2=_crossing(d2, "lambda2"),
        validity_note=note,
    )


_M_SEARCH_MAX = 10**7


def solve_threshold(n: int, delta: float, target_lambda: float, which: str = "lambda1"):
    """Solve lambda(m) = target for m, on the decreasing branch of the selected form.

    ``lambda1`` / ``lambda2``: returns the real root to absolute tolerance
    1e-6 in m, by bisection.  ``exact``: returns the integer bracketing pair
    (m, m+1) with lambda(m) >= target > lambda(m+1); since the exact curve is
    jagged, the largest such step in the bracket suggested by the continuous
    envelopes is returned.
    """
    _check_n(n)
    if target_lambda <= 0:
        raise ValueError(f"target must be positive, got {target_lambda}")
    rate = exponent_rate(delta)
    logc = _log_pairs(n)
    log_target = math.log(target_lambda)

    def log_l1(m: float) -> float:
        return logc - 1.0 / 6.0 - 0.5 * (LOG_2PI + math.log(m)) + m * rate

    def log_l2(m: float) -> float:
        return logc + 1.0 / 12.0 + 0.5 * (math.log(m) - LOG_2PI) + m * rate

    if which == "exact":
        # The envelopes bracket the exact curve, so its crossing lies between
        # their crossings; either envelope may miss the target entirely.
        try:
            lo = max(1, int(solve_threshold(n, delta, target_lambda, "lambda1")) - 2)
        except NoCrossingError:
            lo = 1
        try:
            hi = int(math.ceil(solve_threshold(n, delta, target_lambda, "lambda2"))) + 2
        except NoCrossingError:
            hi = lo + 64
        best = None
        prev = float(math.comb(n, 2) * p_delta_exact(lo, delta))
        for m in range(lo, hi + 1):
            cur = float(math.comb(n, 2) * p_delta_exact(m + 1, delta))
            if prev >= target_lambda > cur:
                best = (m, m + 1)
            prev = cur
        if best is None:
            raise NoCrossingError(f"exact curve does not cross {target_lambda} in [{lo}, {hi}]")
        return best

    if which == "lambda1":
        f = log_l1
        m_lo = 1.0
    elif which == "lambda2":
        f = log_l2
        m_lo = max(1.0, -0.5 / rate)  # peak of the sqrt(m) * e^{m*rate} envelope
    else:
        raise ValueError(f"unknown threshold form {which!r}")

    if f(m_lo) < log_target or f(float(_M_SEARCH_MAX)) > log_target:
        raise NoCrossingError(f"{which} does not cross {target_lambda} in [{m_lo:.0f}, {_M_SEARCH_MAX}]")
    lo, hi = m_lo, float(_M_SEARCH_MAX)
    while hi - lo > 1e-6:
        mid = 0.5 * (lo + hi)
        if f(mid) >= log_target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.10g}"
    return str(value)


def bounds_reports_csv(reports: list[BoundsReport]) -> str:
    """Serialize reports: formula_id,n,delta,eps1,eps2,m_value,m_int,validity_note.

    Single-tolerance formulas put their eps in the eps1 column.
    """
    lines = ["formula_id,n,delta,eps1,eps2,m_value,m_int,validity_note"]
    for r in reports:
        e1 = r.eps if r.eps is not None else r.eps1
        lines.append(
            ",".join(
                [r.formula_id, str(r.n), _fmt(r.delta), _fmt(e1), _fmt(r.eps2), _fmt(r.m_value), str(r.m_int), r.validity_note]
            )
        )
    return "\n".join(lines) + "\n"


def window_csv(mode: str, n: int, m_values: list[int], delta: Optional[float] = None) -> str:
    """Window table: n,m,delta,lambda_lo,lambda_hi,eta_pairwise,eta_general,lo,hi.

    For ``injectivity`` the [lo, hi] column uses the pairwise width (the
    general width is still tabulated); for ``rip`` only the general width is
    defined and the eta_pairwise column is left empty.
    """
    lines = ["n,m,delta,lambda_lo,lambda_hi,eta_pairwise,eta_general,lo,hi"]
    for m in m_values:
        if mode == "injectivity":
            wp = one_to_one_window(n, m, "pairwise")
            wg = one_to_one_window(n, m, "general")
            row = [n, m, None, wp.lambda_lo, wp.lambda_hi, wp.eta, wg.eta, wp.lo, wp.hi]
        elif mode == "rip":
            if delta is None:
                raise ValueError("rip windows need delta")
            w = rip_window(n, m, delta)
            row = [n, m, delta, w.lambda_lo, w.lambda_hi, None, w.eta, w.lo, w.hi]
        else:
            raise ValueError(f"unknown mode {mode!r}")
        lines.append(",".join(_fmt(v) for v in row))
    return "\n".join(lines) + "\n"
