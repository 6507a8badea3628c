"""Closed-form rates and tail bounds for projected-cloud discrepancy.

Each evaluator takes plain scalars so it can be driven from measured
quantities (sigma_eps, lambda_max, lambda_avg) or from hypotheticals. The
exponential tails whose absolute constants the theory leaves unspecified take
a TailConstants record and clamp at 1; they are surrogates for the shape of
the decay, not certified probabilities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .datasets import Profile, SpectrumSummary, sigma_epsilon


@dataclass(frozen=True)
class TailConstants:
    """Stand-in absolute constants for the suppressed factors in the tails."""

    c_exp: float = 1.0
    c_poly: float = 1.0

    def __post_init__(self):
        if self.c_exp <= 0 or self.c_poly <= 0:
            raise ValueError("tail constants must be positive")


@dataclass(frozen=True)
class EccentricityReport:
    """Spread of a cloud relative to its typical small scale at level eps."""

    eps: float
    sigma_eps: float
    lambda_max: float
    lambda_avg: float
    ecc: float
    ecc_linear: float


def _check_eps(eps: float) -> None:
    if not (0 < eps <= 1):
        raise ValueError(f"eps must be in (0, 1], got {eps}")


def inflation_delta(sigma: float, d: int, eps: float) -> float:
    """Largest Delta with nu_sigma(B_Delta) - nu_sigma(B) <= eps for every ball.

    Inflating any ball in R^d by Delta adds at most eps of N(0, sigma^2 I)
    mass when Delta is at most this value.
    """
    if not (sigma > 0 and math.isfinite(sigma)):
        raise ValueError(f"sigma must be finite and > 0, got {sigma}")
    if d < 1:
        raise ValueError("dimension must be >= 1")
    _check_eps(eps)
    return (
        (sigma / (2.0 * math.sqrt(d)))
        * math.log1p(eps / 8.0)
        / (1.0 + math.sqrt((2.0 / d) * math.log(8.0 / eps)))
    )


def mixture_inflation_delta(sigma_eps: float, d: int, eps: float) -> float:
    """Inflation margin for a whole mixture: atoms below sigma_eps hold at
    most eps weight, every larger component obeys the single-scale margin."""
    return inflation_delta(sigma_eps, d, eps)


def smoothed_deviation_tail(eps: float, delta: float, D: int, lambda_max: float) -> float:
    """P(|smoothed mass - its mean| > eps) <= 2 exp(-eps^2 delta^2 D / (2 lambda_max)).

    Explicit-constant per-ball concentration for the Delta-ramp smoothed mass
    under the random map; clamped at 1.
    """
    if not (delta > 0 and lambda_max > 0 and D >= 1):
        raise ValueError("need delta > 0, lambda_max > 0, D >= 1")
    _check_eps(eps)
    return min(1.0, 2.0 * math.exp(-(eps ** 2) * (delta ** 2) * D / (2.0 * lambda_max)))


def fixed_ball_tail(
    eps: float,
    d: int,
    D: int,
    sigma_eps: float,
    lambda_max: float,
    constants: TailConstants = TailConstants(),
) -> float:
    """Surrogate tail for one ball's discrepancy exceeding eps.

    exp(-c_exp * (eps^4 D / d) * (sigma_eps^2 / lambda_max) / (1 + ln(1/eps))^2),
    clamped at 1. The absolute constant is surrogate (c_exp).
    """
    if not (d >= 1 and D >= 1 and sigma_eps > 0 and lambda_max > 0):
        raise ValueError("need d, D >= 1 and sigma_eps, lambda_max > 0")
    _check_eps(eps)
    exponent = (
        constants.c_exp
        * (eps ** 4)
        * (D / d)
        * (sigma_eps ** 2 / lambda_max)
        / (1.0 + math.log(1.0 / eps)) ** 2
    )
    return min(1.0, math.exp(-exponent))


def uniform_ball_tail(
    eps: float,
    d: int,
    D: int,
    sigma_eps: float,
    lambda_max: float,
    lambda_avg: float,
    constants: TailConstants = TailConstants(),
) -> float:
    """Surrogate tail for the sup over all balls exceeding eps.

    The fixed-ball tail times the ball-net cardinality surrogate
    (c_poly * d^3 lambda_avg / (eps^3 sigma_eps^2) * (1 + ln(1/eps)))^(d/2).
    """
    if lambda_avg <= 0:
        raise ValueError("lambda_avg must be > 0")
    single = fixed_ball_tail(eps, d, D, sigma_eps, lambda_max, constants)
    prefactor = (
        constants.c_poly
        * (d ** 3)
        * lambda_avg
        / ((eps ** 3) * (sigma_eps ** 2))
        * (1.0 + math.log(1.0 / eps))
    ) ** (d / 2.0)
    return min(1.0, prefactor * single)


def discrepancy_rate(ecc: float, d: int, D: int) -> float:
    """Expected sup-discrepancy scale (ecc d^2 / D)^(1/4)."""
    if not (ecc > 0 and d >= 1 and D >= 1):
        raise ValueError("need ecc > 0, d >= 1, D >= 1")
    return (ecc * d * d / D) ** 0.25


def vc_ball_rate(d: int, D: int) -> float:
    """VC-type rate sqrt(d ln(D) / D) for the sup over balls of n ~ D points."""
    if not (d >= 1 and D >= 2):
        raise ValueError("need d >= 1 and D >= 2")
    return math.sqrt(d * math.log(D) / D)


def eccentricity(prof: Profile, spec: SpectrumSummary, eps: float) -> EccentricityReport:
    """lambda_max over sigma_eps^2, plus the linear variant lambda_max / sigma_eps.

    Raises on a degenerate profile (sigma_eps = 0: all mass at the mean).
    """
    _check_eps(eps)
    s_eps = sigma_epsilon(prof, eps)
    if s_eps == 0.0:
        raise ValueError("degenerate profile: all mass at the mean, sigma_eps = 0")
    return EccentricityReport(
        eps=eps,
        sigma_eps=s_eps,
        lambda_max=spec.lambda_max,
        lambda_avg=spec.lambda_avg,
        ecc=spec.lambda_max / (s_eps * s_eps),
        ecc_linear=spec.lambda_max / s_eps,
    )


def min_dimension_for_tail(
    target: float,
    eps: float,
    d: int,
    sigma_eps: float,
    lambda_max: float,
    lambda_avg: float,
    constants: TailConstants = TailConstants(),
) -> int:
    """Smallest D whose uniform-ball tail is <= target (doubling + bisection)."""
    if not (0 < target < 1):
        raise ValueError("target must be in (0, 1)")

    def tail(D: int) -> float:
        return uniform_ball_tail(eps, d, D, sigma_eps, lambda_max, lambda_avg, constants)

    hi = 1
    while tail(hi) > target:
        hi *= 2
        if hi > 2 ** 60:
            raise ValueError("no dimension below 2^60 reaches the target tail")
    lo = hi // 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if tail(mid) <= target:
            hi = mid
        else:
            lo = mid
    return hi
