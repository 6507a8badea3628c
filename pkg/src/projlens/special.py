"""Numeric kernels: regularized incomplete gamma and chi-square CDFs.

Everything analytic in this package reduces to the regularized lower
incomplete gamma function

    P(a, x) = gamma(a, x) / Gamma(a),

evaluated by a power series for x < a + 1 and by a Lentz continued
fraction for the upper region. The noncentral chi-square CDF is the
Poisson mixture of central CDFs over degrees of freedom; terms are
walked outward from the Poisson mode with two-term recurrences so a
single gamma evaluation seeds the whole sum.

All routines are vectorized over the evaluation point. ``chisq_cdf``
takes a scalar noncentrality; ``chisq_cdf_pairs`` handles elementwise
(noncentrality, point) pairs for the estimator hot loops.
"""

from __future__ import annotations

import math

import numpy as np

GAMMA_TOL = 1e-14
GAMMA_MAX_TERMS = 10 ** 6
POISSON_TAIL = 1e-12

# Noncentralities below this are safe for the ascending Poisson walk used by
# the pairs path: exp(-lam/2) stays far above the double-precision floor.
_PAIRS_LAM_LIMIT = 700.0


def _lower_series(a: float, x: np.ndarray) -> np.ndarray:
    """P(a, x) by the ascending series, valid and stable for x < a + 1."""
    out = np.zeros_like(x)
    pos = x > 0
    if not np.any(pos):
        return out
    xs = x[pos]
    term = np.ones_like(xs)
    total = np.ones_like(xs)
    denom = a
    for _ in range(GAMMA_MAX_TERMS):
        denom += 1.0
        term = term * xs / denom
        total += term
        if np.all(term <= GAMMA_TOL * total):
            break
    log_pref = a * np.log(xs) - xs - math.lgamma(a + 1.0)
    out[pos] = np.exp(log_pref + np.log(total))
    return np.clip(out, 0.0, 1.0)


def _upper_cf(a: float, x: np.ndarray) -> np.ndarray:
    """Q(a, x) = 1 - P(a, x) by Lentz's continued fraction, for x >= a + 1."""
    tiny = 1e-300
    b = x + 1.0 - a
    c = np.full_like(x, 1.0 / tiny)
    d = 1.0 / b
    h = d.copy()
    for i in range(1, GAMMA_MAX_TERMS + 1):
        an = -i * (i - a)
        b = b + 2.0
        d = an * d + b
        np.copyto(d, tiny, where=np.abs(d) < tiny)
        c = b + an / c
        np.copyto(c, tiny, where=np.abs(c) < tiny)
        d = 1.0 / d
        delta = d * c
        h = h * delta
        if np.all(np.abs(delta - 1.0) < GAMMA_TOL):
            break
    log_pref = a * np.log(x) - x - math.lgamma(a)
    return np.clip(np.exp(log_pref) * h, 0.0, 1.0)


def reg_lower_gamma(a: float, x):
    """Regularized lower incomplete gamma function P(a, x).

    Args:
      a: shape parameter, finite and > 0 (scalar).
      x: evaluation point(s), >= 0.

    Returns:
      P(a, x) with the shape of ``x``; scalar in, scalar out.
    """
    if not (np.isfinite(a) and a > 0):
        raise ValueError(f"shape parameter must be finite and positive, got {a}")
    arr = np.asarray(x, dtype=float)
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    if np.any(arr < 0) or not np.all(np.isfinite(arr)):
        raise ValueError("incomplete gamma argument must be finite and >= 0")
    out = np.empty_like(arr)
    lo = arr < a + 1.0
    if np.any(lo):
        out[lo] = _lower_series(a, arr[lo])
    if np.any(~lo):
        out[~lo] = 1.0 - _upper_cf(a, arr[~lo])
    return float(out[0]) if scalar else out


def gamma_ppf(a: float, u):
    """Inverse of P(a, .) by bisection; u in [0, 1) (0 maps to 0)."""
    arr = np.atleast_1d(np.asarray(u, dtype=float))
    if np.any((arr < 0) | (arr >= 1)):
        raise ValueError("gamma_ppf expects probabilities in [0, 1)")
    hi = a + 10.0 * math.sqrt(a) + 10.0
    while reg_lower_gamma(a, hi) < np.max(arr, initial=0.0):
        hi *= 2.0
    lo_b = np.zeros_like(arr)
    hi_b = np.full_like(arr, hi)
    # arithmetic splits until the lower bracket leaves 0, then geometric ones:
    # small-a quantiles sit many orders of magnitude below hi and need
    # relative, not absolute, bracket convergence
    for _ in range(220):
        gm = np.sqrt(lo_b) * np.sqrt(hi_b)
        mid = np.where(lo_b > 0.0, gm, 0.5 * (lo_b + hi_b))
        below = reg_lower_gamma(a, mid) < arr
        lo_b = np.where(below, mid, lo_b)
        hi_b = np.where(below, hi_b, mid)
        if np.all(hi_b - lo_b <= 4.0 * np.finfo(float).eps * hi_b):
            break
    out = 0.5 * (lo_b + hi_b)
    out[arr == 0.0] = 0.0
    if np.asarray(u).ndim == 0:
        return float(out[0])
    return out


def _check_chisq_params(d: int, lam: float) -> None:
    if not (isinstance(d, (int, np.integer)) and d >= 1):
        raise ValueError(f"degrees of freedom must be a positive integer, got {d}")
    if not (np.isscalar(lam) and np.isfinite(lam) and lam >= 0):
        raise ValueError(f"noncentrality must be finite and >= 0, got {lam}")


def chisq_cdf(d: int, lam: float, x):
    """CDF of the (noncentral) chi-square distribution with d dof.

    Args:
      d: degrees of freedom, positive integer.
      lam: noncentrality parameter (squared length of the mean), >= 0.
      x: evaluation point(s); the CDF is 0 for x <= 0.

    Returns:
      P(chi2_d(lam) <= x), matching the shape of ``x``.

    The noncentral CDF is sum_j e^(-lam/2) (lam/2)^j / j! * F_central(d+2j, x).
    The sum starts at the Poisson mode and walks both directions, updating the
    central CDF with P(a, x) = P(a+1, x) + x^a e^(-x) / Gamma(a+1), until the
    unvisited Poisson mass is below 1e-12.
    """
    _check_chisq_params(d, lam)
    arr = np.asarray(x, dtype=float)
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    out = np.zeros_like(arr)
    pos = arr > 0
    if np.any(pos):
        xh = arr[pos] / 2.0
        # lam/2 == 0 also catches subnormal lam whose half underflows; the
        # neglected noncentral correction is then below any tolerance
        if lam / 2.0 == 0.0:
            out[pos] = reg_lower_gamma(d / 2.0, xh)
        else:
            out[pos] = _noncentral_sum(d, float(lam), xh)
    return float(out[0]) if scalar else out


def _noncentral_sum(d: int, lam: float, xh: np.ndarray) -> np.ndarray:
    half = lam / 2.0
    # far below any representable t_mode the downward ratio a_j/xh overflows;
    # there the j = 0 term dominates the mixture (each later term carries an
    # extra factor < xh) and is the only part worth keeping
    tiny = xh < 1e-100
    if np.any(tiny):
        out = np.empty_like(xh)
        out[tiny] = math.exp(-half) * reg_lower_gamma(d / 2.0, xh[tiny])
        out[~tiny] = _noncentral_sum(d, lam, xh[~tiny]) if np.any(~tiny) else 0.0
        return out
    mode = int(half)
    a_mode = d / 2.0 + mode
    c_mode = reg_lower_gamma(a_mode, xh)
    with np.errstate(divide="ignore"):
        t_mode = np.exp(a_mode * np.log(xh) - xh - math.lgamma(a_mode + 1.0))
    log_w = -half + mode * math.log(half) - math.lgamma(mode + 1.0)
    w_mode = math.exp(log_w)

    acc = w_mode * c_mode
    # Downward walk: weights shrink by j/half per step, so once the geometric
    # bound on the unvisited lower mass is negligible the walk can stop.
    w, cj, tj, j = w_mode, c_mode, t_mode, mode
    while j > 0:
        a_j = d / 2.0 + j
        tj = tj * (a_j / xh)
        cj = cj + tj
        w = w * (j / half)
        acc = acc + w * cj
        j -= 1
        ratio = j / half
        if ratio < 1.0 and w * ratio / (1.0 - ratio) < 0.5 * POISSON_TAIL:
            break
    # Upward walk, mirrored.
    w, cj, tj, j = w_mode, c_mode, t_mode, mode
    while True:
        cj = cj - tj
        np.clip(cj, 0.0, None, out=cj)
        j += 1
        a_j = d / 2.0 + j
        tj = tj * (xh / a_j)
        w = w * (half / j)
        acc = acc + w * cj
        ratio = half / (j + 1)
        if ratio < 1.0 and w * ratio / (1.0 - ratio) < 0.5 * POISSON_TAIL:
            break
        if not np.any(cj > 0):
            break
    return np.clip(acc, 0.0, 1.0)


def chisq_cdf_pairs(d: int, lam, x) -> np.ndarray:
    """Elementwise noncentral chi-square CDF over (lam_i, x_i) pairs.

    Same quantity as ``chisq_cdf`` but with an array noncentrality, used by the
    ball estimators where every ball has its own center. Moderate lam runs a
    shared ascending Poisson walk; large lam falls back to the scalar path.
    """
    if not (isinstance(d, (int, np.integer)) and d >= 1):
        raise ValueError(f"degrees of freedom must be a positive integer, got {d}")
    lam_arr = np.atleast_1d(np.asarray(lam, dtype=float))
    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    if lam_arr.shape != x_arr.shape:
        raise ValueError("lam and x must have matching shapes")
    if np.any(lam_arr < 0) or not np.all(np.isfinite(lam_arr)):
        raise ValueError("noncentrality must be finite and >= 0")
    out = np.zeros_like(x_arr)
    pos = x_arr > 0
    if not np.any(pos):
        return out
    lam_p, x_p = lam_arr[pos], x_arr[pos]
    if np.max(lam_p) >= _PAIRS_LAM_LIMIT:
        vals = np.array(
            [chisq_cdf(d, float(l), float(v)) for l, v in zip(lam_p, x_p)]
        )
        out[pos] = vals
        return out
    xh = x_p / 2.0
    half = lam_p / 2.0
    w = np.exp(-half)
    cj = reg_lower_gamma(d / 2.0, xh)
    tj = np.exp((d / 2.0) * np.log(xh) - xh - math.lgamma(d / 2.0 + 1.0))
    acc = w * cj
    remaining = 1.0 - w
    scratch = np.empty_like(acc)
    j = 0
    cap = int(np.max(half) + 8.0 * math.sqrt(np.max(half)) + 60.0)
    # in-place recurrences; the hot estimators push millions of pairs through
    while j < cap:
        np.subtract(cj, tj, out=cj)
        np.maximum(cj, 0.0, out=cj)
        j += 1
        np.multiply(tj, xh, out=tj)
        tj /= d / 2.0 + j
        np.multiply(w, half, out=w)
        w /= j
        np.multiply(w, cj, out=scratch)
        np.add(acc, scratch, out=acc)
        np.subtract(remaining, w, out=remaining)
        if j % 8 == 0 and not np.any(remaining > POISSON_TAIL):
            break
    out[pos] = np.clip(acc, 0.0, 1.0)
    return out


def norm_cdf(z):
    """Standard normal CDF through the gamma engine: Phi via P(1/2, z^2/2)."""
    arr = np.asarray(z, dtype=float)
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    half_mass = 0.5 * reg_lower_gamma(0.5, arr * arr / 2.0)
    out = np.where(arr >= 0, 0.5 + half_mass, 0.5 - half_mass)
    return float(out[0]) if scalar else out
