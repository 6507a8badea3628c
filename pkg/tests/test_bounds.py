"""Closed-form bound evaluator tests with frozen reference values."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from projlens import (
    PointCloud,
    Profile,
    TailConstants,
    center,
    discrepancy_rate,
    eccentricity,
    fixed_ball_tail,
    gen_cross_polytope,
    gen_cube,
    gen_simplex,
    gen_two_cluster,
    inflation_delta,
    min_dimension_for_tail,
    mixture_inflation_delta,
    profile,
    sigma_epsilon,
    smoothed_deviation_tail,
    spectrum,
    uniform_ball_tail,
    vc_ball_rate,
)

# frozen direct evaluations of the implemented formulas
INFLATION_1_1_025 = 0.00423528993400539
INFLATION_1_1_1 = 0.01937645491057547
MIX_INFLATION_1_2_05 = 0.008042462356576144
SMOOTH_TAIL_EXAMPLE = 0.3060251949602303
FIXED_TAIL_EXAMPLE = 7.898254910426617e-06  # exp(-0.2^4 * 5e4 / (1+ln 5)^2)
MIN_DIM_REGRESSION = 11367  # bisection at target 0.05, eps 0.3, d 2, unit scales
RATE_1_2_1000 = 0.2514866859365871  # (4/1000)^(1/4)
VC_2_1000 = 0.11753940002383997  # sqrt(2 ln 1000 / 1000)


def test_inflation_frozen_values():
    assert inflation_delta(1.0, 1, 0.25) == pytest.approx(INFLATION_1_1_025, rel=1e-12)
    assert inflation_delta(1.0, 1, 1.0) == pytest.approx(INFLATION_1_1_1, rel=1e-12)
    want = 0.5 * math.log(1.125) / (1 + math.sqrt(2 * math.log(8)))
    assert inflation_delta(1.0, 1, 1.0) == pytest.approx(want, rel=1e-14)


@given(sigma=st.floats(0.01, 50.0), d=st.integers(1, 20), eps=st.floats(0.001, 1.0))
@settings(max_examples=100, deadline=None)
def test_inflation_scales_linearly_in_sigma(sigma, d, eps):
    assert inflation_delta(2 * sigma, d, eps) == pytest.approx(
        2 * inflation_delta(sigma, d, eps), rel=1e-12
    )


def test_inflation_monotone_grids():
    for eps in (0.1, 0.5, 1.0):
        vals = [inflation_delta(1.0, d, eps) for d in range(1, 11)]
        assert all(a > b for a, b in zip(vals, vals[1:]))
    for d in (1, 3, 10):
        vals = [inflation_delta(1.0, d, e) for e in (0.05, 0.2, 0.5, 0.8, 1.0)]
        assert all(a < b for a, b in zip(vals, vals[1:]))


def test_inflation_domain():
    for bad in (0.0, -0.1, 1.2):
        with pytest.raises(ValueError):
            inflation_delta(1.0, 1, bad)


def test_mixture_inflation_same_formula():
    assert mixture_inflation_delta(1.0, 2, 0.5) == pytest.approx(
        MIX_INFLATION_1_2_05, rel=1e-12
    )
    want = math.log(1.0625) / (2 * math.sqrt(2)) / (1 + math.sqrt(math.log(16)))
    assert mixture_inflation_delta(1.0, 2, 0.5) == pytest.approx(want, rel=1e-14)
    for sigma, d, eps in ((0.4, 1, 0.25), (2.0, 3, 0.8)):
        assert mixture_inflation_delta(sigma, d, eps) == inflation_delta(sigma, d, eps)


def test_mixture_inflation_through_single_atom_profile():
    prof = Profile(np.array([1.7]), np.array([1.0]))
    for eps in (0.1, 0.5):
        sig = sigma_epsilon(prof, eps)
        assert mixture_inflation_delta(sig, 2, eps) == inflation_delta(1.7, 2, eps)


def test_smoothed_tail_frozen_and_clamped():
    delta = inflation_delta(1.0, 1, 1.0)
    assert smoothed_deviation_tail(0.1, delta, 10**6, 1.0) == pytest.approx(
        SMOOTH_TAIL_EXAMPLE, rel=1e-12
    )
    assert smoothed_deviation_tail(1.0, math.sqrt(2 * math.log(2)), 1, 1.0) == 1.0


def test_smoothed_tail_doubling_identity():
    lo = smoothed_deviation_tail(0.5, 0.1, 2000, 1.0)
    hi = smoothed_deviation_tail(0.5, 0.1, 4000, 1.0)
    assert hi == pytest.approx(lo * lo / 2, rel=1e-12)


def test_fixed_tail_frozen_value():
    got = fixed_ball_tail(0.2, 2, 10**5, 1.0, 1.0)
    assert got == pytest.approx(FIXED_TAIL_EXAMPLE, rel=1e-12)
    want = math.exp(-(0.2**4) * 5e4 / (1 + math.log(5)) ** 2)
    assert got == pytest.approx(want, rel=1e-12)


def test_fixed_tail_monotone_and_limits():
    ds = [fixed_ball_tail(0.2, 2, D, 1.0, 1.0) for D in (10**3, 10**4, 10**5)]
    assert ds[0] > ds[1] > ds[2]
    dims = [fixed_ball_tail(0.2, d, 10**5, 1.0, 1.0) for d in (1, 2, 4)]
    assert dims[0] < dims[1] < dims[2]
    assert fixed_ball_tail(0.2, 2, 10**5, 1.0, 1e12) >= 0.999


def test_uniform_tail_vanishes_in_dimension():
    vals = [uniform_ball_tail(0.3, 2, D, 1.0, 1.0, 1.0) for D in (10**4, 10**6, 10**8)]
    assert vals[-1] < 1e-6 and vals[0] >= vals[1] >= vals[2]


def test_uniform_tail_one_dim_prefactor_is_square_root():
    eps, D = 0.3, 10**6
    bracket = 1.0 * 1.0 / (eps**3 * 1.0) * (1 + math.log(1 / eps))
    want = min(1.0, math.sqrt(bracket) * fixed_ball_tail(eps, 1, D, 1.0, 1.0))
    assert uniform_ball_tail(eps, 1, D, 1.0, 1.0, 1.0) == pytest.approx(want, rel=1e-12)


def test_min_dimension_regression():
    D = min_dimension_for_tail(0.05, 0.3, 2, 1.0, 1.0, 1.0)
    assert D == MIN_DIM_REGRESSION
    assert uniform_ball_tail(0.3, 2, D, 1.0, 1.0, 1.0) <= 0.05
    assert uniform_ball_tail(0.3, 2, D - 1, 1.0, 1.0, 1.0) > 0.05


def test_discrepancy_rate_values():
    assert discrepancy_rate(1.0, 2, 1000) == pytest.approx(RATE_1_2_1000, rel=1e-12)
    assert discrepancy_rate(1.0, 2, 4000) == pytest.approx(
        discrepancy_rate(1.0, 2, 1000) / math.sqrt(2), rel=1e-12
    )
    assert discrepancy_rate(1.0, 6, 6) >= 1.0


def test_vc_rate_values():
    assert vc_ball_rate(2, 1000) == pytest.approx(VC_2_1000, rel=1e-12)
    for d, D in ((1, 3), (2, 50), (5, 10**4)):
        assert vc_ball_rate(d, D) ** 2 * D / d == pytest.approx(math.log(D), rel=1e-12)
    assert vc_ball_rate(2, 4000) / vc_ball_rate(2, 1000) == pytest.approx(
        math.sqrt(math.log(4000) / (4 * math.log(1000))), rel=1e-12
    )
    with pytest.raises(ValueError):
        vc_ball_rate(1, 1)


@given(
    eps=st.floats(0.01, 1.0),
    d=st.integers(1, 8),
    D=st.integers(2, 10**7),
    sig=st.floats(0.1, 10.0),
    lam_factor=st.floats(1.0, 100.0),
)
@settings(max_examples=100, deadline=None)
def test_tails_stay_in_unit_interval(eps, d, D, sig, lam_factor):
    lam_max = sig * sig * lam_factor
    for val in (
        smoothed_deviation_tail(eps, 0.1 * sig, D, lam_max),
        fixed_ball_tail(eps, d, D, sig, lam_max),
        uniform_ball_tail(eps, d, D, sig, lam_max, lam_max),
    ):
        # exp(-c*D) underflows to exactly 0.0 for large D; 0 is a valid bound
        assert 0.0 <= val <= 1.0


def test_rates_positive_and_continuous():
    base = discrepancy_rate(2.0, 3, 5000)
    assert base > 0
    assert abs(discrepancy_rate(2.0 + 1e-9, 3, 5000) - base) < 1e-9
    assert vc_ball_rate(3, 5000) > 0


def test_tail_constants_validated():
    with pytest.raises(ValueError):
        TailConstants(c_exp=0.0)
    with pytest.raises(ValueError):
        TailConstants(c_poly=-1.0)


def test_eccentricity_flat_shapes():
    # ecc_linear carries one factor of the atom scale: 1 for the unit-atom
    # cube and cross polytope, sqrt(D/(D+1)) for the centered simplex
    for cloud, lin in (
        (gen_cube(12), 1.0),
        (gen_cross_polytope(12), 1.0),
        (center(gen_simplex(40)), math.sqrt(40.0 / 41.0)),
    ):
        rep = eccentricity(profile(center(cloud)), spectrum(center(cloud)), 0.25)
        assert rep.ecc == pytest.approx(1.0, abs=1e-9)
        assert rep.ecc_linear == pytest.approx(lin, abs=1e-9)


def test_eccentricity_two_cluster():
    cloud = center(gen_two_cluster(50, 2000, 4.0, seed=0))
    rep = eccentricity(profile(cloud), spectrum(cloud), 0.1)
    assert rep.ecc >= 40.0
    assert rep.sigma_eps > 0 and rep.lambda_max > rep.lambda_avg


def test_eccentricity_rejects_degenerate_profile():
    cloud = center(PointCloud(np.ones((5, 3))))
    with pytest.raises(ValueError, match="degenerate profile"):
        eccentricity(profile(cloud), spectrum(cloud), 0.25)


def test_scale_invariance_is_exact():
    rng_local = np.random.default_rng(1)
    data = rng_local.standard_normal((60, 8))
    base = center(PointCloud(data))
    scaled = center(PointCloud(7.0 * data))
    eps = 0.2
    rep_a = eccentricity(profile(base), spectrum(base), eps)
    rep_b = eccentricity(profile(scaled), spectrum(scaled), eps)
    assert rep_b.sigma_eps == pytest.approx(7.0 * rep_a.sigma_eps, rel=1e-12)
    assert rep_b.lambda_max == pytest.approx(49.0 * rep_a.lambda_max, rel=1e-12)
    assert rep_b.ecc == pytest.approx(rep_a.ecc, rel=1e-12)
    for d in (1, 3):
        assert fixed_ball_tail(eps, d, 10**4, rep_b.sigma_eps, rep_b.lambda_max) == pytest.approx(
            fixed_ball_tail(eps, d, 10**4, rep_a.sigma_eps, rep_a.lambda_max), rel=1e-9
        )
        assert uniform_ball_tail(
            eps, d, 10**4, rep_b.sigma_eps, rep_b.lambda_max, rep_b.lambda_avg
        ) == pytest.approx(
            uniform_ball_tail(
                eps, d, 10**4, rep_a.sigma_eps, rep_a.lambda_max, rep_a.lambda_avg
            ),
            rel=1e-9,
        )


def test_smoothed_tail_dominates_fixed_tail_chain():
    # default constants (c_exp = c_poly = 1) keep the per-ball tail below the
    # smoothed-deviation tail at delta from the mixture inflation rule
    for eps in (0.1, 0.25, 0.5, 1.0):
        for d in (1, 2, 3):
            for D in (100, 10**4, 10**6):
                for sig, lam in ((1.0, 1.0), (0.5, 4.0)):
                    delta = mixture_inflation_delta(sig, d, eps)
                    smooth = smoothed_deviation_tail(eps, delta, D, lam)
                    fixed = fixed_ball_tail(eps, d, D, sig, lam)
                    assert smooth >= fixed - 1e-15
