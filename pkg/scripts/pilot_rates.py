"""Calibration pilots behind the frozen test tolerances.

Each pilot reruns the oracle computation whose output was frozen into the
test suite, so a tolerance can be re-derived instead of trusted. Pilots are
independent; pick some with --only. The slow ones (decay, figure4) are
skipped unless --all is given.

Usage:
  python scripts/pilot_rates.py               # fast pilots
  python scripts/pilot_rates.py --all
  python scripts/pilot_rates.py --only ks netgap
"""

import argparse
import math
import sys

import numpy as np

from projlens import (
    Ball,
    MixtureModel,
    Profile,
    apply,
    build_ball_net,
    center,
    empirical_mass,
    gen_cube,
    gen_simplex,
    lipschitz_probe,
    mc_ball_sup,
    mixture_ball_mass,
    mixture_inflation_delta,
    net_params_from_bounds,
    net_sandwich,
    profile,
    radial_sweep_sup,
    run_cube1d,
    run_decay,
    sample_projection,
    spectrum,
    sup_over_net,
)
from projlens.projection import gaussian_sample

UNIT_MODEL_1D = MixtureModel(Profile(np.array([1.0]), np.array([1.0])), 1)


def pilot_ks():
    """Radial sweep at the origin on model-drawn data = one-sample KS.

    Backs the 0.0195 threshold (99.9% Kolmogorov quantile at n=1e4) used by
    the 19-of-20-seeds assertion.
    """
    n = 10_000
    crit = math.sqrt(math.log(2000.0) / 2.0) / math.sqrt(n)
    vals = []
    for s in range(20):
        cloud = gaussian_sample(2, n, 1.0, s)
        model = MixtureModel(Profile(np.array([1.0]), np.array([1.0])), 2)
        vals.append(radial_sweep_sup(cloud, model, centers=np.zeros((1, 2))).value)
    vals = np.sort(vals)
    print(f"ks: max={vals[-1]:.5f} second={vals[-2]:.5f} threshold={crit:.5f} "
          f"over={int(np.count_nonzero(vals > crit))}/20")


def pilot_net():
    """Net estimator on its own model (n=1e5): backs the 0.02 ceiling."""
    params = net_params_from_bounds(0.25, 1.0, 1.0, 1)
    net = build_ball_net(1, params.c, params.eps_o)
    for s in (0, 1):
        cloud = gaussian_sample(1, 100_000, 1.0, s)
        rep = sup_over_net(cloud, UNIT_MODEL_1D, net)
        print(f"net: seed={s} value={rep.value:.5f} (ceiling 0.02, M={len(net)})")


def pilot_sandwich():
    """Fraction of seeds where the projected mass sits in the inflated band.

    cube D=200, d=1, eps=0.3, fixed ball; backs the >=475/500 assertion.
    """
    eps = 0.3
    cloud = center(gen_cube(200, n=1000, seed=3))
    model = MixtureModel(profile(cloud), 1)
    delta = mixture_inflation_delta(1.0, 1, eps)
    ball = Ball(np.array([0.2]), 0.9)
    lo = mixture_ball_mass(model, Ball(ball.center, ball.radius - delta)) - eps
    hi = mixture_ball_mass(model, Ball(ball.center, ball.radius + delta)) + eps
    ok = 0
    for s in range(500):
        emp = empirical_mass(apply(sample_projection(1, 200, s), cloud), ball)
        ok += int(lo <= emp <= hi)
    print(f"sandwich: inside={ok}/500 band=[{lo:.5f}, {hi:.5f}] delta={delta:.6f}")


def pilot_netgap():
    """Worst predicted-mass gap over sandwiched random balls (d=1, eps=0.25)."""
    params = net_params_from_bounds(0.25, 1.0, 1.0, 1)
    net = build_ball_net(1, params.c, params.eps_o)
    gen = np.random.default_rng(21)
    lim = params.c
    worst = 0.0
    for _ in range(1000):
        ball = Ball(gen.uniform(-lim, lim, size=1), float(gen.uniform(0.0, 2.0 * lim)) or lim)
        inner, outer = net_sandwich(ball, net)
        gap = mixture_ball_mass(UNIT_MODEL_1D, outer) - mixture_ball_mass(UNIT_MODEL_1D, inner)
        worst = max(worst, gap)
    print(f"netgap: worst={worst:.5f} allowance={2 * 0.25}")


def pilot_lipschitz():
    """Observed smoothed-mass ratio vs the closed-form bound (cube D=100)."""
    cloud = center(gen_cube(100, n=1000, seed=5))
    bound = math.sqrt(spectrum(cloud).lambda_max / (100 * 0.5**2))
    worst = lipschitz_probe(cloud, Ball(np.zeros(2), math.sqrt(2.0)), delta=0.5,
                            n_pairs=1000, magnitude=0.5, seed=1)
    print(f"lipschitz: worst={worst:.5f} bound={bound:.5f} margin={bound - worst:.5f}")


def pilot_decay():
    """Simplex decay slope and medians at the default grid (slow, ~1 min)."""
    res = run_decay()
    med = res.summary["median_by_dim"]
    print(f"decay: slope={res.summary['slope']:.4f} medians={med}")


def pilot_cube1d():
    """Cube 1-d KS medians: shows the sampling floor that caps the slope.

    The one-sample KS of an n-point sample cannot fall below ~0.86/sqrt(n)
    in expectation, so past D ~ 100 the 1/sqrt(D) projection signal drowns
    at n=5000 and the fitted slope flattens; larger n restores it.
    """
    res = run_cube1d()
    floor = 0.8687 / math.sqrt(5000)
    print(f"cube1d: slope={res.summary['slope']:.4f} floor~{floor:.5f} "
          f"medians={res.summary['median_by_dim']}")


def pilot_figure4():
    """Quartile ranges of the race with a raw vs centered Gaussian sample.

    Backs the decision to center the sample: the projected simplex has
    sample mean exactly zero, and the raw sample's mean offset separates the
    quartile ranges (slow, ~30 s).
    """
    D, n_balls = 1000, 10_000
    src = center(gen_simplex(D))
    model = MixtureModel(Profile(np.array([1.0]), np.array([1.0])), 2)
    rows = {"proj": [], "raw": [], "centered": []}
    for s in range(10):
        proj = apply(sample_projection(2, D, s), src)
        g = gaussian_sample(2, D + 1, 1.0, s)
        for name, cloud in (("proj", proj), ("raw", g), ("centered", center(g))):
            rows[name].append(
                mc_ball_sup(cloud, model, n_balls, seed=s,
                            center_box=4.0, max_radius=6.0).value
            )
    for name, vals in rows.items():
        q25, q75 = np.percentile(vals, [25, 75])
        print(f"figure4: {name:9s} q25={q25:.5f} q75={q75:.5f}")


FAST = ("ks", "net", "sandwich", "netgap", "lipschitz")
SLOW = ("decay", "cube1d", "figure4")


def main(argv=None) -> int:
    pilots = {name: obj for name, obj in globals().items() if name.startswith("pilot_")}
    parser = argparse.ArgumentParser(description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--all", action="store_true", help="include the slow pilots")
    parser.add_argument("--only", nargs="+", choices=sorted(FAST + SLOW),
                        help="run just these pilots")
    args = parser.parse_args(argv)
    names = args.only or (FAST + SLOW if args.all else FAST)
    for name in names:
        pilots[f"pilot_{name}"]()
    return 0


if __name__ == "__main__":
    sys.exit(main())
