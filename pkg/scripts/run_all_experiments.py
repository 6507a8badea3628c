"""Run all six experiments at their default sizes and write the artifacts.

Produces, per experiment, the CSV tables plus a summary JSON under
--out-dir. The full run takes a few minutes; --quick shrinks every
experiment to smoke-test size.

Usage:
  python scripts/run_all_experiments.py --out-dir artifacts
"""

import argparse
import shlex
import sys

from projlens import (
    PowerExponentialLaw,
    gen_spherical,
    gen_two_cluster,
    run_cube1d,
    run_decay,
    run_figure4,
    run_profile_table,
    run_residual_variance,
    run_twocluster,
    write_report,
)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default="artifacts")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--quick", action="store_true", help="smoke-test sizes")
    args = parser.parse_args(argv)

    q = args.quick
    seed = args.seed
    runs = [
        lambda: run_figure4(D=100 if q else 1000, n_balls=500 if q else 10_000,
                            seed=seed, n_seeds=3 if q else 10),
        lambda: run_decay(grid=(100, 300) if q else (100, 300, 1000, 3000),
                          seed=seed, n_seeds=3 if q else 10),
        lambda: run_cube1d(grid=(64, 256) if q else (64, 256, 1024, 4096),
                           n=500 if q else 5000, seed=seed, n_seeds=3 if q else 10),
        lambda: run_twocluster(n=400 if q else 2000, n_balls=200 if q else 2000,
                               seed=seed, n_seeds=3 if q else 10),
        lambda: run_residual_variance(
            gen_two_cluster(50, 400 if q else 2000, 4.0, seed=seed), seed=seed
        ),
        lambda: run_profile_table(
            gen_spherical(50, 400 if q else 2000, PowerExponentialLaw(beta=0.5),
                          seed=seed),
            seed=seed,
        ),
    ]
    command = shlex.join(["python", "scripts/run_all_experiments.py", *map(str, argv or sys.argv[1:])])
    for run in runs:
        result = run()
        paths = write_report(result, args.out_dir, command)
        print(f"{result.name}: " + ", ".join(str(p) for p in paths))
    return 0


if __name__ == "__main__":
    sys.exit(main())
