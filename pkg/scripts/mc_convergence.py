"""Frobenius error of the sampled random-kick channel against the exact Gaussian dephasing.

Repeats the measurement over several seeds so the single-seed error ratio used
in the acceptance suite can be read against its spread.

    python3 scripts/mc_convergence.py --seeds 0 1 2 3 42
"""
import argparse

import numpy as np

from cvcl.channels import KickDistribution, apply_dephasing, apply_random_kicks_mc, kernel_from_kicks
from cvcl.core import GaussianParams, Units, centered_grid, gaussian_wavefunction, pure_state_density


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, nargs="+", default=[0, 1, 2, 3, 42])
    ap.add_argument("--samples", type=int, nargs="+", default=[1_000, 10_000, 100_000])
    ap.add_argument("--n-points", type=int, default=256)
    args = ap.parse_args()

    units = Units.natural()
    grid = centered_grid(0.0, 8.0, args.n_points)
    rho = pure_state_density(gaussian_wavefunction(grid, GaussianParams(0.0, 1.0)))
    kicks = KickDistribution.gaussian(1.0)
    exact = apply_dephasing(rho, kernel_from_kicks(grid, kicks, units)).entries

    print("seed " + " ".join(f"{n:>10d}" for n in args.samples) + "   ratio(last two)")
    for seed in args.seeds:
        errs = [np.linalg.norm(apply_random_kicks_mc(rho, kicks, n, seed, units).entries - exact) for n in args.samples]
        print(f"{seed:>4} " + " ".join(f"{e:>10.3e}" for e in errs) + f"   {errs[-2] / errs[-1]:.3f}")
    print(f"expected ratio for one decade: sqrt(10) = {np.sqrt(10):.3f}")


if __name__ == "__main__":
    main()
