"""Solve a grid of generated instances and print iteration counts,
residuals and timings as CSV.

    python scripts/sweep.py --kinds orthant-mmatrix conjugated --sizes 2 5 10 30 --seeds 5
"""

import argparse
import csv
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from coneric.errors import ConericError
from coneric.instances import InstanceRecipe, Kind, generate
from coneric.riccati import SolveOptions, residual_scale, solve


@dataclass
class SweepConfig:
    kinds: list = field(default_factory=lambda: [Kind.ORTHANT_MMATRIX, Kind.CONJUGATED])
    sizes: list = field(default_factory=lambda: [2, 5, 10, 20, 50])
    shifts: list = field(default_factory=lambda: [0.1, 1.0, 10.0])
    seeds: int = 3
    options: SolveOptions = field(default_factory=SolveOptions)


def run(cfg: SweepConfig, out=sys.stdout):
    writer = csv.writer(out)
    writer.writerow(["kind", "n", "shift", "seed", "verdict", "iterations",
                     "rel_residual", "abscissa_L", "abscissa_A_closed", "seconds"])
    for kind in cfg.kinds:
        for n in cfg.sizes:
            if kind is Kind.SCALAR and n != 1:
                continue
            for shift in cfg.shifts:
                for seed in range(cfg.seeds):
                    cone, sys_ = generate(InstanceRecipe(seed, n, kind, shift))
                    t0 = time.perf_counter()
                    try:
                        cert = solve(cone, sys_, cfg.options)
                    except ConericError as exc:
                        writer.writerow([kind.value, n, shift, seed, type(exc).__name__,
                                         "", "", "", "", f"{time.perf_counter() - t0:.4f}"])
                        continue
                    X = cert.solution.X_star
                    writer.writerow([
                        kind.value, n, shift, seed, "certificate", cert.solution.iterations,
                        f"{cert.solution.residual / residual_scale(sys_, X):.3e}",
                        f"{cert.L_report.spectral_abscissa:.6g}",
                        f"{cert.closed_loop_A_report.spectral_abscissa:.6g}",
                        f"{time.perf_counter() - t0:.4f}",
                    ])


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--kinds", nargs="+", default=["orthant-mmatrix", "conjugated"],
                   choices=[k.value for k in Kind])
    p.add_argument("--sizes", nargs="+", type=int, default=[2, 5, 10, 20, 50])
    p.add_argument("--shifts", nargs="+", type=float, default=[0.1, 1.0, 10.0])
    p.add_argument("--seeds", type=int, default=3)
    p.add_argument("--max-iter", type=int, default=10000)
    args = p.parse_args(argv)
    cfg = SweepConfig([Kind(k) for k in args.kinds], args.sizes, args.shifts, args.seeds,
                      SolveOptions(max_iter=args.max_iter))
    np.set_printoptions(precision=4)
    run(cfg)


if __name__ == "__main__":
    main()
