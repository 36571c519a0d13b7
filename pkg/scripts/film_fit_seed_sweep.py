"""Fit a synthetic one-film dataset with DE over many seeds and report how
often best/1/bin lands on the true thickness."""

import argparse

import numpy as np

from refl.de import DEConfig, run_de
from refl.inference import Dataset, Objective, ParameterSpace, structure_binder
from refl.kernel import Layer, LayeredStructure, dynamical_reflectivity

TRUTH = LayeredStructure((Layer(0, 0.0, 0, "air"), Layer(100.0, 3.5e-6, 3.0, "film"),
                          Layer(0, 2.074e-6, 3.0, "Si")))


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seeds", type=int, default=20)
    ap.add_argument("--noise-seed", type=int, default=2024)
    ap.add_argument("--population", type=int, default=20)
    ap.add_argument("--iterations", type=int, default=100)
    args = ap.parse_args()

    q = np.linspace(0.005, 0.3, 200)
    r = dynamical_reflectivity(TRUTH, q).r
    dr = 0.01 * r
    data = Dataset.from_arrays(q, r + np.random.default_rng(args.noise_seed).normal(0, dr), dr)
    space = ParameterSpace(["d", "rho", "sigma"], [10, 1e-6, 0], [300, 6e-6, 10],
                           structure_binder(TRUTH, [(1, "thickness"), (1, "sld"), (1, "roughness")]))
    objective = Objective(data, space)

    good = 0
    for seed in range(args.seeds):
        res = run_de(objective, DEConfig(seed=seed, population_size=args.population,
                                         max_iterations=args.iterations))
        d, rho, sigma = res.best_theta
        ok = abs(d / 100 - 1) < 0.02 and abs(rho / 3.5e-6 - 1) < 0.05
        good += ok
        print(f"seed {seed:3d}  d {d:8.3f}  rho {rho:.4e}  sigma {sigma:6.3f}  "
              f"lnL {res.best_lnL:10.2f}  {'ok' if ok else 'local optimum'}")
    print(f"{good}/{args.seeds} runs recovered the truth")


if __name__ == "__main__":
    main()
