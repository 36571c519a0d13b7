"""Bare silicon: kinematic against dynamical reflectivity, plus a rough
film and its SLD profile. Writes data and SVGs to --out-dir."""

import argparse
from pathlib import Path

import numpy as np

from refl.io import write_columns
from refl.kernel import Layer, LayeredStructure, critical_edge, dynamical_reflectivity, kinematic_reflectivity, sld_profile
from refl.plotting import plot_reflectivity, plt, save_svg

RHO_SI = 2.074e-6


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", type=Path, default=Path("results/kinematic"))
    args = ap.parse_args()
    args.out_dir.mkdir(parents=True, exist_ok=True)

    q = np.linspace(0.002, 0.3, 600)
    si = LayeredStructure((Layer(0, 0.0, 0, "air"), Layer(0, RHO_SI, 0, "Si")))
    dyn = dynamical_reflectivity(si, q).r
    kin = kinematic_reflectivity(si, q).r
    write_columns(args.out_dir / "bare_si.dat", {"q": q, "R_dynamical": dyn, "R_kinematic": kin})
    plot_reflectivity(args.out_dir / "bare_si.svg", q, {"dynamical": dyn, "kinematic": kin}, unit_line=True)

    qc = critical_edge(RHO_SI)
    above = q > 3 * qc
    print(f"critical edge q_c = {qc:.5f} 1/A")
    print(f"kinematic R > 1 for q < {q[kin > 1].max():.4f} 1/A")
    print(f"max |kin/dyn - 1| for q > 3 q_c: {np.abs(kin[above] / dyn[above] - 1).max():.3e}")

    film = LayeredStructure((Layer(0, 0.0, 0, "air"), Layer(100.0, 3.5e-6, 3.0, "film"),
                             Layer(0, RHO_SI, 3.0, "Si")))
    plot_reflectivity(args.out_dir / "film.svg", q, {"film on Si": dynamical_reflectivity(film, q).r})
    prof = sld_profile(film)
    fig, ax = plt.subplots(figsize=(6, 3))
    ax.plot(prof.z, prof.rho * 1e6)
    ax.set_xlabel(r"$z$ / $\AA$")
    ax.set_ylabel(r"$\rho$ / $10^{-6}\,\AA^{-2}$")
    fig.tight_layout()
    save_svg(fig, args.out_dir / "film_profile.svg")


if __name__ == "__main__":
    main()
