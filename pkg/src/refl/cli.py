"""
Command-line interface::

    refl simulate --config model.toml --qmin 0.005 --qmax 0.3 --points 200 \
        --method dynamical --out curve.dat [--compare] [--plot out.svg]
    refl fit --data data.dat --config model.toml --out report.json [--plot fit.svg]
    refl sample --data data.dat --config model.toml --report report.json \
        --chains chains.csv [--plot-dir plots/]
    refl demo ackley|gaussians --out-dir demo/

Exit codes: 0 success, 2 usage/config error, 3 data error, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import time
import warnings
from pathlib import Path

import numpy as np

from refl import __version__
from refl.config import ConfigError, ModelConfig, read_model_config
from refl.de import UnusableSpaceError, run_de
from refl.inference import Dataset, Objective
from refl.io import DataParseError, atomic_write_text, read_reflectivity_file, write_columns, write_dataset
from refl.kernel import NumericalError, UnsupportedModelError, dynamical_reflectivity, kinematic_reflectivity
from refl.mcmc import InsufficientSamplesError, pooled_samples, posterior_predictive, run_chains, summarize
from refl.report import FitReport
from refl.seeds import derive_seed

log = logging.getLogger("refl")

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_NUMERIC = 4

DEFAULT_SEED = 42
DEMOS = ("ackley", "gaussians")
DEMO_NOTE = ("Gaussian-pair truth, x-grid and noise level are defaults chosen by this tool, "
             "not values from a published figure.")


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


def resolve_seed(seed) -> int:
    if seed is not None:
        return int(seed)
    env = os.environ.get("REFL_SEED")
    if env:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"REFL_SEED must be an integer, got {env!r}") from None
    return DEFAULT_SEED


def _load_dataset(path) -> Dataset:
    data = read_reflectivity_file(path)
    if not isinstance(data, Dataset):
        raise DataError(
            f"{path}: no uncertainty column found; fitting needs a third column with dR(q)"
        )
    return data


def _free_parameters(config: ModelConfig):
    if not config.fit:
        raise UsageError("the model config has no [[fit]] entries, so there is nothing to fit")
    return config.parameter_space()


def write_chains(path, chains, names) -> None:
    x = pooled_samples(chains)
    lnL = np.concatenate([c.lnL[c.burn_in:] for c in chains])
    lines = [",".join(list(names) + ["lnL"])]
    for row, ll in zip(x, lnL):
        lines.append(",".join(repr(float(v)) for v in row) + "," + repr(float(ll)))
    atomic_write_text(path, "\n".join(lines) + "\n")


# -- commands ---------------------------------------------------------------

def cmd_simulate(config_path, qmin, qmax, points, method, out, compare=False, plot=None) -> dict:
    config = read_model_config(config_path)
    if method not in ("dynamical", "kinematic"):
        raise UsageError(f"unknown method {method!r}; use dynamical or kinematic")
    if not 0 < qmin < qmax or points < 2:
        raise UsageError("need 0 < qmin < qmax and points >= 2")
    q = np.linspace(qmin, qmax, points)
    try:
        if compare:
            curves = {
                "R_dynamical": dynamical_reflectivity(config.structure, q).r,
                "R_kinematic": kinematic_reflectivity(config.structure, q).r,
            }
        elif method == "dynamical":
            curves = {"R": dynamical_reflectivity(config.structure, q).r}
        else:
            curves = {"R": kinematic_reflectivity(config.structure, q).r}
    except UnsupportedModelError as exc:
        raise UsageError(str(exc)) from None

    write_columns(out, {"q": q, **curves}, comment=f"refl {__version__} simulate method="
                  + ("compare" if compare else method))
    if plot:
        from refl.plotting import plot_reflectivity

        labels = {"R": method, "R_dynamical": "dynamical", "R_kinematic": "kinematic"}
        plot_reflectivity(plot, q, {labels[k]: v for k, v in curves.items()},
                          unit_line=compare or method == "kinematic")
    return curves


def cmd_fit(data_path, config_path, out, seed=None, plot=None) -> FitReport:
    seed = resolve_seed(seed)
    config = read_model_config(config_path)
    dataset = _load_dataset(data_path)
    space = _free_parameters(config)
    objective = Objective(dataset, space)
    de_seed = derive_seed(seed, "de")

    t0 = time.perf_counter()
    result = run_de(objective, config.de_config(de_seed))
    elapsed = time.perf_counter() - t0

    model = objective.model_curve(result.best_theta)
    report = FitReport(
        parameters={n: float(v) for n, v in zip(space.names, result.best_theta)},
        best_lnL=float(result.best_lnL),
        config=config.to_dict(),
        seeds={"master": seed, "de": de_seed},
        optimizer={
            "method": "differential evolution (best/1/bin)",
            "generations_run": int(result.generations_run),
            "termination": result.termination.value,
            "best_lnL_per_generation": [float(v) for v in result.history.max(axis=1)],
        },
        timings={"fit_seconds": elapsed},
    )
    out = Path(out)
    report.save(out)
    write_columns(bestfit_path(out), {"q": dataset.q, "R": dataset.r, "dR": dataset.dr, "R_model": model},
                  comment="best-fit model on the data grid")
    if plot:
        from refl.plotting import plot_fit

        plot_fit(plot, dataset, model)
    return report


def bestfit_path(report_path) -> Path:
    report_path = Path(report_path)
    return report_path.with_name(report_path.stem + "_bestfit.dat")


def cmd_sample(data_path, config_path, report_path, chains_path, seed=None, plot_dir=None,
               start=None, n_draws=100) -> FitReport:
    seed = resolve_seed(seed)
    config = read_model_config(config_path)
    dataset = _load_dataset(data_path)
    space = _free_parameters(config)
    objective = Objective(dataset, space)

    report_path = Path(report_path)
    report = FitReport.load(report_path) if report_path.exists() else None
    if start is None:
        if report is None:
            raise UsageError("no start point: give --start or an existing --report from `refl fit`")
        try:
            start = report.theta(space.names)
        except KeyError as exc:
            raise UsageError(f"report does not match the config: {exc}") from None
    start = np.asarray(start, dtype=float)
    if start.shape != (space.n_params,):
        raise UsageError(f"--start needs {space.n_params} values ({', '.join(space.names)})")
    if report is None:
        report = FitReport(
            parameters={n: float(v) for n, v in zip(space.names, start)},
            best_lnL=float(objective.log_likelihood(start)),
            config=config.to_dict(),
            seeds={"master": seed},
        )

    mcmc_seed = derive_seed(seed, "mcmc")
    mcmc_config = config.mcmc_config(mcmc_seed)
    t0 = time.perf_counter()
    try:
        chains = run_chains(objective, start, mcmc_config)
    except ValueError as exc:
        raise UsageError(f"cannot start sampling: {exc}") from None
    elapsed = time.perf_counter() - t0
    summary = summarize(chains, space.names)

    write_chains(chains_path, chains, space.names)
    report.posterior = summary.to_dict()
    report.sampler = {
        "method": "random-walk Metropolis",
        "start": [float(v) for v in start],
        "n_chains": len(chains),
        "chain_seeds": [int(c.seed) for c in chains],
        "acceptance_rates": [c.acceptance_rate for c in chains],
        "final_step_scale": [[float(v) for v in c.step_scale] for c in chains],
    }
    report.seeds = {**report.seeds, "mcmc": mcmc_seed}
    report.timings = {**report.timings, "sample_seconds": elapsed}
    report.save(report_path)

    if plot_dir:
        from refl.plotting import plot_histograms, plot_pairs, plot_predictive

        plot_dir = Path(plot_dir)
        x = pooled_samples(chains)
        plot_histograms(plot_dir / "histograms.svg", x, space.names)
        plot_pairs(plot_dir / "pairs.svg", x, space.names)
        rng = np.random.default_rng(derive_seed(seed, "predictive"))
        curves = posterior_predictive(objective, chains, min(n_draws, x.shape[0]), rng)
        plot_predictive(plot_dir / "predictive.svg", dataset, objective.model_curve(start), curves)
    return report


def cmd_demo(name, out_dir, seed=None) -> dict:
    from refl import demos, plotting

    seed = resolve_seed(seed)
    if name not in DEMOS:
        raise UsageError(f"unknown demo {name!r}; available: {', '.join(DEMOS)}")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    if name == "ackley":
        result = demos.ackley_demo(seed)
        history = result.history
        header = "generation," + ",".join(f"candidate_{j}" for j in range(history.shape[1]))
        rows = [f"{g}," + ",".join(repr(float(v)) for v in history[g]) for g in range(history.shape[0])]
        atomic_write_text(out_dir / "ackley_history.csv", "\n".join([header] + rows) + "\n")
        best = history.max(axis=1)
        reached = np.flatnonzero(best >= -1e-2)
        summary = {
            "demo": "ackley",
            "seed": seed,
            "de": {**demos.ACKLEY_CONFIG, "seed": derive_seed(seed, "de")},
            "best_theta": [float(v) for v in result.best_theta],
            "best_value": float(result.best_lnL),
            "distance_from_origin": float(np.linalg.norm(result.best_theta)),
            "generations_run": int(result.generations_run),
            "first_generation_within_1e-2": int(reached[0]) if reached.size else None,
            "final_population_lnL_std": float(np.std(history[-1])),
        }
        import json

        atomic_write_text(out_dir / "ackley_result.json", json.dumps(summary, indent=2) + "\n")
        plotting.plot_de_history(out_dir / "ackley_trajectories.svg", history)
        return summary

    demo = demos.gaussian_demo(seed)
    names = demo.objective.space.names
    write_dataset(out_dir / "gaussians_data.dat", demo.dataset, comment=DEMO_NOTE + "\ncolumns: x y dy")
    write_chains(out_dir / "gaussians_chains.csv", demo.chains, names)
    report = FitReport(
        parameters={n: float(v) for n, v in zip(names, demo.fit.best_theta)},
        best_lnL=float(demo.fit.best_lnL),
        config={
            "truth": dict(zip(names, map(float, demo.truth))),
            "width": 1.0,
            "x": {"min": -5.0, "max": 5.0, "points": 50},
            "noise_fraction": 0.05,
            "floor": 0.01,
            "lower": [float(v) for v in demo.objective.space.lower],
            "upper": [float(v) for v in demo.objective.space.upper],
        },
        seeds=demo.seeds,
        optimizer={"generations_run": int(demo.fit.generations_run),
                   "termination": demo.fit.termination.value},
        posterior=demo.summary.to_dict(),
        sampler={"n_chains": len(demo.chains),
                 "acceptance_rates": [c.acceptance_rate for c in demo.chains]},
        notes=[DEMO_NOTE],
    )
    report.save(out_dir / "gaussians_report.json")
    best = demo.objective.model_curve(demo.fit.best_theta)
    plotting.plot_predictive(out_dir / "gaussians_predictive.svg", demo.dataset, best,
                             demo.predictive, logy=False, xlabel="x", ylabel="y")
    x = pooled_samples(demo.chains)
    plotting.plot_histograms(out_dir / "gaussians_histograms.svg", x, names)
    plotting.plot_pairs(out_dir / "gaussians_pairs.svg", x, names)
    return {"report": report}


# -- argument parsing -------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="refl", description=__doc__.splitlines()[1].strip() or None)
    parser.add_argument("--version", action="version", version=f"refl {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="compute a model reflectivity curve")
    p.add_argument("--config", required=True, help="TOML model file")
    p.add_argument("--qmin", type=float, default=0.005)
    p.add_argument("--qmax", type=float, default=0.3)
    p.add_argument("--points", type=int, default=200, help="number of q values, evenly spaced")
    p.add_argument("--method", default="dynamical", choices=["dynamical", "kinematic"])
    p.add_argument("--compare", action="store_true", help="write both kinematic and dynamical curves")
    p.add_argument("--plot", help="optional SVG of the curve")
    p.add_argument("--out", required=True, help="output columns file")

    p = sub.add_parser("fit", help="fit a model to data by differential evolution")
    p.add_argument("--data", required=True, help="columns q, R, dR")
    p.add_argument("--config", required=True, help="TOML model file with [[fit]] entries")
    p.add_argument("--seed", type=int, help="master seed (default: $REFL_SEED, then 42)")
    p.add_argument("--out", required=True, help="report JSON; the best-fit curve goes next to it")
    p.add_argument("--plot", help="optional SVG of data and best fit")

    p = sub.add_parser("sample", help="sample parameter posteriors with Metropolis MCMC")
    p.add_argument("--data", required=True, help="columns q, R, dR")
    p.add_argument("--config", required=True, help="TOML model file with [[fit]] entries")
    p.add_argument("--report", required=True, help="report JSON, read for the start point and updated")
    p.add_argument("--chains", required=True, help="output CSV of samples and lnL")
    p.add_argument("--start", help="comma-separated start values, overrides the report")
    p.add_argument("--seed", type=int, help="master seed (default: $REFL_SEED, then 42)")
    p.add_argument("--plot-dir", help="directory for histogram, pair and predictive SVGs")

    p = sub.add_parser("demo", help="run a built-in demonstration")
    p.add_argument("name", help=f"one of: {', '.join(DEMOS)}")
    p.add_argument("--seed", type=int, help="master seed (default: $REFL_SEED, then 42)")
    p.add_argument("--out-dir", required=True)
    return parser


def _parse_start(text):
    if text is None:
        return None
    try:
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise UsageError(f"--start must be comma-separated numbers, got {text!r}") from None


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    warnings.simplefilter("default")
    try:
        if args.command == "simulate":
            cmd_simulate(args.config, args.qmin, args.qmax, args.points, args.method,
                         args.out, compare=args.compare, plot=args.plot)
        elif args.command == "fit":
            report = cmd_fit(args.data, args.config, args.out, seed=args.seed, plot=args.plot)
            for name, value in report.parameters.items():
                print(f"{name} = {value:.6g}")
            print(f"lnL = {report.best_lnL:.6g}")
        elif args.command == "sample":
            report = cmd_sample(args.data, args.config, args.report, args.chains, seed=args.seed,
                                plot_dir=args.plot_dir, start=_parse_start(args.start))
            for name, p in report.posterior["parameters"].items():
                print(f"{name} = {p['mean']:.6g} +/- {p['std']:.3g}")
        elif args.command == "demo":
            cmd_demo(args.name, args.out_dir, seed=args.seed)
    except (UsageError, ConfigError, InsufficientSamplesError, UnusableSpaceError) as exc:
        print(f"refl: error: {exc}", file=sys.stderr)
        if isinstance(exc, UsageError) and args.command == "demo":
            parser.print_usage(sys.stderr)
        return EXIT_USAGE
    except (DataParseError, DataError) as exc:
        print(f"refl: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (NumericalError, FloatingPointError, OverflowError) as exc:
        print(f"refl: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"refl: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
