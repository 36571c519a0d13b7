"""The two built-in demonstrations, as library calls. ``refl demo`` wraps
these and writes their outputs to disk."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from refl.de import DEConfig, DEResult, run_de
from refl.inference import Dataset, Objective
from refl.mcmc import Chain, MCMCConfig, PosteriorSummary, posterior_predictive, run_chains, summarize
from refl.seeds import derive_seed
from refl.toy import (
    GAUSSIAN_TRUTH,
    GaussianPairModel,
    ackley_objective,
    default_gaussian_x,
    gaussian_objective,
    synthesize_dataset,
)

ACKLEY_CONFIG = dict(k_m=0.5, k_r=0.5, population_size=20, max_iterations=100)


def ackley_demo(seed: int = 42) -> DEResult:
    return run_de(ackley_objective(), DEConfig(seed=derive_seed(seed, "de"), **ACKLEY_CONFIG))


@dataclass
class GaussianDemo:
    truth: np.ndarray
    dataset: Dataset
    objective: Objective
    fit: DEResult
    chains: list[Chain]
    summary: PosteriorSummary
    predictive: list[np.ndarray]
    seeds: dict


def gaussian_demo(seed: int = 42, n_samples: int = 20000, burn_in: int = 5000,
                  n_chains: int = 2, n_draws: int = 100) -> GaussianDemo:
    seeds = {
        "master": int(seed),
        "data": derive_seed(seed, "data"),
        "de": derive_seed(seed, "de"),
        "mcmc": derive_seed(seed, "mcmc"),
        "predictive": derive_seed(seed, "predictive"),
    }
    truth = GaussianPairModel(*GAUSSIAN_TRUTH)
    dataset = synthesize_dataset(truth, default_gaussian_x(), noise_fraction=0.05,
                                 floor=0.01, seed=seeds["data"])
    objective = gaussian_objective(dataset)
    fit = run_de(objective, DEConfig(k_m=0.5, k_r=0.5, population_size=20,
                                     max_iterations=200, seed=seeds["de"]))
    chains = run_chains(objective, fit.best_theta,
                        MCMCConfig(n_samples=n_samples, burn_in=burn_in,
                                   n_chains=n_chains, seed=seeds["mcmc"]))
    summary = summarize(chains, objective.space.names)
    predictive = posterior_predictive(objective, chains, n_draws,
                                      np.random.default_rng(seeds["predictive"]))
    return GaussianDemo(np.array(GAUSSIAN_TRUTH), dataset, objective, fit, chains,
                        summary, predictive, seeds)
