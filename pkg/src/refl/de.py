"""
Differential evolution, best/1/bin, maximising a log-likelihood.

Populations are stored parameter-major: ``members[i, j]`` is parameter i of
candidate j.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np


class UnusableSpaceError(RuntimeError):
    """Every initial candidate evaluated to -inf."""


class Termination(str, enum.Enum):
    MAX_ITERATIONS = "max_iterations"
    CONVERGED = "converged"


@dataclass
class DEConfig:
    k_m: float = 0.5
    k_r: float = 0.5
    population_size: int = 20
    max_iterations: int = 100
    seed: int = 42
    tol: float = 0.0

    def __post_init__(self):
        if not self.k_m > 0:
            raise ValueError(f"k_m must be > 0, got {self.k_m}")
        if not 0 <= self.k_r <= 1:
            raise ValueError(f"k_r must lie in [0, 1], got {self.k_r}")
        if self.population_size < 4:
            raise ValueError("population_size must be >= 4")
        if self.max_iterations < 0:
            raise ValueError("max_iterations must be >= 0")
        if self.tol < 0:
            raise ValueError("tol must be >= 0")


@dataclass
class Population:
    members: np.ndarray
    lnL: np.ndarray

    @property
    def best_index(self) -> int:
        return int(np.argmax(self.lnL))

    @property
    def best(self) -> np.ndarray:
        return self.members[:, self.best_index]

    @property
    def size(self) -> int:
        return self.members.shape[1]


@dataclass
class DEResult:
    best_theta: np.ndarray
    best_lnL: float
    # history[g] is the population lnL after generation g (g = 0 is the
    # initial population)
    history: np.ndarray = field(repr=False)
    best_history: np.ndarray = field(repr=False)
    generations_run: int = 0
    termination: Termination = Termination.MAX_ITERATIONS


def evaluate(objective, members: np.ndarray) -> np.ndarray:
    return np.array([objective.log_likelihood(members[:, j]) for j in range(members.shape[1])])


def initialize_population(objective, config: DEConfig, rng: np.random.Generator) -> Population:
    space = objective.space
    u = rng.random((space.n_params, config.population_size))
    members = space.lower[:, None] + u * space.width[:, None]
    lnL = evaluate(objective, members)
    if np.all(lnL == -np.inf):
        raise UnusableSpaceError("objective is -inf for every initial candidate")
    return Population(members, lnL)


def mutant_vector(best, p_r1, p_r2, k_m, lower, upper) -> np.ndarray:
    """b + k_m (p_R1 - p_R2), clipped to the bounds."""
    return np.clip(best + k_m * (np.asarray(p_r1) - np.asarray(p_r2)), lower, upper)


def draw_partners(n: int, rng: np.random.Generator) -> np.ndarray:
    """Two distinct indices per candidate j, both different from j.
    Returns an array of shape (n, 2)."""
    out = np.empty((n, 2), dtype=int)
    for j in range(n):
        # sample from the n - 1 indices other than j
        r = rng.choice(n - 1, size=2, replace=False)
        out[j] = r + (r >= j)
    return out


def mutate(parent: Population, space, config: DEConfig, rng: np.random.Generator) -> np.ndarray:
    partners = draw_partners(parent.size, rng)
    diff = parent.members[:, partners[:, 0]] - parent.members[:, partners[:, 1]]
    m = parent.best[:, None] + config.k_m * diff
    return np.clip(m, space.lower[:, None], space.upper[:, None])


def recombine(parent: Population, mutant: np.ndarray, config: DEConfig,
              rng: np.random.Generator) -> np.ndarray:
    """Binomial crossover with one coordinate per candidate always taken
    from the mutant."""
    if mutant.shape != parent.members.shape:
        raise ValueError("mutant and parent shapes differ")
    n_params, n = mutant.shape
    take = rng.random((n_params, n)) < config.k_r
    forced = rng.integers(n_params, size=n)
    take[forced, np.arange(n)] = True
    return np.where(take, mutant, parent.members)


def select(parent: Population, offspring: Population) -> Population:
    better = offspring.lnL > parent.lnL
    members = np.where(better[None, :], offspring.members, parent.members)
    lnL = np.where(better, offspring.lnL, parent.lnL)
    return Population(members, lnL)


def run_de(objective, config: DEConfig) -> DEResult:
    """
    Maximise ``objective.log_likelihood`` over ``objective.space``.

    Each generation: mutate (best/1) -> recombine (binomial) -> evaluate ->
    keep the offspring column only where it is strictly better. Stops after
    ``max_iterations`` generations, or earlier when ``tol > 0`` and the
    standard deviation of the population lnL drops below it.
    """
    rng = np.random.default_rng(config.seed)
    space = objective.space
    pop = initialize_population(objective, config, rng)
    history = [pop.lnL.copy()]
    best_history = [pop.best.copy()]
    termination = Termination.MAX_ITERATIONS

    generation = 0
    for generation in range(1, config.max_iterations + 1):
        mutant = mutate(pop, space, config, rng)
        trial = recombine(pop, mutant, config, rng)
        offspring = Population(trial, evaluate(objective, trial))
        pop = select(pop, offspring)
        history.append(pop.lnL.copy())
        best_history.append(pop.best.copy())
        if config.tol > 0 and np.all(np.isfinite(pop.lnL)) and np.std(pop.lnL) < config.tol:
            termination = Termination.CONVERGED
            break

    return DEResult(
        best_theta=pop.best.copy(),
        best_lnL=float(pop.lnL[pop.best_index]),
        history=np.array(history),
        best_history=np.array(best_history),
        generations_run=generation,
        termination=termination,
    )
