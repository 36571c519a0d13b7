"""
Random-walk Metropolis sampling over a box-bounded parameter space.

Proposals are theta + a * R with R ~ N(0, 1) per coordinate, accepted with
probability min(1, exp(lnL_new - lnL_old)). The box acts as a flat prior:
anything outside has lnL = -inf and is never accepted.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from refl.seeds import derive_seed

TUNE_INTERVAL = 100
TUNE_TARGET = (0.2, 0.5)
DEFAULT_STEP_FRACTION = 0.02


class InsufficientSamplesError(ValueError):
    pass


@dataclass
class MCMCConfig:
    step_scale: Optional[np.ndarray] = None
    n_samples: int = 10000
    burn_in: int = 2500
    seed: int = 42
    n_chains: int = 1
    tune: bool = True

    def __post_init__(self):
        if self.n_samples < 1:
            raise ValueError("n_samples must be >= 1")
        if not 0 <= self.burn_in < self.n_samples:
            raise ValueError(
                f"burn_in ({self.burn_in}) must satisfy 0 <= burn_in < n_samples ({self.n_samples})"
            )
        if self.n_chains < 1:
            raise ValueError("n_chains must be >= 1")
        if self.step_scale is not None:
            self.step_scale = np.atleast_1d(np.asarray(self.step_scale, dtype=float))
            if np.any(~(self.step_scale > 0)):
                raise ValueError("step_scale must be > 0 elementwise")

    def steps_for(self, space) -> np.ndarray:
        if self.step_scale is None:
            return DEFAULT_STEP_FRACTION * space.width
        a = np.broadcast_to(self.step_scale, (space.n_params,))
        return a.astype(float).copy()


@dataclass
class Chain:
    samples: np.ndarray
    lnL: np.ndarray
    accepted: np.ndarray
    burn_in: int
    seed: int
    step_scale: np.ndarray = field(default=None)

    @property
    def acceptance_rate(self) -> float:
        return float(np.mean(self.accepted)) if self.accepted.size else 0.0

    def __len__(self):
        return self.samples.shape[0]


@dataclass
class PosteriorSummary:
    names: list
    mean: np.ndarray
    std: np.ndarray
    median: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    correlation: np.ndarray
    degenerate: np.ndarray
    n_samples: int

    def to_dict(self) -> dict:
        params = {
            name: {
                "mean": float(self.mean[i]),
                "std": float(self.std[i]),
                "median": float(self.median[i]),
                "ci_2.5": float(self.lower[i]),
                "ci_97.5": float(self.upper[i]),
                "degenerate": bool(self.degenerate[i]),
            }
            for i, name in enumerate(self.names)
        }
        return {
            "n_samples": int(self.n_samples),
            "parameters": params,
            "correlation": self.correlation.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PosteriorSummary":
        names = list(d["parameters"])
        col = lambda key: np.array([d["parameters"][n][key] for n in names])
        return cls(
            names=names,
            mean=col("mean"),
            std=col("std"),
            median=col("median"),
            lower=col("ci_2.5"),
            upper=col("ci_97.5"),
            correlation=np.array(d["correlation"], dtype=float),
            degenerate=col("degenerate").astype(bool),
            n_samples=int(d["n_samples"]),
        )


def acceptance_probability(delta_lnL: float) -> float:
    if delta_lnL >= 0:
        return 1.0
    return float(np.exp(delta_lnL))


def _accept(lnL_new: float, lnL_old: float, n: float) -> bool:
    if lnL_new == -np.inf:
        return False
    return n < acceptance_probability(lnL_new - lnL_old)


def metropolis_step(objective, theta, lnL_theta: float, step_scale,
                    rng: np.random.Generator):
    """One Metropolis update. Returns ``(theta, lnL, accepted)``."""
    theta = np.asarray(theta, dtype=float)
    proposal = theta + np.asarray(step_scale) * rng.standard_normal(theta.shape)
    n = rng.random()
    lnL_new = objective.log_likelihood(proposal)
    if _accept(lnL_new, lnL_theta, n):
        return proposal, lnL_new, True
    return theta, lnL_theta, False


def run_chain(objective, start, config: MCMCConfig, seed: Optional[int] = None) -> Chain:
    """
    Run ``config.n_samples`` Metropolis steps from ``start``.

    Every post-step state is recorded, so rejected steps repeat the current
    sample. With ``config.tune`` the step sizes are rescaled by 1.1 or 0.9
    every 100 burn-in steps to keep the windowed acceptance rate inside
    [0.2, 0.5]; they are frozen once burn-in ends.
    """
    space = objective.space
    start = np.asarray(start, dtype=float)
    if start.shape != (space.n_params,):
        raise ValueError(f"start must have {space.n_params} entries")
    if not space.contains(start):
        raise ValueError(f"start {start.tolist()} lies outside the parameter bounds")
    lnL_cur = objective.log_likelihood(start)
    if not np.isfinite(lnL_cur):
        raise ValueError("log-likelihood at the start point is not finite")

    seed = config.seed if seed is None else seed
    rng = np.random.default_rng(seed)
    a = config.steps_for(space)
    n, p = config.n_samples, space.n_params
    normals = rng.standard_normal((n, p))
    uniforms = rng.random(n)

    samples = np.empty((n, p))
    lnL = np.empty(n)
    accepted = np.zeros(n, dtype=bool)
    theta = start.copy()
    window = 0

    for t in range(n):
        proposal = theta + a * normals[t]
        lnL_new = objective.log_likelihood(proposal)
        if _accept(lnL_new, lnL_cur, uniforms[t]):
            theta, lnL_cur = proposal, lnL_new
            accepted[t] = True
            window += 1
        samples[t] = theta
        lnL[t] = lnL_cur

        if config.tune and t < config.burn_in and (t + 1) % TUNE_INTERVAL == 0:
            rate = window / TUNE_INTERVAL
            if rate > TUNE_TARGET[1]:
                a = a * 1.1
            elif rate < TUNE_TARGET[0]:
                a = a * 0.9
            window = 0

    return Chain(samples, lnL, accepted, config.burn_in, int(seed), a)


def run_chains(objective, start, config: MCMCConfig) -> list[Chain]:
    """Independent chains, each with a sub-seed derived from ``config.seed``
    and a start jittered by one step-size draw."""
    space = objective.space
    start = np.asarray(start, dtype=float)
    a = config.steps_for(space)
    chains = []
    for i in range(config.n_chains):
        seed = derive_seed(config.seed, f"mcmc-chain-{i}")
        jitter_rng = np.random.default_rng(derive_seed(config.seed, f"mcmc-start-{i}"))
        x0 = space.clip(start + a * jitter_rng.standard_normal(start.shape))
        if not np.isfinite(objective.log_likelihood(x0)):
            x0 = start
        chains.append(run_chain(objective, x0, config, seed=seed))
    return chains


def trim_burn_in(chain: Chain) -> Chain:
    b = chain.burn_in
    return replace(
        chain,
        samples=chain.samples[b:].copy(),
        lnL=chain.lnL[b:].copy(),
        accepted=chain.accepted[b:].copy(),
        burn_in=0,
    )


def pooled_samples(chains: Sequence[Chain]) -> np.ndarray:
    if isinstance(chains, Chain):
        chains = [chains]
    if not chains:
        raise InsufficientSamplesError("no chains given")
    return np.concatenate([trim_burn_in(c).samples for c in chains], axis=0)


def summarize(chains: Sequence[Chain], names: Optional[Sequence[str]] = None,
              min_samples: int = 100) -> PosteriorSummary:
    """Pooled post-burn-in moments, 95 % central interval and correlation
    matrix. Parameters with zero spread get 0 correlation and are flagged."""
    x = pooled_samples(chains)
    if x.shape[0] < min_samples:
        raise InsufficientSamplesError(
            f"{x.shape[0]} post-burn-in samples, need at least {min_samples}"
        )
    p = x.shape[1]
    names = list(names) if names is not None else [f"p{i}" for i in range(p)]
    std = x.std(axis=0, ddof=1)
    degenerate = ~(std > 0)

    corr = np.eye(p)
    ok = ~degenerate
    if ok.sum() > 1:
        sub = np.corrcoef(x[:, ok], rowvar=False)
        idx = np.flatnonzero(ok)
        corr[np.ix_(idx, idx)] = sub
    corr = 0.5 * (corr + corr.T)
    np.fill_diagonal(corr, 1.0)

    lo, med, hi = np.percentile(x, [2.5, 50.0, 97.5], axis=0)
    return PosteriorSummary(
        names=names,
        mean=x.mean(axis=0),
        std=std,
        median=med,
        lower=lo,
        upper=hi,
        correlation=corr,
        degenerate=degenerate,
        n_samples=x.shape[0],
    )


def draw_posterior(chains: Sequence[Chain], n_draws: int, rng: np.random.Generator) -> np.ndarray:
    x = pooled_samples(chains)
    if n_draws > x.shape[0]:
        raise InsufficientSamplesError(
            f"asked for {n_draws} draws but only {x.shape[0]} post-burn-in samples exist"
        )
    idx = rng.choice(x.shape[0], size=n_draws, replace=False)
    return x[idx]


def posterior_predictive(objective, chains: Sequence[Chain], n_draws: int,
                         rng: np.random.Generator) -> list[np.ndarray]:
    """Model curves on the dataset grid for ``n_draws`` posterior samples
    drawn without replacement."""
    return [objective.model_curve(theta) for theta in draw_posterior(chains, n_draws, rng)]
