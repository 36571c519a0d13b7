"""Demonstration objectives: the negative Ackley function and a pair of
overlapping Gaussians."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from refl.inference import Dataset, FunctionObjective, Objective, ParameterSpace

# default demo truth; not taken from any published figure
GAUSSIAN_TRUTH = (10.0, 6.0, -1.0, 1.0)
GAUSSIAN_NAMES = ("theta1", "theta2", "theta3", "theta4")
# the two peaks are kept on opposite sides of x = 0 so the posterior has a
# single mode (swapping the peaks gives an identical curve)
GAUSSIAN_LOWER = (0.0, 0.0, -5.0, 0.0)
GAUSSIAN_UPPER = (30.0, 30.0, 0.0, 5.0)


def negative_ackley(point, a=20.0, b=0.2, c=2.0 * np.pi):
    """-Ackley(x, y). ``point`` may also be a (2, ...) array of coordinates,
    evaluated elementwise."""
    x, y = np.asarray(point, dtype=float)
    ackley = (
        -a * np.exp(-b * np.sqrt(0.5 * (x * x + y * y)))
        - np.exp(0.5 * (np.cos(c * x) + np.cos(c * y)))
        + a
        + np.e
    )
    return float(-ackley) if np.ndim(ackley) == 0 else -ackley


def ackley_objective(bound: float = 5.0) -> FunctionObjective:
    space = ParameterSpace(["x", "y"], [-bound, -bound], [bound, bound])
    return FunctionObjective(space, negative_ackley)


@dataclass(frozen=True)
class GaussianPairModel:
    theta1: float
    theta2: float
    theta3: float
    theta4: float
    width: float = 1.0

    def __post_init__(self):
        if not self.width > 0:
            raise ValueError("width must be > 0")

    @classmethod
    def from_vector(cls, theta, width: float = 1.0) -> "GaussianPairModel":
        return cls(*map(float, theta), width=width)


def _normal_pdf(x, mu, w):
    return np.exp(-0.5 * ((x - mu) / w) ** 2) / (w * np.sqrt(2.0 * np.pi))


def gaussian_pair_curve(model: GaussianPairModel, x) -> np.ndarray:
    """theta1 N(x; theta3, w) + theta2 N(x; theta4, w), with N of unit area."""
    x = np.asarray(x, dtype=float)
    return (model.theta1 * _normal_pdf(x, model.theta3, model.width)
            + model.theta2 * _normal_pdf(x, model.theta4, model.width))


def synthesize_dataset(model: GaussianPairModel, x, noise_fraction: float = 0.05,
                       floor: float = 0.01, seed: int = 42) -> Dataset:
    if noise_fraction < 0:
        raise ValueError("noise_fraction must be >= 0")
    if not floor > 0:
        raise ValueError("floor must be > 0")
    x = np.asarray(x, dtype=float)
    y = gaussian_pair_curve(model, x)
    dy = np.maximum(noise_fraction * np.abs(y), floor)
    rng = np.random.default_rng(seed)
    y_obs = y + rng.normal(0.0, dy)
    return Dataset.from_arrays(x, y_obs, dy)


def default_gaussian_x() -> np.ndarray:
    return np.linspace(-5.0, 5.0, 50)


def gaussian_objective(dataset: Dataset, width: float = 1.0,
                       lower=GAUSSIAN_LOWER, upper=GAUSSIAN_UPPER) -> Objective:
    space = ParameterSpace(
        GAUSSIAN_NAMES, lower, upper,
        binder=lambda theta: GaussianPairModel.from_vector(theta, width),
    )
    return Objective(dataset, space, forward=gaussian_pair_curve)
