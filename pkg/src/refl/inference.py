"""Parameter binding and the Gaussian log-likelihood."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Any, Callable, Sequence

import numpy as np

from refl.kernel import LayeredStructure, ReflectivityCurve, dynamical_reflectivity

LOG_2PI = np.log(2.0 * np.pi)


@dataclass
class ParameterSpace:
    """Named, box-bounded parameters plus a ``binder`` that turns a
    parameter vector into a concrete model object."""

    names: Sequence[str]
    lower: np.ndarray
    upper: np.ndarray
    binder: Callable[[np.ndarray], Any] = field(default=lambda theta: theta, repr=False)

    def __post_init__(self):
        self.names = list(self.names)
        self.lower = np.atleast_1d(np.asarray(self.lower, dtype=float))
        self.upper = np.atleast_1d(np.asarray(self.upper, dtype=float))
        if not (len(self.names) == self.lower.size == self.upper.size):
            raise ValueError("names, lower and upper must have the same length")
        if not np.all(np.isfinite(self.lower) & np.isfinite(self.upper)):
            raise ValueError("bounds must be finite")
        bad = [n for n, lo, hi in zip(self.names, self.lower, self.upper) if not lo < hi]
        if bad:
            raise ValueError(f"lower < upper violated for {bad}")

    @property
    def n_params(self) -> int:
        return len(self.names)

    @property
    def width(self) -> np.ndarray:
        return self.upper - self.lower

    def contains(self, theta) -> bool:
        theta = np.asarray(theta, dtype=float)
        return bool(np.all((theta >= self.lower) & (theta <= self.upper)))

    def clip(self, theta) -> np.ndarray:
        return np.clip(theta, self.lower, self.upper)

    def bind(self, theta):
        return self.binder(np.asarray(theta, dtype=float))


@dataclass
class Dataset:
    """Measured R(q) +/- dR(q)."""

    curve: ReflectivityCurve

    def __post_init__(self):
        if self.curve.dr is None:
            raise ValueError("a dataset needs uncertainties (dR column)")

    @classmethod
    def from_arrays(cls, q, r, dr) -> "Dataset":
        return cls(ReflectivityCurve(q, r, dr))

    @property
    def q(self) -> np.ndarray:
        return self.curve.q

    @property
    def r(self) -> np.ndarray:
        return self.curve.r

    @property
    def dr(self) -> np.ndarray:
        return self.curve.dr

    def __len__(self):
        return len(self.curve)


def gaussian_log_likelihood(y, model, dy) -> float:
    """-0.5 * sum(((y - model) / dy)**2 + ln(2 pi dy**2))"""
    pull = (y - model) / dy
    return float(-0.5 * np.sum(pull ** 2 + LOG_2PI + 2.0 * np.log(dy)))


def reflectivity_forward(structure: LayeredStructure, q: np.ndarray) -> np.ndarray:
    return dynamical_reflectivity(structure, q).r


@dataclass
class Objective:
    """Likelihood of ``dataset`` under ``forward(space.bind(theta), q)``."""

    dataset: Dataset
    space: ParameterSpace
    forward: Callable[[Any, np.ndarray], np.ndarray] = reflectivity_forward

    def model_curve(self, theta) -> np.ndarray:
        return np.asarray(self.forward(self.space.bind(theta), self.dataset.q), dtype=float)

    def log_likelihood(self, theta) -> float:
        theta = np.asarray(theta, dtype=float)
        if not self.space.contains(theta):
            return -np.inf
        try:
            model = self.model_curve(theta)
        except ArithmeticError:
            return -np.inf
        if not np.all(np.isfinite(model)):
            return -np.inf
        return gaussian_log_likelihood(self.dataset.r, model, self.dataset.dr)

    __call__ = log_likelihood


@dataclass
class FunctionObjective:
    """Wraps a plain ``fn(theta) -> lnL`` so it can be optimised or sampled
    over a box, e.g. test functions with no dataset."""

    space: ParameterSpace
    fn: Callable[[np.ndarray], float]

    def log_likelihood(self, theta) -> float:
        theta = np.asarray(theta, dtype=float)
        if not self.space.contains(theta):
            return -np.inf
        value = float(self.fn(theta))
        return value if np.isfinite(value) else -np.inf

    __call__ = log_likelihood


def log_likelihood(objective, theta) -> float:
    """Log-likelihood of ``theta``; -inf outside the bounds or when the
    model is not finite."""
    return objective.log_likelihood(theta)


def structure_binder(template: LayeredStructure, slots: Sequence[tuple[int, str]]):
    """Binder that writes theta[i] into ``template.layers[slots[i][0]]``
    field ``slots[i][1]`` (one of thickness/sld/roughness)."""
    slots = [(int(i), str(f)) for i, f in slots]
    for i, f in slots:
        if f not in ("thickness", "sld", "roughness"):
            raise ValueError(f"unknown layer field {f!r}")
        if not 0 <= i < len(template):
            raise IndexError(f"layer index {i} out of range")

    def bind(theta):
        layers = list(template.layers)
        for value, (i, f) in zip(theta, slots):
            layers[i] = replace(layers[i], **{f: float(value)})
        return LayeredStructure(tuple(layers))

    return bind
