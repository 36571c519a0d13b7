"""Specular neutron reflectivity from slab models, with differential
evolution fitting and Metropolis uncertainty sampling."""

__version__ = "0.1.0"

from refl.kernel import (
    Layer,
    LayeredStructure,
    ReflectivityCurve,
    SLDProfile,
    dynamical_reflectivity,
    kinematic_reflectivity,
    sld_profile,
)
from refl.inference import Dataset, Objective, FunctionObjective, ParameterSpace, log_likelihood
from refl.de import DEConfig, DEResult, run_de
from refl.mcmc import MCMCConfig, Chain, run_chain, run_chains, summarize

__all__ = [
    "Layer",
    "LayeredStructure",
    "ReflectivityCurve",
    "SLDProfile",
    "dynamical_reflectivity",
    "kinematic_reflectivity",
    "sld_profile",
    "Dataset",
    "Objective",
    "FunctionObjective",
    "ParameterSpace",
    "log_likelihood",
    "DEConfig",
    "DEResult",
    "run_de",
    "MCMCConfig",
    "Chain",
    "run_chain",
    "run_chains",
    "summarize",
]
