"""Quantum and classical Bayesian nets with exact density-matrix reductions."""

from .density import (
    DensityMatrix,
    coherence,
    h_rho,
    meta_density,
    mixed_state_net,
    partial_trace,
    purify,
    reduce_net,
    s_entropy,
    von_neumann_entropy,
)
from .entexpr import expand, parse
from .infotheory import Ensemble, holevo, maximize_accessible_info, mutual_info
from .measure import Pom, dilation_unitary, pom_net
from .netcore import CbNet, NodeSpec, QbNet, contract, validate
from .qprob import ProbTable, p_gamma, p_gamma_cond
from .recipe import Recipe, parse_recipe

__version__ = "0.1.0"

__all__ = [
    "CbNet",
    "DensityMatrix",
    "Ensemble",
    "NodeSpec",
    "Pom",
    "ProbTable",
    "QbNet",
    "Recipe",
    "coherence",
    "contract",
    "dilation_unitary",
    "expand",
    "h_rho",
    "holevo",
    "maximize_accessible_info",
    "meta_density",
    "mixed_state_net",
    "mutual_info",
    "p_gamma",
    "p_gamma_cond",
    "parse",
    "parse_recipe",
    "partial_trace",
    "pom_net",
    "purify",
    "reduce_net",
    "s_entropy",
    "validate",
    "von_neumann_entropy",
]
