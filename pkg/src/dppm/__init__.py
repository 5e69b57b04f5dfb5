"""Dirichlet process parsimonious Gaussian mixtures.

Infinite Gaussian mixture clustering with nine eigenvalue-decomposed
covariance structures, restaurant-process Gibbs sampling, learned
concentration, Bayes-factor model selection, and a fixed-K parsimonious
baseline sampler.
"""

from ._sweep import active_backend
from .models import (
    ComponentParams,
    Hyperparams,
    ModelFamily,
    covariance_of,
    decompose_covariance,
    free_parameter_count,
    log_prior_density,
    sample_posterior,
    sample_prior,
    sufficient_stats,
)
from .dpm import (
    ChainResult,
    ChainSample,
    GibbsState,
    crp_predictive,
    posterior_mode_K,
    run_gibbs,
    sample_alpha,
)
from .finite import run_finite_gibbs
from .selection import (
    BayesFactorReport,
    Evidence,
    MarginalLikelihoodEstimate,
    bayes_factor,
    laplace_marginal_loglik,
    select_model,
    vectorize_parameters,
)
from .metrics import misclassification_error, rand_index
from .data import (
    DataMatrix,
    SimSpec,
    load_csv,
    pca_project,
    simulate_bensmail,
    simulate_two_component,
    standardize,
)
from .rand import make_rng, spawn_rng

__version__ = "0.1.0"

__all__ = [
    "ModelFamily",
    "Hyperparams",
    "ComponentParams",
    "GibbsState",
    "ChainSample",
    "ChainResult",
    "DataMatrix",
    "SimSpec",
    "MarginalLikelihoodEstimate",
    "BayesFactorReport",
    "Evidence",
    "active_backend",
    "bayes_factor",
    "covariance_of",
    "crp_predictive",
    "decompose_covariance",
    "free_parameter_count",
    "laplace_marginal_loglik",
    "load_csv",
    "log_prior_density",
    "make_rng",
    "misclassification_error",
    "pca_project",
    "posterior_mode_K",
    "rand_index",
    "run_finite_gibbs",
    "run_gibbs",
    "sample_alpha",
    "sample_posterior",
    "sample_prior",
    "select_model",
    "simulate_bensmail",
    "simulate_two_component",
    "spawn_rng",
    "standardize",
    "sufficient_stats",
    "vectorize_parameters",
]
