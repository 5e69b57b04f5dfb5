"""Fixed-K Bayesian parsimonious mixture sampler (the parametric baseline).

Classic data-augmentation Gibbs: labels from the posterior class
probabilities, mixing proportions from their Dirichlet full conditional,
component parameters through the same conjugate sweeps as the infinite
sampler.  Empty clusters are kept alive (their parameters refresh from the
prior), since K is fixed by definition.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import models, rand
from .dpm import ChainResult, ChainSample, log_component_densities

__all__ = ["FiniteState", "run_finite_gibbs"]


@dataclass
class FiniteState:
    """Labels, mixing proportions and component parameters at fixed K."""

    z: np.ndarray
    weights: np.ndarray
    components: list

    @property
    def n_clusters(self):
        return len(self.components)


def run_finite_gibbs(x, model, n_clusters, hyper, dirichlet_conc=1.0,
                     n_samples=2000, burn_in=100, rng=None, seed=None):
    """Run a fixed-K chain and return its :class:`ChainResult`.

    ``dirichlet_conc`` is the total symmetric concentration: the proportions
    prior is Dirichlet(conc/K, ..., conc/K).
    """
    if rng is None:
        rng = rand.make_rng(seed)
    x = np.asarray(x, dtype=float)
    n, d = x.shape
    k = int(n_clusters)
    if k < 1:
        raise ValueError(f"n_clusters must be >= 1, got {n_clusters}")
    if n_samples <= burn_in or burn_in < 0:
        raise ValueError(f"need n_samples > burn_in >= 0, got ({n_samples}, {burn_in})")
    conc = float(dirichlet_conc)
    if conc <= 0:
        raise ValueError(f"dirichlet_conc must be positive, got {dirichlet_conc}")

    weights = rand.sample_dirichlet(np.full(k, conc / k), rng)
    components = []
    shared = None
    for j in range(k):
        comp = models.sample_prior(model, hyper, rng, shared=shared, component_index=j)
        shared = comp.shared
        components.append(comp)

    samples = []
    scores = []
    for step in range(n_samples):
        log_dens = log_component_densities(x, model, components)
        logp = np.log(weights) + log_dens
        top = logp.max(axis=1, keepdims=True)
        probs = np.exp(logp - top)
        probs /= probs.sum(axis=1, keepdims=True)
        cum = np.cumsum(probs, axis=1)
        u = rng.random(n)
        z = np.minimum((cum < u[:, None]).sum(axis=1), k - 1).astype(np.int64)

        occupancy = np.bincount(z, minlength=k)
        weights = rand.sample_dirichlet(conc / k + occupancy, rng)
        components = models.sample_posterior(model, x, z, hyper, components, rng)

        if step >= burn_in:
            dens = log_component_densities(x, model, components)
            score = float(np.sum(np.log(weights[z]) + dens[np.arange(n), z]))
            samples.append(ChainSample(
                z=z.copy(),
                components=models.copy_components(components),
                alpha=float("nan"),
                n_clusters=k,
                joint_score=score,
                weights=weights.copy(),
            ))
            scores.append(score)

    scores = np.array(scores)
    best = int(np.argmax(scores))
    return ChainResult(
        samples=samples,
        k_mode=k,
        map_partition=samples[best].z.copy(),
        per_sample_loglik=scores,
    )
